//! Measurement: branch structure, exact probabilities and agreement with
//! Born-rule sampling of the dense state.

use proptest::prelude::*;
use qtype_core::fuzz;
use qtype_core::infer::infer;
use qtype_core::measure::{meas_prob_1q, measure_additive_2q, measure_branch, measure_stabilizer, MeasurementOutcome};
use qtype_core::oracle::{self, basis_state, born_measure, run_program, verify_inhabitation, TOLERANCES};
use qtype_core::pauli::PauliLetter;
use qtype_core::ring::{Coeff, RingCoeff};
use qtype_core::sum::AdditiveOperator;
use qtype_core::syntax::{parse_program, parse_type};
use qtype_core::types::{separable_single, types_equal, Branch, QType};
use qtype_core::Error;

fn as_type(o: &MeasurementOutcome) -> QType {
    QType::new(o.branches.iter().map(|b| b.branch.clone()).collect()).unwrap()
}

#[test]
fn ghz_measurement_collapses_every_qubit() {
    let b = Branch::paulis(&["XXX", "ZZI", "IZZ"]);
    let o = measure_stabilizer(&b, 0).unwrap();
    let want = parse_type("ZII & IZI & IIZ | -ZII & -IZI & -IIZ").unwrap();
    assert!(types_equal(&as_type(&o), &want));
    assert_eq!(o.branches[0].sign, 1);
    assert_eq!(o.probability(1), Some(Coeff::Exact(RingCoeff::HALF)));
}

#[test]
fn gate_injection_at_a_quarter_turn() {
    let src = "QUBITS 2
INIT (rt2/2)(X + Y)@{1} & X@{2}
CNOT 2 1
MEAS 1
EXPECT Z@{1} & (rt2/2)(X + Y)@{2} | -Z@{1} & (rt2/2)(X - Y)@{2}";
    let f = parse_program(src).unwrap();
    let v = qtype_core::infer::check(&f.program, f.init.as_ref().unwrap(), f.expect.as_ref().unwrap()).unwrap();
    assert!(v.pass, "{:?}", v.diff);
    let init = f.init.unwrap();
    let out = qtype_core::infer::infer_with(&f.program, &init, &Default::default()).unwrap();
    let rec = &out.measurements[0].outcomes[0];
    assert_eq!(rec.probability(1), Some(Coeff::Exact(RingCoeff::HALF)));
    assert_eq!(rec.probability(-1), Some(Coeff::Exact(RingCoeff::HALF)));
    // The oracle agrees on both post-measurement states.
    let prep = parse_program("QUBITS 2\nH 1\nT 1\nH 2\nCNOT 2 1").unwrap().program;
    let state = run_program(&prep, &basis_state(&[false, false])).unwrap();
    let born = born_measure(&state, 0).unwrap();
    assert!((born.p_plus - 0.5).abs() < TOLERANCES.eq && (born.p_minus - 0.5).abs() < TOLERANCES.eq);
    for ob in &rec.branches {
        let post = if ob.sign > 0 { born.post_plus.as_ref() } else { born.post_minus.as_ref() }.unwrap();
        assert!(verify_inhabitation(post, &QType::single(ob.branch.clone()), TOLERANCES.eq).unwrap());
    }
}

#[test]
fn one_qubit_probabilities_follow_the_rotation_angle() {
    for i in 0..8 {
        let theta = std::f64::consts::PI * i as f64 / 8.0;
        let m = AdditiveOperator::from_terms(
            1,
            [
                (qtype_core::pauli::PauliWord::single(1, 0, PauliLetter::Z), Coeff::Approx(theta.cos())),
                (qtype_core::pauli::PauliWord::single(1, 0, PauliLetter::X), Coeff::Approx(theta.sin())),
            ],
        );
        let (p, q) = meas_prob_1q(&m).unwrap();
        let state = oracle::eigenstate(&Branch::new(1, vec![m]), 1).unwrap().unwrap();
        let born = born_measure(&state, 0).unwrap();
        assert!((p.to_f64() - born.p_plus).abs() < TOLERANCES.eq, "theta = {theta}");
        assert!((q.to_f64() - born.p_minus).abs() < TOLERANCES.eq, "theta = {theta}");
        assert!((p.to_f64() - (1.0 + theta.cos()) / 2.0).abs() < TOLERANCES.eq);
    }
}

fn check_outcome_against_oracle(o: &MeasurementOutcome, state: &oracle::StateVector) -> Result<(), TestCaseError> {
    let born = born_measure(state, o.qubit).unwrap();
    for sign in [1i8, -1] {
        let p_oracle = if sign > 0 { born.p_plus } else { born.p_minus };
        if let Some(p) = o.probability(sign) {
            prop_assert!((p.to_f64() - p_oracle).abs() <= TOLERANCES.eq, "p{} = {} vs {}", sign, p, p_oracle);
        }
    }
    for ob in &o.branches {
        let post = if ob.sign > 0 { &born.post_plus } else { &born.post_minus };
        if let Some(post) = post {
            let t = QType::single(ob.branch.clone());
            prop_assert!(verify_inhabitation(post, &t, TOLERANCES.eq).unwrap(), "post-state outside {}", ob.branch);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn stabilizer_measurement_leaves_a_z_column(seed in any::<u64>(), n in 1usize..=5, q in 0usize..5) {
        let q = q % n;
        let (b, _) = fuzz::stabilizer_branch(&mut fuzz::rng(seed), n, 4 * n).unwrap();
        let o = measure_stabilizer(&b, q).unwrap();
        prop_assert!(!o.branches.is_empty() && o.branches.len() <= 2);
        prop_assert!(o.branches.windows(2).all(|w| w[0].sign > w[1].sign));
        for ob in &o.branches {
            let z_terms: Vec<_> = ob.branch.terms().iter().filter(|t| t.iter().any(|(w, _)| w.get(q) != PauliLetter::I)).collect();
            prop_assert_eq!(z_terms.len(), 1);
            let zq = AdditiveOperator::single_letter(n, q, PauliLetter::Z);
            let want = if ob.sign > 0 { zq } else { -&zq };
            prop_assert_eq!(z_terms[0], &want);
            prop_assert!(separable_single(&ob.branch, q).unwrap());
        }
        let total = o.probability(1).unwrap() + o.probability(-1).unwrap();
        prop_assert_eq!(total, Coeff::ONE);
    }

    #[test]
    fn clifford_measurements_match_born_rule(seed in any::<u64>(), n in 1usize..=3, q in 0usize..3) {
        let q = q % n;
        let p = fuzz::clifford_program(&mut fuzz::rng(seed), n, 15);
        let b = infer(&p, &fuzz::all_zero_type(n)).unwrap().branches()[0].clone();
        let o = measure_branch(&b, q, false).unwrap();
        let s = run_program(&p, &basis_state(&vec![false; n])).unwrap();
        check_outcome_against_oracle(&o, &s)?;
    }

    #[test]
    fn additive_measurements_match_born_rule(seed in any::<u64>(), n in 1usize..=3, q in 0usize..3, depth in 0usize..8) {
        let q = q % n;
        let (_, p) = fuzz::one_t_branch(&mut fuzz::rng(seed), n, depth).unwrap();
        let p = p.then(&fuzz::clifford_t_program(&mut fuzz::rng(seed ^ 1), n, depth, 1));
        let b = infer(&p, &fuzz::all_zero_type(n)).unwrap().branches()[0].clone();
        let o = match measure_branch(&b, q, false) {
            Ok(o) => o,
            Err(Error::Unsupported(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        if let (Some(a), Some(c)) = (o.probability(1), o.probability(-1)) {
            if a.is_exact() && c.is_exact() {
                prop_assert_eq!(a + c, Coeff::ONE);
            }
        }
        let s = run_program(&p, &basis_state(&vec![false; n])).unwrap();
        check_outcome_against_oracle(&o, &s)?;
    }

    #[test]
    fn two_qubit_rule_agrees_with_stabilizer_rule(seed in any::<u64>(), q in 0usize..2) {
        let (b, _) = fuzz::stabilizer_branch(&mut fuzz::rng(seed), 2, 8).unwrap();
        let t = b.terms();
        let additive = measure_additive_2q(&t[0], &t[1], q, false).unwrap();
        let stabilizer = measure_stabilizer(&b, q).unwrap();
        prop_assert!(types_equal(&as_type(&additive).normalized().unwrap(), &as_type(&stabilizer).normalized().unwrap()));
        prop_assert_eq!(additive.probability(1), stabilizer.probability(1));
    }
}

#[test]
fn additive_measurement_fuzz_is_not_vacuous() {
    let mut supported = 0;
    for seed in 0..100 {
        let (b, _) = fuzz::one_t_branch(&mut fuzz::rng(seed), 2, 6).unwrap();
        if measure_branch(&b, (seed % 2) as usize, false).is_ok() {
            supported += 1;
        }
    }
    assert!(supported >= 50, "only {supported}/100 two-qubit one-T shapes measurable");
}
