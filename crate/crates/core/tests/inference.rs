//! Inference laws: conjugation preserves commutation, inference composes,
//! every inferred arrow is confirmed by the dense oracle.

use proptest::prelude::*;
use qtype_core::exec::Strategy as Exec;
use qtype_core::fuzz;
use qtype_core::gates::{
    apply_gate, builtin_semantics, controlled_additive_type, controlled_arrow_type, multi_controlled_z,
    tcount_lower_bound, BUILTIN_GATES,
};
use qtype_core::infer::{additive_type_of_gate, infer, infer_with, track_generators, InferConfig};
use qtype_core::oracle::{self, verify_arrow, TOLERANCES};
use qtype_core::pauli::{PauliLetter, PauliWord};
use qtype_core::program::Program;
use qtype_core::qecc::conjugate;
use qtype_core::ring::{Coeff, RingCoeff};
use qtype_core::sum::AdditiveOperator;
use qtype_core::syntax::{parse_program, parse_sum};
use qtype_core::types::{operators_commute, Branch, QType};

const TOFFOLI: &str = "QUBITS 3
GATE TOFFOLI a b c {
  H c; CNOT b c; TDG c; CNOT a c; T c; CNOT b c; TDG c
  CNOT a c; T b; T c; H c; CNOT a b; T a; TDG b; CNOT a b
}
TOFFOLI 1 2 3";

fn toffoli() -> Program {
    parse_program(TOFFOLI).unwrap().program
}

fn op(s: &str) -> AdditiveOperator {
    parse_sum(s).unwrap()
}

fn single_term(m: AdditiveOperator) -> QType {
    QType::single(Branch::new(m.num_qubits(), vec![m]))
}

#[test]
fn toffoli_generator_images() {
    let p = toffoli();
    let images = track_generators(&p, Exec::Sequential).unwrap();
    assert_eq!(images[0].1, op("ZII"));
    assert_eq!(images[1].1, op("IZI"));
    assert_eq!(images[2].0, op("IIX"));
    assert_eq!(images[2].1, op("1/2 IIZ + 1/2 ZIZ + 1/2 IZZ - 1/2 ZZZ"));
    // Coefficients confirmed numerically.
    let u = oracle::program_matrix(&p, oracle::DEFAULT_CAP).unwrap();
    for (j, (x, z)) in images.iter().enumerate() {
        let xj = AdditiveOperator::single_letter(3, j, PauliLetter::X);
        let zj = AdditiveOperator::single_letter(3, j, PauliLetter::Z);
        assert!(oracle::verify_arrow_matrix(&u, &xj, x, TOLERANCES.eq).unwrap());
        assert!(oracle::verify_arrow_matrix(&u, &zj, z, TOLERANCES.eq).unwrap());
    }
}

#[test]
fn toffoli_blowup_stays_within_sixteen_summands() {
    let p = toffoli();
    let cfg = InferConfig { trace: true, ..InferConfig::default() };
    let out = infer_with(&p, &single_term(op("IIZ")), &cfg).unwrap();
    assert!(out.max_generated <= 16, "peak {}", out.max_generated);
    assert_eq!(out.output.branches()[0].terms()[0].len(), 4);
    let peak = out.trace.iter().map(|s| s.output.branches()[0].terms()[0].len()).max().unwrap();
    assert!(peak <= 16);
}

#[test]
fn table_closure() {
    let half_rt2 = Coeff::Exact(RingCoeff::INV_SQRT2);
    for name in BUILTIN_GATES {
        let g = builtin_semantics(name).unwrap();
        let k = g.arity();
        let at: Vec<usize> = (0..k).collect();
        for idx in 1..4usize.pow(k as u32) {
            let w = PauliWord::from_local_index(k, idx);
            for neg in [false, true] {
                let c = if neg { Coeff::MINUS_ONE } else { Coeff::ONE };
                let img = apply_gate(&AdditiveOperator::single(w.clone(), c), &g, &at).unwrap();
                for (_, c) in img.iter() {
                    let unit = c.is_unit_sign().is_some();
                    let t_row = matches!(*name, "T" | "TDG") && (c.abs() == half_rt2);
                    assert!(unit || t_row, "{name} on {w}: coefficient {c}");
                }
            }
        }
    }
}

#[test]
fn control_s_arrow_types() {
    let s = builtin_semantics("S").unwrap();
    // S = (1+i)/2 I + (1−i)/2 Z: Re = ½(I + Z), Im = ½(I − Z).
    let re = op("1/2 I + 1/2 Z");
    let im = op("1/2 I - 1/2 Z");
    let cs = controlled_arrow_type(&s, &re, &im, 1).unwrap();
    assert_eq!(cs.image_z(0), &op("ZI"));
    assert_eq!(cs.image_x(0), &op("X(1/2 I + 1/2 Z) + Y(1/2 I - 1/2 Z)"));
    assert_eq!(cs.image_z(1), &op("IZ"));
    assert_eq!(cs.image_x(1), &op("I(1/2 X + 1/2 Y) + Z(1/2 X - 1/2 Y)"));
    assert_eq!(tcount_lower_bound(&cs).unwrap(), 2);
    let u = oracle::semantics_matrix(&cs, oracle::DEFAULT_CAP).unwrap();
    assert!(oracle::is_unitary(&u, TOLERANCES.unitary));
}

#[test]
fn multi_controlled_z_closed_forms() {
    let z = op("Z");
    for k in 1..=6usize {
        // control^(k-1)-Z on k wires.
        let g = multi_controlled_z(k - 1).unwrap();
        let closed = controlled_additive_type(&z, k - 1).unwrap();
        // I − 2^(1−k) (I − Z)^⊗k, expanded independently.
        let mut expected = AdditiveOperator::identity(k);
        let mut corr = AdditiveOperator::identity(0);
        for _ in 0..k {
            corr = corr.tensor(&op("I - Z"));
        }
        expected = &expected - &corr.scale(Coeff::Exact(RingCoeff::pow2_inv(k as u32 - 1)));
        assert_eq!(closed, expected, "k = {k}");
        assert_eq!(additive_type_of_gate(&g).unwrap(), Some(expected.clone()), "k = {k}");
        if k >= 2 {
            assert_eq!(tcount_lower_bound(&multi_controlled_z(k).unwrap()).unwrap(), 2 * k as u32 - 2);
        }
        // Oracle: the closed form is diag(1, …, 1, −1).
        let m = oracle::additive_matrix(&expected);
        let dim = 1 << k;
        for i in 0..dim {
            for j in 0..dim {
                let want = if i != j { 0.0 } else if i == dim - 1 { -1.0 } else { 1.0 };
                assert!((m[(i, j)].re - want).abs() < 1e-12 && m[(i, j)].im.abs() < 1e-12);
            }
        }
    }
}

fn clifford_t(seed: u64, n: usize, m: usize, t: usize) -> Program {
    fuzz::clifford_t_program(&mut fuzz::rng(seed), n, m, t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn conjugation_preserves_commutation(seed in any::<u64>(), n in 1usize..=4, t in 0usize..=3) {
        use rand::SeedableRng;
        let p = clifford_t(seed, n, 12, t);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let a = fuzz::hermitian_pauli(&mut rng, n);
        let b = fuzz::hermitian_pauli(&mut rng, n);
        let ia = conjugate(&p, &AdditiveOperator::from_pauli(&a).unwrap()).unwrap();
        let ib = conjugate(&p, &AdditiveOperator::from_pauli(&b).unwrap()).unwrap();
        prop_assert_eq!(a.commutes(&b).unwrap(), operators_commute(&ia, &ib));
    }

    #[test]
    fn inference_composes(seed in any::<u64>(), n in 1usize..=4, split in 0usize..=16) {
        let p = clifford_t(seed, n, 16, 2);
        let (mut p1, mut p2) = (Program::new(n), Program::new(n));
        p1.body = p.body[..split.min(p.body.len())].to_vec();
        p2.body = p.body[split.min(p.body.len())..].to_vec();
        let init = fuzz::all_zero_type(n);
        let whole = infer(&p, &init).unwrap();
        let staged = infer(&p2, &infer(&p1, &init).unwrap()).unwrap();
        prop_assert_eq!(whole, staged);
    }

    #[test]
    fn inferred_arrows_hold_numerically(seed in any::<u64>(), n in 1usize..=3, t in 0usize..=3) {
        let p = clifford_t(seed, n, 20, t);
        let images = track_generators(&p, Exec::Parallel).unwrap();
        for (j, (x, z)) in images.iter().enumerate() {
            let xj = AdditiveOperator::single_letter(n, j, PauliLetter::X);
            let zj = AdditiveOperator::single_letter(n, j, PauliLetter::Z);
            prop_assert!(verify_arrow(&p, &xj, x, TOLERANCES.eq).unwrap(), "X{} -> {}", j + 1, x);
            prop_assert!(verify_arrow(&p, &zj, z, TOLERANCES.eq).unwrap(), "Z{} -> {}", j + 1, z);
        }
    }

    #[test]
    fn strategies_agree(seed in any::<u64>(), n in 1usize..=4) {
        let p = clifford_t(seed, n, 30, 3);
        prop_assert_eq!(
            track_generators(&p, Exec::Sequential).unwrap(),
            track_generators(&p, Exec::Parallel).unwrap()
        );
    }
}
