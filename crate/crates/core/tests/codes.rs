//! Stabilizer codes: logical types, encoders and transversality verdicts.

use proptest::prelude::*;
use qtype_core::gates::builtin_semantics;
use qtype_core::oracle::{self, basis_state, run_program, verify_inhabitation, TOLERANCES};
use qtype_core::program::Program;
use qtype_core::qecc::{
    encoder_check, logical_type, logical_y_squares_to_identity, steane_encoder, transversal_program,
    transversality_check, LogicalBasis, StabilizerCode, TransversalityDefect,
};
use qtype_core::types::{normalize, QType};

fn shuffled(p: &Program, seed: u64) -> Program {
    use rand::seq::SliceRandom;
    let mut q = p.clone();
    q.body.shuffle(&mut qtype_core::fuzz::rng(seed));
    q
}

#[test]
fn encoder_prepares_the_logical_states() {
    let code = StabilizerCode::steane();
    let enc = steane_encoder();
    for basis in [LogicalBasis::Z, LogicalBasis::X] {
        let v = encoder_check(&enc, &code, basis, 0).unwrap();
        assert!(v.pass, "{basis:?}: {:?}", v.diff);
    }
    // Oracle: |0⟩ and |+⟩ on the data wire land in the logical eigenstates.
    let zero = run_program(&enc, &basis_state(&[false; 7])).unwrap();
    let z_type = QType::single(normalize(&logical_type(&code, LogicalBasis::Z)).unwrap());
    assert!(verify_inhabitation(&zero, &z_type, TOLERANCES.eq).unwrap());
    let plus = run_program(&Program::new(7).gate("H", &[1]).then(&enc), &basis_state(&[false; 7])).unwrap();
    let x_type = QType::single(normalize(&logical_type(&code, LogicalBasis::X)).unwrap());
    assert!(verify_inhabitation(&plus, &x_type, TOLERANCES.eq).unwrap());
    assert_eq!(oracle::eigenspace_dimension(&x_type.branches()[0], oracle::MAX_CAP).unwrap(), 1);
}

#[test]
fn logical_y_is_hermitian() {
    let code = StabilizerCode::steane();
    assert!(logical_y_squares_to_identity(&code));
    assert_eq!(code.logical_y(), "-YYYYYYY".parse().unwrap());
}

#[test]
fn transversality_verdicts() {
    let code = StabilizerCode::steane();
    let g = |name: &str| builtin_semantics(name).unwrap();
    let h = transversality_check(&code, &transversal_program(&code, &["H"], 1), &g("H")).unwrap();
    assert!(h.pass);
    let s = transversality_check(&code, &transversal_program(&code, &["S"], 1), &g("S")).unwrap();
    assert_eq!(s.defects, vec![TransversalityDefect::SignDefect { witness: "X_L -> -Y_L".into() }]);
    let zs = transversality_check(&code, &transversal_program(&code, &["Z", "S"], 1), &g("S")).unwrap();
    assert!(zs.pass);
    let cnot = transversality_check(&code, &transversal_program(&code, &["CNOT"], 2), &g("CNOT")).unwrap();
    assert!(cnot.pass);
    let t = transversality_check(&code, &transversal_program(&code, &["T"], 1), &g("T")).unwrap();
    assert!(matches!(t.defects.first(), Some(TransversalityDefect::AdditiveEscape { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn verdicts_ignore_gate_order_within_a_layer(seed in any::<u64>(), which in 0usize..4) {
        let code = StabilizerCode::steane();
        let (gates, target, blocks): (&[&str], &str, usize) = [
            (&["H"][..], "H", 1),
            (&["S"][..], "S", 1),
            (&["T"][..], "T", 1),
            (&["CNOT"][..], "CNOT", 2),
        ][which];
        let target = builtin_semantics(target).unwrap();
        let layer = transversal_program(&code, gates, blocks);
        let a = transversality_check(&code, &layer, &target).unwrap();
        let b = transversality_check(&code, &shuffled(&layer, seed), &target).unwrap();
        prop_assert_eq!(a.pass, b.pass);
        prop_assert_eq!(a.defects, b.defects);
    }
}
