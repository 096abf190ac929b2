//! The dense-matrix oracle against itself and against inference.

use proptest::prelude::*;
use qtype_core::exec::Strategy as Exec;
use qtype_core::fuzz;
use qtype_core::infer::{semantics_of_program, track_generators};
use qtype_core::oracle::{self, pauli_decompose, verify_arrow_matrix, TOLERANCES};
use qtype_core::pauli::PauliLetter;
use qtype_core::program::Program;
use qtype_core::sum::AdditiveOperator;

fn arrows_hold(p: &Program) -> Result<(), TestCaseError> {
    let n = p.qubits;
    let u = oracle::program_matrix(p, oracle::DEFAULT_CAP).unwrap();
    let images = track_generators(p, Exec::Parallel).unwrap();
    for (j, (x, z)) in images.iter().enumerate() {
        let xj = AdditiveOperator::single_letter(n, j, PauliLetter::X);
        let zj = AdditiveOperator::single_letter(n, j, PauliLetter::Z);
        prop_assert!(verify_arrow_matrix(&u, &xj, x, TOLERANCES.eq).unwrap(), "X{} -> {}", j + 1, x);
        prop_assert!(verify_arrow_matrix(&u, &zj, z, TOLERANCES.eq).unwrap(), "Z{} -> {}", j + 1, z);
    }
    Ok(())
}

/// Equal up to a global phase.
fn same_up_to_phase(a: &oracle::DenseOperator, b: &oracle::DenseOperator) -> bool {
    let (i, j) = (0..a.nrows())
        .flat_map(|i| (0..a.ncols()).map(move |j| (i, j)))
        .max_by(|&x, &y| a[x].norm().total_cmp(&a[y].norm()))
        .unwrap();
    if b[(i, j)].norm() < 1e-9 {
        return false;
    }
    let phase = a[(i, j)] / b[(i, j)];
    oracle::max_abs_diff(a, &(b * phase)) <= TOLERANCES.eq
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn clifford_arrows_hold(seed in any::<u64>(), n in 1usize..=4, m in 0usize..=60) {
        arrows_hold(&fuzz::clifford_program(&mut fuzz::rng(seed), n, m))?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn clifford_t_arrows_hold(seed in any::<u64>(), n in 1usize..=3, m in 0usize..=40, t in 0usize..=3) {
        arrows_hold(&fuzz::clifford_t_program(&mut fuzz::rng(seed), n, m, t))?;
    }

    #[test]
    fn decomposition_inverts_the_matrix(seed in any::<u64>(), n in 1usize..=3) {
        let p = fuzz::clifford_t_program(&mut fuzz::rng(seed), n, 10, 2);
        let w = fuzz::hermitian_pauli(&mut fuzz::rng(seed.wrapping_add(1)), n);
        let m = qtype_core::qecc::conjugate(&p, &AdditiveOperator::from_pauli(&w).unwrap()).unwrap();
        let mat = oracle::matrix_of_additive(&m, oracle::DEFAULT_CAP).unwrap();
        for strategy in [Exec::Sequential, Exec::Parallel] {
            let back = pauli_decompose(&mat, strategy).unwrap();
            let back_mat = oracle::pauli_sum_matrix(&back);
            prop_assert!(oracle::max_abs_diff(&back_mat, &mat) <= TOLERANCES.unitary);
            // Ring coefficients are recovered exactly.
            prop_assert_eq!(back.to_real(), Some(m.clone()));
        }
    }

    #[test]
    fn semantics_reconstruct_the_unitary(seed in any::<u64>(), n in 1usize..=3, t in 0usize..=2) {
        let p = fuzz::clifford_t_program(&mut fuzz::rng(seed), n, 12, t);
        let g = semantics_of_program("P", &p, Exec::Sequential).unwrap();
        let from_types = oracle::semantics_matrix(&g, oracle::DEFAULT_CAP).unwrap();
        let direct = oracle::program_matrix(&p, oracle::DEFAULT_CAP).unwrap();
        prop_assert!(same_up_to_phase(&from_types, &direct));
    }
}

#[test]
fn oracle_refuses_large_inputs() {
    let p = Program::new(oracle::MAX_CAP + 1);
    assert!(matches!(
        oracle::program_matrix(&p, oracle::MAX_CAP),
        Err(qtype_core::Error::OracleCap { .. })
    ));
}
