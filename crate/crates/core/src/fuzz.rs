//! Seeded random programs and types for property tests, benchmarks and
//! `verify --oracle`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::infer::infer;
use crate::pauli::{PauliLetter, PauliString, PauliWord};
use crate::program::Program;
use crate::types::{Branch, QType};

pub const CLIFFORD_1Q: &[&str] = &["H", "S", "SDG", "X", "Y", "Z"];
pub const CLIFFORD_2Q: &[&str] = &["CNOT", "CZ", "SWAP"];

/// Deterministic generator for a seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn push_random_clifford<R: Rng>(rng: &mut R, p: &mut Program) {
    let n = p.qubits;
    if n >= 2 && rng.gen_bool(0.4) {
        let g = CLIFFORD_2Q[rng.gen_range(0..CLIFFORD_2Q.len())];
        let a = rng.gen_range(0..n);
        let b = (a + rng.gen_range(1..n)) % n;
        p.push_gate(g, &[a + 1, b + 1]);
    } else {
        let g = CLIFFORD_1Q[rng.gen_range(0..CLIFFORD_1Q.len())];
        p.push_gate(g, &[rng.gen_range(0..n) + 1]);
    }
}

/// `m` uniformly drawn gates from {H, S, S†, X, Y, Z, CNOT, CZ, SWAP}.
pub fn clifford_program<R: Rng>(rng: &mut R, n: usize, m: usize) -> Program {
    let mut p = Program::new(n);
    for _ in 0..m {
        push_random_clifford(rng, &mut p);
    }
    p
}

/// `m` Clifford gates with `t` T/T† gates inserted at random positions.
pub fn clifford_t_program<R: Rng>(rng: &mut R, n: usize, m: usize, t: usize) -> Program {
    let mut slots: Vec<bool> = (0..m + t).map(|i| i < t).collect();
    slots.shuffle(rng);
    let mut p = Program::new(n);
    for is_t in slots {
        if is_t {
            let g = if rng.gen_bool(0.5) { "T" } else { "TDG" };
            p.push_gate(g, &[rng.gen_range(0..n) + 1]);
        } else {
            push_random_clifford(rng, &mut p);
        }
    }
    p
}

/// A Hermitian (±) Pauli string with uniformly random letters.
pub fn hermitian_pauli<R: Rng>(rng: &mut R, n: usize) -> PauliString {
    let letters: Vec<PauliLetter> = (0..n).map(|_| PauliLetter::ALL[rng.gen_range(0..4)]).collect();
    PauliString::signed(rng.gen_bool(0.5), PauliWord::from_letters(&letters))
}

/// `Z` on every wire: the type of `|0…0⟩`.
pub fn all_zero_type(n: usize) -> QType {
    let terms: Vec<PauliString> = (0..n).map(|q| PauliString::single(n, q, PauliLetter::Z)).collect();
    QType::single(Branch::from_paulis(n, &terms))
}

/// A complete stabilizer type: `|0…0⟩` pushed through a random Clifford of
/// `depth` gates. Returns the type together with the preparing circuit.
pub fn stabilizer_branch<R: Rng>(rng: &mut R, n: usize, depth: usize) -> Result<(Branch, Program)> {
    let p = clifford_program(rng, n, depth);
    let out = infer(&p, &all_zero_type(n))?;
    Ok((out.branches()[0].clone(), p))
}

/// A one-T shape: `H 1; T 1` (or `T†`) followed by a random Clifford, applied
/// to `|0…0⟩`. The first term is a non-stabilizer additive operator.
pub fn one_t_branch<R: Rng>(rng: &mut R, n: usize, depth: usize) -> Result<(Branch, Program)> {
    let mut p = Program::new(n);
    p.push_gate("H", &[1]);
    p.push_gate(if rng.gen_bool(0.5) { "T" } else { "TDG" }, &[1]);
    let tail = clifford_program(rng, n, depth);
    let p = p.then(&tail);
    let out = infer(&p, &all_zero_type(n))?;
    Ok((out.branches()[0].clone(), p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        let a = clifford_t_program(&mut rng(7), 3, 20, 2);
        let b = clifford_t_program(&mut rng(7), 3, 20, 2);
        assert_eq!(a, b);
        assert_eq!(a.t_count().unwrap(), 2);
        assert_eq!(a.gate_count().unwrap(), 22);
    }

    #[test]
    fn one_t_shape_is_not_stabilizer() {
        let (b, _) = one_t_branch(&mut rng(1), 3, 10).unwrap();
        assert!(!b.is_gottesman());
        assert_eq!(b.terms().len(), 3);
    }
}
