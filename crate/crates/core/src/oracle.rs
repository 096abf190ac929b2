//! Dense-matrix ground truth.
//!
//! Everything here is computed from the standard gate matrices and entry-wise
//! Pauli matrices, without touching the symbolic conjugation tables, so it can
//! independently confirm (or refute) symbolic judgments on small registers.
//! Qubit 1 is the most significant bit of a basis index.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::{self, Strategy};
use crate::gates::GateSemantics;
use crate::pauli::{PauliLetter, PauliString, PauliWord};
use crate::program::{Op, Program};
use crate::ring::{CCoeff, Coeff, RingCoeff, APPROX_DROP_TOL, APPROX_EQ_TOL};
use crate::sum::{AdditiveOperator, PauliSum};
use crate::types::{Branch, QType};

pub type DenseOperator = DMatrix<Complex64>;
pub type StateVector = DVector<Complex64>;

/// Numeric tolerances used by the oracle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Equality of matrix entries and probabilities.
    pub eq: f64,
    /// Decomposition coefficients below this magnitude are dropped.
    pub drop: f64,
    /// Unitarity / Hermiticity checks.
    pub unitary: f64,
    /// Singular values above this count towards a Schmidt rank.
    pub rank: f64,
}

pub const TOLERANCES: Tolerances = Tolerances { eq: APPROX_EQ_TOL, drop: APPROX_DROP_TOL, unitary: 1e-10, rank: 1e-9 };

/// Default register-size cap.
pub const DEFAULT_CAP: usize = 5;
/// Largest register the oracle accepts at all.
pub const MAX_CAP: usize = 7;

/// Largest `k` tried when recognising a float as `(a + b√2)/2^k`.
const EXACTIFY_MAX_K: u32 = 8;

fn check_cap(n: usize, cap: usize) -> Result<()> {
    let cap = cap.min(MAX_CAP);
    if n > cap {
        return Err(Error::OracleCap { qubits: n, cap });
    }
    Ok(())
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Matrix of a built-in gate from its textbook definition.
pub fn gate_matrix(name: &str) -> Result<DenseOperator> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    let m = |dim: usize, v: Vec<Complex64>| DMatrix::from_row_slice(dim, dim, &v);
    let diag = |v: Vec<Complex64>| DMatrix::from_diagonal(&DVector::from_vec(v));
    Ok(match name {
        "I" => DMatrix::identity(2, 2),
        "X" => m(2, vec![o, l, l, o]),
        "Y" => m(2, vec![o, c(0.0, -1.0), c(0.0, 1.0), o]),
        "Z" => diag(vec![l, -l]),
        "H" => m(2, vec![c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]),
        "S" => diag(vec![l, c(0.0, 1.0)]),
        "SDG" => diag(vec![l, c(0.0, -1.0)]),
        "T" => diag(vec![l, c(s, s)]),
        "TDG" => diag(vec![l, c(s, -s)]),
        "CNOT" => m(4, vec![l, o, o, o, o, l, o, o, o, o, o, l, o, o, l, o]),
        "CZ" => diag(vec![l, l, l, -l]),
        "SWAP" => m(4, vec![l, o, o, o, o, o, l, o, o, l, o, o, o, o, o, l]),
        other => return Err(Error::UnknownGate(other.to_string())),
    })
}

/// Applies a `2^a × 2^a` local matrix on qubits `at` (0-based) to a state
/// stored in `amps` (length `2^n`).
pub fn apply_local(amps: &mut [Complex64], local: &DenseOperator, at: &[usize], n: usize) {
    let a = at.len();
    let dim = 1usize << a;
    let bit = |q: usize| 1usize << (n - 1 - q);
    let mask: usize = at.iter().map(|&q| bit(q)).sum();
    let offsets: Vec<usize> = (0..dim)
        .map(|li| {
            (0..a)
                .filter(|i| (li >> (a - 1 - i)) & 1 == 1)
                .map(|i| bit(at[i]))
                .sum()
        })
        .collect();
    let mut buf = vec![Complex64::new(0.0, 0.0); dim];
    for base in 0..amps.len() {
        if base & mask != 0 {
            continue;
        }
        for (li, off) in offsets.iter().enumerate() {
            buf[li] = amps[base + off];
        }
        for (ri, off) in offsets.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (ci, v) in buf.iter().enumerate() {
                acc += local[(ri, ci)] * v;
            }
            amps[base + off] = acc;
        }
    }
}

fn apply_ops_to_columns(u: &mut DenseOperator, ops: &[Op], n: usize) -> Result<()> {
    for op in ops {
        match op {
            Op::Gate { sem, at } => {
                let g = gate_matrix(sem.name())?;
                for mut col in u.column_iter_mut() {
                    apply_local(col.as_mut_slice(), &g, at, n);
                }
            }
            Op::Meas { .. } => {
                return Err(Error::Unsupported("the oracle cannot form the matrix of a measurement".into()))
            }
        }
    }
    Ok(())
}

/// Unitary of a measurement-free program (program order = left-to-right
/// application, so `H;T` gives `T·H`).
pub fn program_matrix(p: &Program, cap: usize) -> Result<DenseOperator> {
    check_cap(p.qubits, cap)?;
    let ops = p.expand()?;
    let dim = 1usize << p.qubits;
    let mut u = DMatrix::identity(dim, dim);
    apply_ops_to_columns(&mut u, &ops, p.qubits)?;
    Ok(u)
}

/// The single non-zero entry of row `r` of a Pauli word's matrix:
/// `(column, value)`.
fn pauli_row_entry(letters: &[PauliLetter], xmask: usize, r: usize) -> (usize, Complex64) {
    let n = letters.len();
    let mut v = c(1.0, 0.0);
    for (q, l) in letters.iter().enumerate() {
        let sign = if (r >> (n - 1 - q)) & 1 == 1 { -1.0 } else { 1.0 };
        v *= match l {
            PauliLetter::I | PauliLetter::X => c(1.0, 0.0),
            PauliLetter::Z => c(sign, 0.0),
            // σy = [[0, −i], [i, 0]]: row 0 carries −i, row 1 carries +i.
            PauliLetter::Y => c(0.0, -sign),
        };
    }
    (r ^ xmask, v)
}

fn x_mask(letters: &[PauliLetter]) -> usize {
    let n = letters.len();
    letters
        .iter()
        .enumerate()
        .filter(|(_, l)| matches!(l, PauliLetter::X | PauliLetter::Y))
        .map(|(q, _)| 1usize << (n - 1 - q))
        .sum()
}

/// Matrix of a Pauli word, built entry by entry from its letters.
pub fn pauli_word_matrix(w: &PauliWord) -> DenseOperator {
    let dim = 1usize << w.num_qubits();
    let mut m = DMatrix::from_element(dim, dim, c(0.0, 0.0));
    let letters = w.letters();
    let xmask = x_mask(&letters);
    for r in 0..dim {
        let (col, v) = pauli_row_entry(&letters, xmask, r);
        m[(r, col)] = v;
    }
    m
}

pub fn pauli_string_matrix(p: &PauliString) -> DenseOperator {
    let phase = match p.phase() % 4 {
        0 => c(1.0, 0.0),
        1 => c(0.0, 1.0),
        2 => c(-1.0, 0.0),
        _ => c(0.0, -1.0),
    };
    pauli_word_matrix(p.word()) * phase
}

pub fn additive_matrix(m: &AdditiveOperator) -> DenseOperator {
    let dim = 1usize << m.num_qubits();
    let mut out = DMatrix::from_element(dim, dim, c(0.0, 0.0));
    for (w, k) in m.iter() {
        out += pauli_word_matrix(w) * c(k.to_f64(), 0.0);
    }
    out
}

pub fn pauli_sum_matrix(m: &PauliSum) -> DenseOperator {
    let dim = 1usize << m.num_qubits();
    let mut out = DMatrix::from_element(dim, dim, c(0.0, 0.0));
    for (w, k) in m.iter() {
        out += pauli_word_matrix(w) * k.to_c64();
    }
    out
}

/// Size-checked [`additive_matrix`].
pub fn matrix_of_additive(m: &AdditiveOperator, cap: usize) -> Result<DenseOperator> {
    check_cap(m.num_qubits(), cap)?;
    Ok(additive_matrix(m))
}

/// Recognises `x` as `(a + b√2)/2^k` with small `k`, within the equality
/// tolerance.
pub fn exactify(x: f64) -> Option<RingCoeff> {
    if !x.is_finite() {
        return None;
    }
    let r2 = std::f64::consts::SQRT_2;
    for k in 0..=EXACTIFY_MAX_K {
        let scale = (1u64 << k) as f64;
        let y = x * scale;
        let bmax = (y.abs() / r2).ceil() as i64 + 1;
        for b in -bmax..=bmax {
            let a = (y - b as f64 * r2).round();
            let cand = (a + b as f64 * r2) / scale;
            if (cand - x).abs() <= APPROX_EQ_TOL {
                return Some(RingCoeff::new(a as i128, b as i128, k));
            }
        }
    }
    None
}

/// Exact coefficient when recognisable, float otherwise.
pub fn exactify_coeff(x: f64) -> Coeff {
    match exactify(x) {
        Some(r) => Coeff::Exact(r),
        None => Coeff::Approx(x),
    }
}

/// Expansion `m = Σ_P c_P P` with `c_P = tr(P·m)/2^n` over all `4^n` words,
/// small coefficients dropped and the rest exactified when possible.
pub fn pauli_decompose(m: &DenseOperator, strategy: Strategy) -> Result<PauliSum> {
    let dim = m.nrows();
    if dim != m.ncols() || !dim.is_power_of_two() {
        return Err(Error::Invalid(format!("{}x{} is not a qubit operator", dim, m.ncols())));
    }
    let n = dim.trailing_zeros() as usize;
    check_cap(n, MAX_CAP)?;
    let words = 1usize << (2 * n);
    let coeffs: Vec<Option<(PauliWord, CCoeff)>> = exec::map_range(strategy, words, |idx| {
        let w = PauliWord::from_local_index(n, idx);
        let letters = w.letters();
        let xmask = x_mask(&letters);
        // tr(P m) with P monomial: one product per row.
        let mut acc = c(0.0, 0.0);
        for r in 0..dim {
            let (col, v) = pauli_row_entry(&letters, xmask, r);
            acc += v * m[(col, r)];
        }
        let coeff = acc / dim as f64;
        if coeff.norm() < TOLERANCES.drop {
            return None;
        }
        let part = |x: f64| if x.abs() < TOLERANCES.drop { Coeff::ZERO } else { exactify_coeff(x) };
        Some((w, CCoeff { re: part(coeff.re), im: part(coeff.im) }))
    });
    Ok(PauliSum::from_terms(n, coeffs.into_iter().flatten()))
}

/// Largest entry-wise difference.
pub fn max_abs_diff(a: &DenseOperator, b: &DenseOperator) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn is_unitary(m: &DenseOperator, tol: f64) -> bool {
    let id = DMatrix::identity(m.nrows(), m.ncols());
    max_abs_diff(&(m.adjoint() * m), &id) <= tol
}

pub fn is_hermitian(m: &DenseOperator, tol: f64) -> bool {
    max_abs_diff(&m.adjoint(), m) <= tol
}

/// `‖U·mat(a)·U† − mat(b)‖_max ≤ tol` for the unitary of `p`.
pub fn verify_arrow(p: &Program, a: &AdditiveOperator, b: &AdditiveOperator, tol: f64) -> Result<bool> {
    let u = program_matrix(p, DEFAULT_CAP.max(p.qubits.min(MAX_CAP)))?;
    verify_arrow_matrix(&u, a, b, tol)
}

pub fn verify_arrow_matrix(u: &DenseOperator, a: &AdditiveOperator, b: &AdditiveOperator, tol: f64) -> Result<bool> {
    if a.num_qubits() != b.num_qubits() || (1usize << a.num_qubits()) != u.nrows() {
        return Err(Error::LengthMismatch { left: a.num_qubits(), right: b.num_qubits() });
    }
    let lhs = u * additive_matrix(a) * u.adjoint();
    Ok(max_abs_diff(&lhs, &additive_matrix(b)) <= tol)
}

/// Computational basis state `|bits⟩` (bit `q` of `bits[q]`, qubit 1 first).
pub fn basis_state(bits: &[bool]) -> StateVector {
    let n = bits.len();
    let idx: usize = bits.iter().enumerate().filter(|(_, b)| **b).map(|(q, _)| 1usize << (n - 1 - q)).sum();
    let mut v = DVector::from_element(1 << n, c(0.0, 0.0));
    v[idx] = c(1.0, 0.0);
    v
}

/// Runs a measurement-free program on a state.
pub fn run_program(p: &Program, s: &StateVector) -> Result<StateVector> {
    check_cap(p.qubits, MAX_CAP)?;
    if s.len() != 1usize << p.qubits {
        return Err(Error::LengthMismatch { left: p.qubits, right: s.len().trailing_zeros() as usize });
    }
    let mut out = s.clone();
    for op in p.expand()? {
        match op {
            Op::Gate { sem, at } => apply_local(out.as_mut_slice(), &gate_matrix(sem.name())?, &at, p.qubits),
            Op::Meas { .. } => {
                return Err(Error::Unsupported("the oracle runs measurement-free programs only".into()))
            }
        }
    }
    Ok(out)
}

fn state_qubits(s: &StateVector) -> Result<usize> {
    let len = s.len();
    if !len.is_power_of_two() {
        return Err(Error::Invalid(format!("state length {len} is not a power of two")));
    }
    let n = len.trailing_zeros() as usize;
    check_cap(n, MAX_CAP)?;
    Ok(n)
}

/// True when `½(I + mat(m))·s = s` for every term of some branch.
pub fn verify_inhabitation(s: &StateVector, t: &QType, tol: f64) -> Result<bool> {
    let n = state_qubits(s)?;
    if n != t.num_qubits() {
        return Err(Error::LengthMismatch { left: n, right: t.num_qubits() });
    }
    Ok(t.branches().iter().any(|b| branch_inhabited(s, b, tol)))
}

fn branch_inhabited(s: &StateVector, b: &Branch, tol: f64) -> bool {
    b.terms().iter().all(|m| {
        let ms = additive_matrix(m) * s;
        let proj = (s + &ms) * c(0.5, 0.0);
        (proj - s).norm() <= tol
    })
}

/// Number of singular values above tolerance across the bipartition
/// `(K, K̄)` (0-based qubits in `k_set`).
pub fn schmidt_rank(s: &StateVector, k_set: &[usize]) -> Result<usize> {
    let n = state_qubits(s)?;
    if let Some(&q) = k_set.iter().find(|&&q| q >= n) {
        return Err(Error::IndexOutOfRange { index: q + 1, qubits: n });
    }
    let rest: Vec<usize> = (0..n).filter(|q| !k_set.contains(q)).collect();
    let sub_index = |idx: usize, qs: &[usize]| {
        qs.iter().fold(0usize, |acc, &q| (acc << 1) | ((idx >> (n - 1 - q)) & 1))
    };
    let mut m = DMatrix::from_element(1 << k_set.len(), 1 << rest.len(), c(0.0, 0.0));
    for (idx, v) in s.iter().enumerate() {
        m[(sub_index(idx, k_set), sub_index(idx, &rest))] = *v;
    }
    let sv = m.singular_values();
    Ok(sv.iter().filter(|x| **x > TOLERANCES.rank).count())
}

/// Born-rule outcome of a z-basis measurement: `+` means the qubit reads 0.
#[derive(Clone, Debug)]
pub struct BornOutcome {
    pub p_plus: f64,
    pub p_minus: f64,
    pub post_plus: Option<StateVector>,
    pub post_minus: Option<StateVector>,
}

pub fn born_measure(s: &StateVector, qubit: usize) -> Result<BornOutcome> {
    let n = state_qubits(s)?;
    if qubit >= n {
        return Err(Error::IndexOutOfRange { index: qubit + 1, qubits: n });
    }
    let bit = 1usize << (n - 1 - qubit);
    let mut plus = s.clone();
    let mut minus = s.clone();
    for (idx, (p, m)) in plus.iter_mut().zip(minus.iter_mut()).enumerate() {
        if idx & bit == 0 {
            *m = c(0.0, 0.0);
        } else {
            *p = c(0.0, 0.0);
        }
    }
    let (pp, pm) = (plus.norm_squared(), minus.norm_squared());
    let post = |v: StateVector, p: f64| (p > TOLERANCES.eq).then(|| v / c(p.sqrt(), 0.0));
    Ok(BornOutcome { p_plus: pp, p_minus: pm, post_plus: post(plus, pp), post_minus: post(minus, pm) })
}

/// Dimension of the joint +1 eigenspace of a branch of commuting terms:
/// `tr ∏ ½(I + mat(m))`.
pub fn eigenspace_dimension(b: &Branch, cap: usize) -> Result<usize> {
    let n = b.num_qubits();
    check_cap(n, cap)?;
    let dim = 1usize << n;
    let id: DenseOperator = DMatrix::identity(dim, dim);
    let mut proj = id.clone();
    for m in b.terms() {
        proj *= (&id + additive_matrix(m)) * c(0.5, 0.0);
    }
    Ok(proj.trace().re.round() as usize)
}

/// A unit vector of the joint +1 eigenspace (largest projected basis column).
pub fn eigenstate(b: &Branch, cap: usize) -> Result<Option<StateVector>> {
    let n = b.num_qubits();
    check_cap(n, cap)?;
    let dim = 1usize << n;
    let id: DenseOperator = DMatrix::identity(dim, dim);
    let mut proj = id.clone();
    for m in b.terms() {
        proj *= (&id + additive_matrix(m)) * c(0.5, 0.0);
    }
    let best = (0..dim).max_by(|&i, &j| proj.column(i).norm().total_cmp(&proj.column(j).norm()));
    Ok(best.and_then(|i| {
        let col: StateVector = proj.column(i).into_owned();
        let nrm = col.norm();
        (nrm > 1e-6).then(|| col / c(nrm, 0.0))
    }))
}

/// A unitary (up to global phase) realising gate semantics: `U|0…0⟩` is the
/// joint +1 eigenvector of the images of every `Z_j`, and
/// `U|x⟩ = ∏ image(X_j)^{x_j} · U|0…0⟩`.
pub fn semantics_matrix(g: &GateSemantics, cap: usize) -> Result<DenseOperator> {
    let n = g.arity();
    check_cap(n, cap)?;
    let zs = Branch::new(n, (0..n).map(|j| g.image_z(j).clone()).collect());
    let v0 = eigenstate(&zs, cap)?
        .ok_or_else(|| Error::Invalid(format!("images of Z under `{}` have no common eigenvector", g.name())))?;
    let dim = 1usize << n;
    let xs: Vec<DenseOperator> = (0..n).map(|j| additive_matrix(g.image_x(j))).collect();
    let mut u = DMatrix::from_element(dim, dim, c(0.0, 0.0));
    for x in 0..dim {
        let mut v = v0.clone();
        // Apply X_j images in reverse so that X^x = X_1^{x_1} … X_n^{x_n}.
        for j in (0..n).rev() {
            if (x >> (n - 1 - j)) & 1 == 1 {
                v = &xs[j] * v;
            }
        }
        u.set_column(x, &v);
    }
    Ok(u)
}

/// A random unit vector of the joint +1 eigenspace of a branch: the
/// projector applied to a random complex vector. `None` when the branch is
/// uninhabited.
pub fn sample_eigenstate<R: rand::Rng>(b: &Branch, cap: usize, rng: &mut R) -> Result<Option<StateVector>> {
    let n = b.num_qubits();
    check_cap(n, cap)?;
    let dim = 1usize << n;
    let mut v: StateVector = DVector::from_fn(dim, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    for m in b.terms() {
        v = (&v + additive_matrix(m) * &v) * c(0.5, 0.0);
    }
    let nrm = v.norm();
    Ok((nrm > 1e-6).then(|| v / c(nrm, 0.0)))
}

/// One leaf of a measured run: the outcome signs in program order, the
/// probability of that history and the normalized post-measurement state.
#[derive(Clone, Debug)]
pub struct Leaf {
    pub signs: Vec<i8>,
    pub probability: f64,
    pub state: StateVector,
}

/// Runs a program with mid-circuit measurements, splitting into one leaf per
/// outcome history; histories of probability below the tolerance are dropped.
pub fn run_measured(p: &Program, s: &StateVector) -> Result<Vec<Leaf>> {
    check_cap(p.qubits, MAX_CAP)?;
    if s.len() != 1usize << p.qubits {
        return Err(Error::LengthMismatch { left: p.qubits, right: s.len().trailing_zeros() as usize });
    }
    let mut leaves = vec![Leaf { signs: Vec::new(), probability: 1.0, state: s.clone() }];
    for op in p.expand()? {
        match op {
            Op::Gate { sem, at } => {
                let g = gate_matrix(sem.name())?;
                for l in &mut leaves {
                    apply_local(l.state.as_mut_slice(), &g, &at, p.qubits);
                }
            }
            Op::Meas { qubit } => {
                let mut next = Vec::with_capacity(2 * leaves.len());
                for l in leaves {
                    let born = born_measure(&l.state, qubit)?;
                    for (sign, p, post) in [(1i8, born.p_plus, born.post_plus), (-1, born.p_minus, born.post_minus)] {
                        if let Some(state) = post {
                            let mut signs = l.signs.clone();
                            signs.push(sign);
                            next.push(Leaf { signs, probability: l.probability * p, state });
                        }
                    }
                }
                leaves = next;
            }
        }
    }
    Ok(leaves)
}
