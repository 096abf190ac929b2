//! Coefficient-weighted sums of Pauli words.
//!
//! [`AdditiveOperator`] carries real coefficients and is the semantic object
//! behind additive types; [`PauliSum`] carries complex coefficients and is used
//! for intermediate products (squares, `i·A·B`, real/imaginary splits).

use std::fmt;
use std::ops::{Add, Mul, Neg};

use crate::pauli::{PauliLetter, PauliString, PauliWord};
use crate::ring::{CCoeff, Coeff, RingCoeff};

/// Coefficient field of a [`Sum`].
pub trait Scalar: Copy + PartialEq + Add<Output = Self> + Neg<Output = Self> + Mul<Output = Self> + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
}

impl Scalar for Coeff {
    fn zero() -> Self {
        Coeff::ZERO
    }
    fn one() -> Self {
        Coeff::ONE
    }
    fn is_zero(&self) -> bool {
        Coeff::is_zero(self)
    }
}

impl Scalar for CCoeff {
    fn zero() -> Self {
        CCoeff::ZERO
    }
    fn one() -> Self {
        CCoeff::ONE
    }
    fn is_zero(&self) -> bool {
        CCoeff::is_zero(self)
    }
}

/// A sum `Σ c_w · w` over distinct Pauli words of one length, sorted by word
/// with no zero coefficients.
#[derive(Clone, PartialEq)]
pub struct Sum<C: Scalar> {
    n: usize,
    terms: Vec<(PauliWord, C)>,
}

/// Real-coefficient Pauli sum: the carrier of additive types.
pub type AdditiveOperator = Sum<Coeff>;
/// Complex-coefficient Pauli sum.
pub type PauliSum = Sum<CCoeff>;

impl<C: Scalar> Sum<C> {
    pub fn zero(n: usize) -> Self {
        Sum { n, terms: Vec::new() }
    }

    /// `c · I^n`.
    pub fn scalar(n: usize, c: C) -> Self {
        Sum::from_terms(n, [(PauliWord::identity(n), c)])
    }

    pub fn identity(n: usize) -> Self {
        Sum::scalar(n, C::one())
    }

    pub fn single(word: PauliWord, c: C) -> Self {
        let n = word.num_qubits();
        Sum::from_terms(n, [(word, c)])
    }

    /// Sorts, combines like terms and drops zeros.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (PauliWord, C)>) -> Self {
        let mut v: Vec<(PauliWord, C)> = terms.into_iter().collect();
        Self::canonicalize(&mut v);
        Sum { n, terms: v }
    }

    /// Builds from terms already sorted by word with no duplicates or zeros.
    pub(crate) fn from_sorted_unchecked(n: usize, terms: Vec<(PauliWord, C)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        Sum { n, terms }
    }

    pub(crate) fn canonicalize(v: &mut Vec<(PauliWord, C)>) {
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(PauliWord, C)> = Vec::with_capacity(v.len());
        for (w, c) in v.drain(..) {
            match out.last_mut() {
                Some(last) if last.0 == w => last.1 = last.1 + c,
                _ => out.push((w, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        *v = out;
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(PauliWord, C)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(PauliWord, C)> {
        self.terms
    }

    pub fn iter(&self) -> impl Iterator<Item = &(PauliWord, C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &PauliWord) -> C {
        match self.terms.binary_search_by(|(t, _)| t.cmp(w)) {
            Ok(i) => self.terms[i].1,
            Err(_) => C::zero(),
        }
    }

    pub fn scale(&self, c: C) -> Self {
        Sum::from_terms(self.n, self.terms.iter().map(|(w, d)| (w.clone(), c * *d)))
    }

    pub fn tensor(&self, other: &Sum<C>) -> Self {
        let mut v = Vec::with_capacity(self.len() * other.len());
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                v.push((w1.tensor(w2), *c1 * *c2));
            }
        }
        Sum::from_terms(self.n + other.n, v)
    }

    /// Places this operator on `qubits` (0-based) of an `n`-qubit register.
    pub fn embed(&self, n: usize, qubits: &[usize]) -> Self {
        Sum::from_terms(n, self.terms.iter().map(|(w, c)| (w.embed(n, qubits), *c)))
    }

    /// Restriction to `qubits`; only meaningful when the support lies inside.
    pub fn restrict(&self, qubits: &[usize]) -> Self {
        Sum::from_terms(qubits.len(), self.terms.iter().map(|(w, c)| (w.restrict(qubits), *c)))
    }

    /// Union of the supports of all summands (0-based qubits).
    pub fn support(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&q| self.terms.iter().any(|(w, _)| w.x_bit(q) || w.z_bit(q)))
            .collect()
    }

    /// Applies `f` to every word (must be a bijection on words).
    pub fn map_words(&self, f: impl Fn(&PauliWord) -> (PauliWord, C)) -> Self {
        Sum::from_terms(
            self.n,
            self.terms.iter().map(|(w, c)| {
                let (w2, d) = f(w);
                (w2, *c * d)
            }),
        )
    }
}

impl<C: Scalar> Add for &Sum<C> {
    type Output = Sum<C>;
    fn add(self, rhs: &Sum<C>) -> Sum<C> {
        assert_eq!(self.n, rhs.n, "adding Pauli sums of different lengths");
        Sum::from_terms(self.n, self.terms.iter().chain(rhs.terms.iter()).cloned())
    }
}

impl<C: Scalar> Neg for &Sum<C> {
    type Output = Sum<C>;
    fn neg(self) -> Sum<C> {
        Sum { n: self.n, terms: self.terms.iter().map(|(w, c)| (w.clone(), -*c)).collect() }
    }
}

impl<C: Scalar> std::ops::Sub for &Sum<C> {
    type Output = Sum<C>;
    fn sub(self, rhs: &Sum<C>) -> Sum<C> {
        self + &(-rhs)
    }
}

impl AdditiveOperator {
    /// A Hermitian Pauli string as a one-term operator; `None` for phases ±i.
    pub fn from_pauli(p: &PauliString) -> Option<Self> {
        match p.phase() {
            0 => Some(Sum::single(p.word().clone(), Coeff::ONE)),
            2 => Some(Sum::single(p.word().clone(), Coeff::MINUS_ONE)),
            _ => None,
        }
    }

    /// Parses a signed Pauli word such as `-XZ` (convenience for tests and
    /// tables; panics on malformed input).
    pub fn pauli(s: &str) -> Self {
        let p: PauliString = s.parse().expect("malformed Pauli string");
        Self::from_pauli(&p).expect("non-Hermitian Pauli string")
    }

    /// The term as a signed Pauli string when it is a single summand with
    /// coefficient ±1.
    pub fn as_pauli(&self) -> Option<PauliString> {
        match self.terms() {
            [(w, c)] => c.is_unit_sign().map(|pos| PauliString::signed(!pos, w.clone())),
            _ => None,
        }
    }

    pub fn is_pauli(&self) -> bool {
        self.as_pauli().is_some()
    }

    /// True when every coefficient is an exact ring element.
    pub fn is_exact(&self) -> bool {
        self.terms().iter().all(|(_, c)| c.is_exact())
    }

    pub fn to_complex(&self) -> PauliSum {
        Sum::from_sorted_unchecked(self.n, self.terms.iter().map(|(w, c)| (w.clone(), CCoeff::real(*c))).collect())
    }

    /// Symbolic square.
    pub fn square(&self) -> PauliSum {
        let c = self.to_complex();
        c.mul(&c)
    }

    /// Additive validity: Hermitian (automatic for real coefficients) and
    /// unitary, i.e. the symbolic square is the identity.
    pub fn is_valid_additive(&self) -> bool {
        !self.is_empty() && self.square() == PauliSum::identity(self.n)
    }

    /// Product of two real operators, required to be real again.
    pub fn mul_real(&self, other: &AdditiveOperator) -> Option<AdditiveOperator> {
        self.to_complex().mul(&other.to_complex()).to_real()
    }

    /// Largest `√2`-denominator exponent over the coefficients; `None` when a
    /// coefficient is inexact.
    pub fn max_denominator_exponent(&self) -> Option<u32> {
        self.terms()
            .iter()
            .map(|(_, c)| c.exact().map(|r| r.sqrt2_denominator_exponent()))
            .try_fold(0, |m, s| s.map(|s| m.max(s)))
    }

    /// Single-qubit Pauli `letter` at `q` in an `n`-qubit register.
    pub fn single_letter(n: usize, q: usize, letter: PauliLetter) -> Self {
        Sum::single(PauliWord::single(n, q, letter), Coeff::ONE)
    }
}

impl PauliSum {
    pub fn from_pauli_string(p: &PauliString) -> Self {
        Sum::single(p.word().clone(), CCoeff::ONE.times_i_pow(p.phase()))
    }

    /// Operator product with exact phase bookkeeping.
    pub fn mul(&self, other: &PauliSum) -> PauliSum {
        assert_eq!(self.n, other.n, "multiplying Pauli sums of different lengths");
        let mut v = Vec::with_capacity(self.len() * other.len());
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let (e, w) = w1.mul(w2);
                v.push((w, (*c1 * *c2).times_i_pow(e)));
            }
        }
        Sum::from_terms(self.n, v)
    }

    /// Hermitian adjoint (Pauli words are Hermitian, so conjugate coefficients).
    pub fn adjoint(&self) -> PauliSum {
        Sum::from_sorted_unchecked(self.n, self.terms.iter().map(|(w, c)| (w.clone(), c.conj())).collect())
    }

    pub fn real_part(&self) -> AdditiveOperator {
        Sum::from_terms(self.n, self.terms.iter().map(|(w, c)| (w.clone(), c.re)))
    }

    pub fn imag_part(&self) -> AdditiveOperator {
        Sum::from_terms(self.n, self.terms.iter().map(|(w, c)| (w.clone(), c.im)))
    }

    pub fn to_real(&self) -> Option<AdditiveOperator> {
        if self.terms.iter().all(|(_, c)| c.is_real()) {
            Some(self.real_part())
        } else {
            None
        }
    }

    pub fn times_i(&self) -> PauliSum {
        Sum::from_sorted_unchecked(self.n, self.terms.iter().map(|(w, c)| (w.clone(), c.times_i_pow(1))).collect())
    }
}

/// `(I − Z)^{⊗k}` expanded: `Σ_{S ⊆ [k]} (−1)^{|S|} Z_S`.
pub fn i_minus_z_power(k: usize) -> AdditiveOperator {
    let mut acc = AdditiveOperator::identity(0);
    let one_minus_z = Sum::from_terms(
        1,
        [(PauliWord::identity(1), Coeff::ONE), (PauliWord::single(1, 0, PauliLetter::Z), Coeff::MINUS_ONE)],
    );
    for _ in 0..k {
        acc = acc.tensor(&one_minus_z);
    }
    acc
}

fn fmt_sum(
    f: &mut fmt::Formatter<'_>,
    terms: &[(PauliWord, Coeff)],
) -> fmt::Result {
    if terms.is_empty() {
        return write!(f, "0");
    }
    let common = terms[0].1.abs();
    let uniform = terms.iter().all(|(_, c)| c.abs() == common) && terms.len() > 1;
    let write_signed = |f: &mut fmt::Formatter<'_>, i: usize, neg: bool| -> fmt::Result {
        if i == 0 {
            if neg {
                write!(f, "-")?;
            }
        } else if neg {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        Ok(())
    };
    if uniform && !common.is_one() {
        write!(f, "({common})(")?;
        for (i, (w, c)) in terms.iter().enumerate() {
            write_signed(f, i, c.signum() < 0)?;
            write!(f, "{w}")?;
        }
        return write!(f, ")");
    }
    for (i, (w, c)) in terms.iter().enumerate() {
        write_signed(f, i, c.signum() < 0)?;
        let a = c.abs();
        if a.is_one() {
            write!(f, "{w}")?;
        } else {
            write!(f, "{a} {w}")?;
        }
    }
    Ok(())
}

impl fmt::Display for AdditiveOperator {
    /// `XX`, `-ZI`, `(rt2/2)(X + Y)`, `(2+rt2)/4 I + (2-rt2)/4 Z`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_sum(f, &self.terms)
    }
}

impl fmt::Debug for AdditiveOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re = self.real_part();
        let im = self.imag_part();
        if im.is_empty() {
            return write!(f, "{re}");
        }
        if re.is_empty() {
            return write!(f, "i({im})");
        }
        write!(f, "{re} + i({im})")
    }
}

impl fmt::Debug for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Convenience constructor: `(c, word)` pairs with exact coefficients.
pub fn additive(n: usize, terms: &[(RingCoeff, &str)]) -> AdditiveOperator {
    Sum::from_terms(
        n,
        terms.iter().map(|(c, w)| {
            let p: PauliString = w.parse().expect("malformed Pauli word");
            assert_eq!(p.num_qubits(), n, "word length mismatch");
            let sign = if p.is_negative() { -Coeff::Exact(*c) } else { Coeff::Exact(*c) };
            (p.into_word(), sign)
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_image_is_valid() {
        let m = additive(1, &[(RingCoeff::INV_SQRT2, "X"), (RingCoeff::INV_SQRT2, "Y")]);
        assert!(m.is_valid_additive());
        assert_eq!(m.to_string(), "(rt2/2)(X + Y)");
    }

    #[test]
    fn x_plus_y_is_invalid() {
        let m = additive(1, &[(RingCoeff::ONE, "X"), (RingCoeff::ONE, "Y")]);
        assert!(!m.is_valid_additive());
        assert_eq!(m.square(), PauliSum::scalar(1, CCoeff::real(Coeff::Exact(RingCoeff::from_int(2)))));
    }

    #[test]
    fn i_minus_z_squared() {
        let m = i_minus_z_power(2);
        assert_eq!(m.to_string(), "II - IZ - ZI + ZZ");
    }

    #[test]
    fn mixed_display() {
        let m = additive(
            1,
            &[(RingCoeff::new(2, 1, 2), "I"), (RingCoeff::new(2, -1, 2), "Z")],
        );
        assert_eq!(m.to_string(), "(2+rt2)/4 I + (2-rt2)/4 Z");
    }
}
