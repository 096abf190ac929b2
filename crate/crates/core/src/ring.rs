//! Exact scalars of the form `(a + b·√2) / 2^k`, plus the real and complex
//! coefficient wrappers used by Pauli sums.
//!
//! Every coefficient produced by pushing Pauli operators through Clifford+T
//! circuits lives in the dyadic extension `ℤ[√2][1/2]`, so all symbolic work is
//! exact. Values that leave the ring (only possible through explicit numeric
//! input or renormalisation by a non-dyadic probability) degrade to
//! [`Coeff::Approx`] and are flagged as inexact.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Absolute tolerance used when comparing approximate coefficients.
pub const APPROX_EQ_TOL: f64 = 1e-9;
/// Magnitude below which approximate coefficients are treated as zero.
pub const APPROX_DROP_TOL: f64 = 1e-12;

/// `(a + b·√2) / 2^k`, always stored in reduced canonical form: when `k > 0`
/// the numerator components `a` and `b` are not both even, and zero is
/// `(0, 0, 0)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingCoeff {
    a: i128,
    b: i128,
    k: u32,
}

impl RingCoeff {
    pub const ZERO: RingCoeff = RingCoeff { a: 0, b: 0, k: 0 };
    pub const ONE: RingCoeff = RingCoeff { a: 1, b: 0, k: 0 };
    pub const MINUS_ONE: RingCoeff = RingCoeff { a: -1, b: 0, k: 0 };
    pub const HALF: RingCoeff = RingCoeff { a: 1, b: 0, k: 1 };
    pub const SQRT2: RingCoeff = RingCoeff { a: 0, b: 1, k: 0 };
    /// `1/√2 = √2/2`.
    pub const INV_SQRT2: RingCoeff = RingCoeff { a: 0, b: 1, k: 1 };

    /// Builds `(a + b√2)/2^k` and reduces it.
    pub fn new(a: i128, b: i128, k: u32) -> Self {
        let mut c = RingCoeff { a, b, k };
        c.reduce();
        c
    }

    pub fn from_int(a: i128) -> Self {
        RingCoeff { a, b: 0, k: 0 }
    }

    /// `2^-e`.
    pub fn pow2_inv(e: u32) -> Self {
        RingCoeff::new(1, 0, e)
    }

    pub fn a(&self) -> i128 {
        self.a
    }

    pub fn b(&self) -> i128 {
        self.b
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    fn reduce(&mut self) {
        if self.a == 0 && self.b == 0 {
            self.k = 0;
            return;
        }
        while self.k > 0 && self.a % 2 == 0 && self.b % 2 == 0 {
            self.a /= 2;
            self.b /= 2;
            self.k -= 1;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn is_one(&self) -> bool {
        *self == Self::ONE
    }

    /// True when the value is a (dyadic) rational, i.e. carries no √2 part.
    pub fn is_rational(&self) -> bool {
        self.b == 0
    }

    /// Floating-point evaluation.
    pub fn to_f64(&self) -> f64 {
        (self.a as f64 + self.b as f64 * std::f64::consts::SQRT_2) / 2f64.powi(self.k as i32)
    }

    /// Exact sign of the value: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        let sa = self.a.signum();
        let sb = self.b.signum();
        if sb == 0 {
            return sa as i32;
        }
        if sa == 0 || sa == sb {
            return sb as i32;
        }
        // Opposite signs: compare a² with 2b².
        let a2 = self.a.checked_mul(self.a).expect("ring coefficient overflow");
        let b2 = self
            .b
            .checked_mul(self.b)
            .and_then(|v| v.checked_mul(2))
            .expect("ring coefficient overflow");
        match a2.cmp(&b2) {
            Ordering::Greater => sa as i32,
            Ordering::Less => sb as i32,
            Ordering::Equal => 0,
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -*self
        } else {
            *self
        }
    }

    /// Multiplies by `1/√2`: `(a + b√2)·√2 / 2 = (2b + a√2) / 2^(k+1)`.
    pub fn invsqrt2_scale(&self) -> Self {
        let two_b = self.b.checked_mul(2).expect("ring coefficient overflow");
        RingCoeff::new(two_b, self.a, self.k + 1)
    }

    /// Divides by two.
    pub fn half(&self) -> Self {
        RingCoeff::new(self.a, self.b, self.k + 1)
    }

    /// Galois conjugate `(a − b√2)/2^k`.
    pub fn conjugate(&self) -> Self {
        RingCoeff { a: self.a, b: -self.b, k: self.k }
    }

    /// Multiplicative inverse when it stays in the ring, i.e. when the norm
    /// `a² − 2b²` is `±2^j`.
    pub fn checked_inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let norm = self
            .a
            .checked_mul(self.a)?
            .checked_sub(self.b.checked_mul(self.b)?.checked_mul(2)?)?;
        let sign = norm.signum();
        let mag = norm.unsigned_abs();
        if !mag.is_power_of_two() {
            return None;
        }
        let j = mag.trailing_zeros();
        // 1/x = 2^k (a − b√2) / norm = ±(a − b√2)·2^k / 2^j
        let (na, nb) = (sign * self.a, -sign * self.b);
        if self.k >= j {
            let shift = self.k - j;
            let f = 1i128.checked_shl(shift)?;
            Some(RingCoeff::new(na.checked_mul(f)?, nb.checked_mul(f)?, 0))
        } else {
            Some(RingCoeff::new(na, nb, j - self.k))
        }
    }

    /// Smallest `s ≥ 0` with `2^(s/2)·c ∈ ℤ[√2]`.
    ///
    /// For a reduced `(a + b√2)/2^k` with `k > 0` this is `2k` when `a` is odd
    /// and `2k − 1` when `a` is even (then `b` is odd). For monomials `c/2^(s/2)`
    /// with integer `c` it coincides with the exponent `s` itself.
    pub fn sqrt2_denominator_exponent(&self) -> u32 {
        if self.k == 0 {
            0
        } else if self.a % 2 != 0 {
            2 * self.k
        } else {
            2 * self.k - 1
        }
    }

    fn aligned(&self, other: &Self) -> (i128, i128, i128, i128, u32) {
        let k = self.k.max(other.k);
        let s1 = 1i128
            .checked_shl(k - self.k)
            .expect("ring coefficient overflow");
        let s2 = 1i128
            .checked_shl(k - other.k)
            .expect("ring coefficient overflow");
        (
            self.a.checked_mul(s1).expect("ring coefficient overflow"),
            self.b.checked_mul(s1).expect("ring coefficient overflow"),
            other.a.checked_mul(s2).expect("ring coefficient overflow"),
            other.b.checked_mul(s2).expect("ring coefficient overflow"),
            k,
        )
    }
}

impl Default for RingCoeff {
    fn default() -> Self {
        Self::ZERO
    }
}

impl Add for RingCoeff {
    type Output = RingCoeff;
    fn add(self, rhs: RingCoeff) -> RingCoeff {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (a1, b1, a2, b2, k) = self.aligned(&rhs);
        RingCoeff::new(
            a1.checked_add(a2).expect("ring coefficient overflow"),
            b1.checked_add(b2).expect("ring coefficient overflow"),
            k,
        )
    }
}

impl Sub for RingCoeff {
    type Output = RingCoeff;
    fn sub(self, rhs: RingCoeff) -> RingCoeff {
        self + (-rhs)
    }
}

impl Neg for RingCoeff {
    type Output = RingCoeff;
    fn neg(self) -> RingCoeff {
        RingCoeff { a: -self.a, b: -self.b, k: self.k }
    }
}

impl Mul for RingCoeff {
    type Output = RingCoeff;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: RingCoeff) -> RingCoeff {
        let m = |x: i128, y: i128| x.checked_mul(y).expect("ring coefficient overflow");
        let a = m(self.a, rhs.a)
            .checked_add(m(2, m(self.b, rhs.b)))
            .expect("ring coefficient overflow");
        let b = m(self.a, rhs.b)
            .checked_add(m(self.b, rhs.a))
            .expect("ring coefficient overflow");
        RingCoeff::new(a, b, self.k + rhs.k)
    }
}

impl fmt::Display for RingCoeff {
    /// Prints `1`, `-1`, `1/2`, `rt2/2`, `(1+rt2)/4`, `-3rt2/8`, ...
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = match (self.a, self.b) {
            (a, 0) => a.to_string(),
            (0, b) => match b {
                1 => "rt2".to_string(),
                -1 => "-rt2".to_string(),
                b => format!("{b}rt2"),
            },
            (a, b) => {
                let rt = match b {
                    1 => "+rt2".to_string(),
                    -1 => "-rt2".to_string(),
                    b if b > 0 => format!("+{b}rt2"),
                    b => format!("{b}rt2"),
                };
                format!("({a}{rt})")
            }
        };
        if self.k == 0 {
            write!(f, "{num}")
        } else {
            write!(f, "{num}/{}", 1u128 << self.k)
        }
    }
}

impl fmt::Debug for RingCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A real coefficient: exact ring element, or a float once exactness is lost.
#[derive(Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coeff {
    Exact(RingCoeff),
    Approx(f64),
}

impl Coeff {
    pub const ZERO: Coeff = Coeff::Exact(RingCoeff::ZERO);
    pub const ONE: Coeff = Coeff::Exact(RingCoeff::ONE);
    pub const MINUS_ONE: Coeff = Coeff::Exact(RingCoeff::MINUS_ONE);

    pub fn to_f64(&self) -> f64 {
        match self {
            Coeff::Exact(r) => r.to_f64(),
            Coeff::Approx(v) => *v,
        }
    }

    pub fn exact(&self) -> Option<RingCoeff> {
        match self {
            Coeff::Exact(r) => Some(*r),
            Coeff::Approx(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coeff::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Exact(r) => r.is_zero(),
            Coeff::Approx(v) => v.abs() < APPROX_DROP_TOL,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coeff::Exact(r) => r.is_one(),
            Coeff::Approx(v) => (v - 1.0).abs() < APPROX_EQ_TOL,
        }
    }

    /// ±1 test (exact coefficients only count when exactly ±1).
    pub fn is_unit_sign(&self) -> Option<bool> {
        match self {
            Coeff::Exact(r) if *r == RingCoeff::ONE => Some(true),
            Coeff::Exact(r) if *r == RingCoeff::MINUS_ONE => Some(false),
            _ => None,
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Coeff::Exact(r) => r.signum(),
            Coeff::Approx(v) if v.abs() < APPROX_DROP_TOL => 0,
            Coeff::Approx(v) => {
                if *v > 0.0 {
                    1
                } else {
                    -1
                }
            }
        }
    }

    pub fn abs(&self) -> Coeff {
        match self {
            Coeff::Exact(r) => Coeff::Exact(r.abs()),
            Coeff::Approx(v) => Coeff::Approx(v.abs()),
        }
    }

    pub fn invsqrt2_scale(&self) -> Coeff {
        match self {
            Coeff::Exact(r) => Coeff::Exact(r.invsqrt2_scale()),
            Coeff::Approx(v) => Coeff::Approx(v / std::f64::consts::SQRT_2),
        }
    }

    /// Multiplicative inverse, exact when it stays in the ring.
    pub fn inv(&self) -> Option<Coeff> {
        match self {
            Coeff::Exact(r) => match r.checked_inv() {
                Some(i) => Some(Coeff::Exact(i)),
                None if r.is_zero() => None,
                None => Some(Coeff::Approx(1.0 / r.to_f64())),
            },
            Coeff::Approx(v) if v.abs() < APPROX_DROP_TOL => None,
            Coeff::Approx(v) => Some(Coeff::Approx(1.0 / v)),
        }
    }
}

impl From<RingCoeff> for Coeff {
    fn from(r: RingCoeff) -> Self {
        Coeff::Exact(r)
    }
}

impl PartialEq for Coeff {
    fn eq(&self, other: &Coeff) -> bool {
        match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => a == b,
            _ => (self.to_f64() - other.to_f64()).abs() <= APPROX_EQ_TOL,
        }
    }
}

impl Add for Coeff {
    type Output = Coeff;
    fn add(self, rhs: Coeff) -> Coeff {
        match (self, rhs) {
            (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(a + b),
            _ => Coeff::Approx(self.to_f64() + rhs.to_f64()),
        }
    }
}

impl Sub for Coeff {
    type Output = Coeff;
    fn sub(self, rhs: Coeff) -> Coeff {
        self + (-rhs)
    }
}

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        match self {
            Coeff::Exact(a) => Coeff::Exact(-a),
            Coeff::Approx(v) => Coeff::Approx(-v),
        }
    }
}

impl Mul for Coeff {
    type Output = Coeff;
    fn mul(self, rhs: Coeff) -> Coeff {
        match (self, rhs) {
            (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(a * b),
            _ => Coeff::Approx(self.to_f64() * rhs.to_f64()),
        }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Exact(r) => write!(f, "{r}"),
            Coeff::Approx(v) => write!(f, "{}", format_float(*v)),
        }
    }
}

impl fmt::Debug for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Exact(r) => write!(f, "{r}"),
            Coeff::Approx(v) => write!(f, "~{v}"),
        }
    }
}

/// Decimal rendering used for inexact coefficients; always contains a `.` so
/// the parser reads it back as a float.
pub fn format_float(v: f64) -> String {
    let s = format!("{v:.12}");
    let s = s.trim_end_matches('0');
    if s.ends_with('.') {
        format!("{s}0")
    } else {
        s.to_string()
    }
}

/// A complex coefficient `re + i·im` over [`Coeff`].
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CCoeff {
    pub re: Coeff,
    pub im: Coeff,
}

impl CCoeff {
    pub const ZERO: CCoeff = CCoeff { re: Coeff::ZERO, im: Coeff::ZERO };
    pub const ONE: CCoeff = CCoeff { re: Coeff::ONE, im: Coeff::ZERO };

    pub fn real(re: Coeff) -> Self {
        CCoeff { re, im: Coeff::ZERO }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Multiplies by `i^e`.
    pub fn times_i_pow(self, e: u8) -> CCoeff {
        match e % 4 {
            0 => self,
            1 => CCoeff { re: -self.im, im: self.re },
            2 => CCoeff { re: -self.re, im: -self.im },
            _ => CCoeff { re: self.im, im: -self.re },
        }
    }

    pub fn conj(self) -> CCoeff {
        CCoeff { re: self.re, im: -self.im }
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for CCoeff {
    type Output = CCoeff;
    fn add(self, rhs: CCoeff) -> CCoeff {
        CCoeff { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Neg for CCoeff {
    type Output = CCoeff;
    fn neg(self) -> CCoeff {
        CCoeff { re: -self.re, im: -self.im }
    }
}

impl Mul for CCoeff {
    type Output = CCoeff;
    fn mul(self, rhs: CCoeff) -> CCoeff {
        CCoeff {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

impl fmt::Debug for CCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{:?}", self.re)
        } else {
            write!(f, "({:?} + i{:?})", self.re, self.im)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_sqrt2_squared_is_half() {
        assert_eq!(RingCoeff::INV_SQRT2 * RingCoeff::INV_SQRT2, RingCoeff::HALF);
    }

    #[test]
    fn sum_of_inverse_sqrt2_reduces_to_sqrt2() {
        let s = RingCoeff::INV_SQRT2 + RingCoeff::INV_SQRT2;
        assert_eq!((s.a(), s.b(), s.k()), (0, 1, 0));
    }

    #[test]
    fn zero_is_canonical() {
        let z = RingCoeff::HALF - RingCoeff::HALF;
        assert_eq!((z.a(), z.b(), z.k()), (0, 0, 0));
        assert_eq!(RingCoeff::new(0, 0, 5), RingCoeff::ZERO);
    }

    #[test]
    fn display_forms() {
        assert_eq!(RingCoeff::ONE.to_string(), "1");
        assert_eq!(RingCoeff::MINUS_ONE.to_string(), "-1");
        assert_eq!(RingCoeff::HALF.to_string(), "1/2");
        assert_eq!(RingCoeff::INV_SQRT2.to_string(), "rt2/2");
        assert_eq!(RingCoeff::new(1, 1, 2).to_string(), "(1+rt2)/4");
        assert_eq!(RingCoeff::new(2, -1, 2).to_string(), "(2-rt2)/4");
    }

    #[test]
    fn inverse_in_ring() {
        let p = RingCoeff::new(2, 1, 2); // (2+√2)/4
        let inv = p.checked_inv().unwrap();
        assert_eq!(p * inv, RingCoeff::ONE);
        assert_eq!(RingCoeff::new(3, 0, 2).checked_inv(), None);
        assert_eq!(RingCoeff::HALF.checked_inv(), Some(RingCoeff::from_int(2)));
    }

    #[test]
    fn denominator_exponent() {
        assert_eq!(RingCoeff::ONE.sqrt2_denominator_exponent(), 0);
        assert_eq!(RingCoeff::INV_SQRT2.sqrt2_denominator_exponent(), 1);
        assert_eq!(RingCoeff::HALF.sqrt2_denominator_exponent(), 2);
        assert_eq!(RingCoeff::pow2_inv(5).sqrt2_denominator_exponent(), 10);
    }

    #[test]
    fn exact_signum() {
        assert_eq!(RingCoeff::new(1, -1, 0).signum(), -1);
        assert_eq!(RingCoeff::new(-1, 1, 0).signum(), 1);
        assert_eq!(RingCoeff::new(3, -2, 0).signum(), 1);
    }
}
