//! Phased Pauli strings stored as packed x/z bitplanes.
//!
//! Letter encoding per qubit: `I = (0,0)`, `X = (1,0)`, `Z = (0,1)`,
//! `Y = (1,1)`, where `Y` denotes σy itself (not the product XZ). A
//! [`PauliString`] is `i^phase · L₁ ⊗ … ⊗ Lₙ`.
//!
//! Qubits are 0-based internally; all user-facing syntax is 1-based.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};

type Plane = SmallVec<[u64; 1]>;

fn words_for(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

/// A single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    pub const ALL: [PauliLetter; 4] = [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliLetter::I,
            (true, false) => PauliLetter::X,
            (true, true) => PauliLetter::Y,
            (false, true) => PauliLetter::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            PauliLetter::I => (false, false),
            PauliLetter::X => (true, false),
            PauliLetter::Y => (true, true),
            PauliLetter::Z => (false, true),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(PauliLetter::I),
            'X' => Some(PauliLetter::X),
            'Y' => Some(PauliLetter::Y),
            'Z' => Some(PauliLetter::Z),
            _ => None,
        }
    }

    /// Single-letter product `a·b = i^e · c`.
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: PauliLetter) -> (u8, PauliLetter) {
        use PauliLetter::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (X, X) | (Y, Y) | (Z, Z) => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
        }
    }
}

/// An unsigned Pauli word (letters only, no phase). Ordering is lexicographic
/// over the letters from qubit 1 with `I < X < Y < Z`, computed from the
/// bitplanes; it is the canonical term order of Pauli sums.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliWord {
    n: usize,
    x: Plane,
    z: Plane,
}

impl PauliWord {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliWord { n, x: smallvec![0; w], z: smallvec![0; w] }
    }

    pub fn from_letters(letters: &[PauliLetter]) -> Self {
        let mut w = PauliWord::identity(letters.len());
        for (q, l) in letters.iter().enumerate() {
            w.set(q, *l);
        }
        w
    }

    /// Single-letter word: `letter` at qubit `q` (0-based), identity elsewhere.
    pub fn single(n: usize, q: usize, letter: PauliLetter) -> Self {
        let mut w = PauliWord::identity(n);
        w.set(q, letter);
        w
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn x_bit(&self, q: usize) -> bool {
        (self.x[q / 64] >> (q % 64)) & 1 == 1
    }

    #[inline]
    pub fn z_bit(&self, q: usize) -> bool {
        (self.z[q / 64] >> (q % 64)) & 1 == 1
    }

    #[inline]
    pub fn set_bits(&mut self, q: usize, x: bool, z: bool) {
        let (i, m) = (q / 64, 1u64 << (q % 64));
        if x {
            self.x[i] |= m;
        } else {
            self.x[i] &= !m;
        }
        if z {
            self.z[i] |= m;
        } else {
            self.z[i] &= !m;
        }
    }

    #[inline]
    pub fn flip_x(&mut self, q: usize) {
        self.x[q / 64] ^= 1u64 << (q % 64);
    }

    #[inline]
    pub fn flip_z(&mut self, q: usize) {
        self.z[q / 64] ^= 1u64 << (q % 64);
    }

    #[inline]
    pub fn get(&self, q: usize) -> PauliLetter {
        PauliLetter::from_bits(self.x_bit(q), self.z_bit(q))
    }

    #[inline]
    pub fn set(&mut self, q: usize, l: PauliLetter) {
        let (x, z) = l.bits();
        self.set_bits(q, x, z);
    }

    pub fn letters(&self) -> Vec<PauliLetter> {
        (0..self.n).map(|q| self.get(q)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().all(|w| *w == 0) && self.z.iter().all(|w| *w == 0)
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// Qubits (0-based) carrying a non-identity letter.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.x_bit(q) || self.z_bit(q)).collect()
    }

    /// True when the symplectic product with `other` vanishes.
    pub fn commutes(&self, other: &PauliWord) -> bool {
        let mut parity = 0u32;
        for i in 0..self.x.len() {
            parity ^= ((self.x[i] & other.z[i]) ^ (self.z[i] & other.x[i])).count_ones() & 1;
        }
        parity == 0
    }

    /// Product `self · other = i^e · w`, computed word-parallel.
    pub fn mul(&self, other: &PauliWord) -> (u8, PauliWord) {
        debug_assert_eq!(self.n, other.n);
        let mut out = PauliWord::identity(self.n);
        let mut plus: u32 = 0;
        let mut minus: u32 = 0;
        for i in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[i], self.z[i], other.x[i], other.z[i]);
            let cyc = (x1 & !z1 & x2 & z2) | (x1 & z1 & !x2 & z2) | (!x1 & z1 & x2 & !z2);
            let anti = (x1 & z1 & x2 & !z2) | (!x1 & z1 & x2 & z2) | (x1 & !z1 & !x2 & z2);
            plus += cyc.count_ones();
            minus += anti.count_ones();
            out.x[i] = x1 ^ x2;
            out.z[i] = z1 ^ z2;
        }
        let e = ((plus + 3 * minus) % 4) as u8;
        (e, out)
    }

    /// Concatenation `self ⊗ other`.
    pub fn tensor(&self, other: &PauliWord) -> PauliWord {
        let mut out = PauliWord::identity(self.n + other.n);
        for q in 0..self.n {
            out.set(q, self.get(q));
        }
        for q in 0..other.n {
            out.set(self.n + q, other.get(q));
        }
        out
    }

    /// Letters at the given qubits, in order.
    pub fn restrict(&self, qubits: &[usize]) -> PauliWord {
        let mut out = PauliWord::identity(qubits.len());
        for (i, &q) in qubits.iter().enumerate() {
            out.set(i, self.get(q));
        }
        out
    }

    /// Places `self` (of length `qubits.len()`) at `qubits` inside `n` qubits.
    pub fn embed(&self, n: usize, qubits: &[usize]) -> PauliWord {
        debug_assert_eq!(self.n, qubits.len());
        let mut out = PauliWord::identity(n);
        for (i, &q) in qubits.iter().enumerate() {
            out.set(q, self.get(i));
        }
        out
    }

    /// Packs the letters at `qubits` into a local index: bit `2i` is the x-bit
    /// and bit `2i+1` the z-bit of `qubits[i]`.
    #[inline]
    pub fn local_index(&self, qubits: &[usize]) -> usize {
        let mut idx = 0usize;
        for (i, &q) in qubits.iter().enumerate() {
            idx |= (self.x_bit(q) as usize) << (2 * i);
            idx |= (self.z_bit(q) as usize) << (2 * i + 1);
        }
        idx
    }

    /// Inverse of [`PauliWord::local_index`]: overwrites the letters at `qubits`.
    #[inline]
    pub fn set_local(&mut self, qubits: &[usize], idx: usize) {
        for (i, &q) in qubits.iter().enumerate() {
            self.set_bits(q, (idx >> (2 * i)) & 1 == 1, (idx >> (2 * i + 1)) & 1 == 1);
        }
    }

    /// Word of length `n` from a local index (see [`PauliWord::local_index`]).
    pub fn from_local_index(n: usize, idx: usize) -> PauliWord {
        let mut w = PauliWord::identity(n);
        w.set_local(&(0..n).collect::<Vec<_>>(), idx);
        w
    }

    /// Number of Y letters (each contributes a phase when writing Y = iXZ).
    pub fn y_count(&self) -> u32 {
        self.x.iter().zip(&self.z).map(|(x, z)| (x & z).count_ones()).sum()
    }

    /// Symplectic product `⟨self, other⟩ ∈ {0,1}`.
    pub fn symplectic(&self, other: &PauliWord) -> bool {
        !self.commutes(other)
    }

    /// Bit-vector sum (product ignoring phase).
    pub fn xor(&self, other: &PauliWord) -> PauliWord {
        self.mul(other).1
    }
}

fn letter_rank(x: bool, z: bool) -> u8 {
    match (x, z) {
        (false, false) => 0,
        (true, false) => 1,
        (true, true) => 2,
        (false, true) => 3,
    }
}

impl Ord for PauliWord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.n.cmp(&other.n).then_with(|| {
            for i in 0..self.x.len() {
                let diff = (self.x[i] ^ other.x[i]) | (self.z[i] ^ other.z[i]);
                if diff != 0 {
                    let q = 64 * i + diff.trailing_zeros() as usize;
                    let a = letter_rank(self.x_bit(q), self.z_bit(q));
                    let b = letter_rank(other.x_bit(q), other.z_bit(q));
                    return a.cmp(&b);
                }
            }
            std::cmp::Ordering::Equal
        })
    }
}

impl PartialOrd for PauliWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", self.get(q).to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `i^phase · word`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    phase: u8,
    word: PauliWord,
}

impl PauliString {
    pub fn new(phase: u8, word: PauliWord) -> Self {
        PauliString { phase: phase % 4, word }
    }

    pub fn identity(n: usize) -> Self {
        PauliString::new(0, PauliWord::identity(n))
    }

    pub fn single(n: usize, q: usize, letter: PauliLetter) -> Self {
        PauliString::new(0, PauliWord::single(n, q, letter))
    }

    /// Hermitian string with sign `+1` (`negative = false`) or `−1`.
    pub fn signed(negative: bool, word: PauliWord) -> Self {
        PauliString::new(if negative { 2 } else { 0 }, word)
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn word(&self) -> &PauliWord {
        &self.word
    }

    pub fn into_word(self) -> PauliWord {
        self.word
    }

    pub fn num_qubits(&self) -> usize {
        self.word.n
    }

    /// Hermitian iff the phase is ±1.
    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    /// For a Hermitian string: true when the sign is −1.
    pub fn is_negative(&self) -> bool {
        self.phase == 2
    }

    pub fn mul_phase(&self, e: u8) -> PauliString {
        PauliString::new(self.phase + e, self.word.clone())
    }

    /// Product with accumulated phase.
    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        if self.num_qubits() != other.num_qubits() {
            return Err(Error::LengthMismatch { left: self.num_qubits(), right: other.num_qubits() });
        }
        let (e, w) = self.word.mul(&other.word);
        Ok(PauliString::new(self.phase + other.phase + e, w))
    }

    /// In-place right multiplication; lengths must match.
    pub fn mul_assign_right(&mut self, other: &PauliString) {
        let (e, w) = self.word.mul(&other.word);
        self.phase = (self.phase + other.phase + e) % 4;
        self.word = w;
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        if self.num_qubits() != other.num_qubits() {
            return Err(Error::LengthMismatch { left: self.num_qubits(), right: other.num_qubits() });
        }
        Ok(self.word.commutes(&other.word))
    }

    pub fn tensor(&self, other: &PauliString) -> PauliString {
        PauliString::new(self.phase + other.phase, self.word.tensor(&other.word))
    }

    pub fn negate(&self) -> PauliString {
        self.mul_phase(2)
    }

    pub fn letters(&self) -> Vec<PauliLetter> {
        self.word.letters()
    }
}

impl std::ops::Mul for &PauliString {
    type Output = PauliString;
    /// Panics on length mismatch; use [`PauliString::mul`] for a checked product.
    fn mul(self, rhs: &PauliString) -> PauliString {
        PauliString::mul(self, rhs).expect("Pauli strings of different lengths")
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["", "i", "-", "-i"][self.phase as usize];
        write!(f, "{prefix}{}", self.word)
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses `[-][i]WORD`, e.g. `-ZII`, `iYX`, `-iY`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (neg, rest) = match s.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (imag, rest) = match rest.strip_prefix('i') {
            Some(r) => (true, r),
            None => (false, rest),
        };
        if rest.is_empty() {
            return Err(Error::Syntax { line: 1, col: 1, msg: format!("empty Pauli word in `{s}`") });
        }
        let mut letters = Vec::with_capacity(rest.len());
        for (i, c) in rest.chars().enumerate() {
            letters.push(PauliLetter::from_char(c).ok_or_else(|| Error::Syntax {
                line: 1,
                col: i + 1,
                msg: format!("invalid Pauli letter `{c}` in `{s}`"),
            })?);
        }
        let phase = (if neg { 2 } else { 0 }) + (if imag { 1 } else { 0 });
        Ok(PauliString::new(phase, PauliWord::from_letters(&letters)))
    }
}

/// Incrementally built, fully reduced GF(2) basis of Pauli strings with sign
/// tracking. Used for independence tests and (for abelian groups) membership
/// with sign.
#[derive(Clone, Debug)]
pub struct PauliGroup {
    n: usize,
    rows: Vec<GroupRow>,
    inserted: usize,
}

#[derive(Clone, Debug)]
struct GroupRow {
    op: PauliString,
    /// (qubit, is_x) of the pivot bit.
    pivot: (usize, bool),
    /// Indices of inserted generators whose product is `op` (up to phase).
    combo: Vec<usize>,
}

/// Outcome of inserting a generator into a [`PauliGroup`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Insertion {
    /// The generator was independent and is now part of the basis.
    Added,
    /// The generator times the listed earlier generators is `i^phase · I`.
    Dependent { witness: Vec<usize>, phase: u8 },
}

fn xor_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            out.push(b[j]);
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    out
}

impl PauliGroup {
    pub fn new(n: usize) -> Self {
        PauliGroup { n, rows: Vec::new(), inserted: 0 }
    }

    /// Builds the group generated by `gens`, ignoring dependent generators.
    pub fn generated_by<'a>(n: usize, gens: impl IntoIterator<Item = &'a PauliString>) -> Self {
        let mut g = PauliGroup::new(n);
        for p in gens {
            g.insert(p.clone());
        }
        g
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn pivot_of(w: &PauliWord) -> Option<(usize, bool)> {
        (0..w.n).find_map(|q| {
            if w.x_bit(q) {
                Some((q, true))
            } else if w.z_bit(q) {
                Some((q, false))
            } else {
                None
            }
        })
    }

    fn has_bit(w: &PauliWord, (q, is_x): (usize, bool)) -> bool {
        if is_x {
            w.x_bit(q)
        } else {
            w.z_bit(q)
        }
    }

    /// Reduces `p` against the basis; returns the residue and the generator
    /// combination used.
    fn reduce(&self, p: &PauliString) -> (PauliString, Vec<usize>) {
        let mut acc = p.clone();
        let mut combo = Vec::new();
        for row in &self.rows {
            if Self::has_bit(acc.word(), row.pivot) {
                acc.mul_assign_right(&row.op);
                combo = xor_sorted(&combo, &row.combo);
            }
        }
        (acc, combo)
    }

    /// Inserts a generator (its index is the number of earlier insertions).
    pub fn insert(&mut self, p: PauliString) -> Insertion {
        let index = self.inserted;
        self.insert_indexed(p, index)
    }

    fn insert_indexed(&mut self, p: PauliString, index: usize) -> Insertion {
        assert_eq!(p.num_qubits(), self.n, "generator length mismatch");
        self.inserted = self.inserted.max(index + 1);
        let (res, combo) = self.reduce(&p);
        match Self::pivot_of(res.word()) {
            None => Insertion::Dependent { witness: combo, phase: res.phase() },
            Some(pivot) => {
                let combo = xor_sorted(&combo, &[index]);
                for row in &mut self.rows {
                    if Self::has_bit(row.op.word(), pivot) {
                        row.op.mul_assign_right(&res);
                        row.combo = xor_sorted(&row.combo, &combo);
                    }
                }
                self.rows.push(GroupRow { op: res, pivot, combo });
                Insertion::Added
            }
        }
    }

    /// For an abelian group of Hermitian generators: `Some(true)` if `p` is in
    /// the group, `Some(false)` if `−p` is, `None` otherwise.
    pub fn membership(&self, p: &PauliString) -> Option<bool> {
        if p.num_qubits() != self.n {
            return None;
        }
        let (res, _) = self.reduce(p);
        if !res.word().is_identity() {
            return None;
        }
        match res.phase() {
            0 => Some(true),
            2 => Some(false),
            _ => None,
        }
    }

    /// True when `p`'s letters lie in the span (ignoring signs).
    pub fn contains_up_to_phase(&self, p: &PauliWord) -> bool {
        self.reduce(&PauliString::new(0, p.clone())).0.word().is_identity()
    }
}

/// True iff no nonempty sub-product of `set` equals `±I` (binary independence).
pub fn independent(set: &[PauliString]) -> bool {
    let Some(first) = set.first() else {
        return true;
    };
    let n = first.num_qubits();
    if set.iter().any(|p| p.num_qubits() != n) {
        return false;
    }
    let mut g = PauliGroup::new(n);
    for (i, p) in set.iter().enumerate() {
        if let Insertion::Dependent { .. } = g.insert_indexed(p.clone(), i) {
            return false;
        }
    }
    true
}

/// Finds a dependent sub-family: indices whose product is `i^phase · I`.
pub fn dependency_witness(set: &[PauliString]) -> Option<(Vec<usize>, u8)> {
    let n = set.first()?.num_qubits();
    let mut g = PauliGroup::new(n);
    for (i, p) in set.iter().enumerate() {
        if let Insertion::Dependent { witness, phase } = g.insert_indexed(p.clone(), i) {
            let mut w = witness;
            w.push(i);
            w.sort_unstable();
            return Some((w, phase));
        }
    }
    None
}
