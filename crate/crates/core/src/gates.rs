//! Gate semantics as generator-image maps (`U X_j U†`, `U Z_j U†`), the
//! built-in gate table, term conjugation, controlled-gate construction,
//! real/imaginary splitting and the T-count lower bound.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::pauli::{PauliLetter, PauliWord};
use crate::ring::{CCoeff, Coeff, RingCoeff};
use crate::sum::{i_minus_z_power, AdditiveOperator, PauliSum, Sum};

/// Local words of gates with at most this many qubits get a precomputed
/// image table (4^arity entries).
const TABLE_MAX_ARITY: usize = 4;

/// Images of a local word: `(local index, coefficient)` pairs.
type LocalImage = Vec<(usize, Coeff)>;

/// Conjugation action of a gate on its `arity` qubits.
#[derive(Clone, Debug)]
pub struct GateSemantics {
    name: String,
    arity: usize,
    /// `(U X_j U†, U Z_j U†)` for each local qubit `j`.
    images: Vec<(AdditiveOperator, AdditiveOperator)>,
    table: Option<Vec<LocalImage>>,
    clifford: bool,
}

impl GateSemantics {
    /// Builds semantics from generator images, checking that conjugation
    /// preserves the commutation relations and that images are valid.
    pub fn new(name: impl Into<String>, images: Vec<(AdditiveOperator, AdditiveOperator)>) -> Result<Self> {
        let name = name.into();
        let arity = images.len();
        let gens: Vec<&AdditiveOperator> = images.iter().flat_map(|(x, z)| [x, z]).collect();
        for g in &gens {
            if g.num_qubits() != arity {
                return Err(Error::LengthMismatch { left: arity, right: g.num_qubits() });
            }
            if !g.is_pauli() && !g.is_valid_additive() {
                return Err(Error::InvalidAdditive(g.to_string()));
            }
        }
        for (i, a) in gens.iter().enumerate() {
            for (j, b) in gens.iter().enumerate().skip(i + 1) {
                // X_j and Z_j anticommute; every other pair commutes.
                let should_commute = !(i / 2 == j / 2);
                let (ca, cb) = (a.to_complex(), b.to_complex());
                let ab = ca.mul(&cb);
                let ba = cb.mul(&ca);
                let ok = if should_commute { ab == ba } else { ab == -&ba };
                if !ok {
                    return Err(Error::Invalid(format!(
                        "gate `{name}`: images {a} and {b} do not preserve (anti)commutation"
                    )));
                }
            }
        }
        Ok(Self::new_unchecked(name, images))
    }

    fn new_unchecked(name: String, images: Vec<(AdditiveOperator, AdditiveOperator)>) -> Self {
        let arity = images.len();
        let mut g = GateSemantics { name, arity, images, table: None, clifford: false };
        if arity <= TABLE_MAX_ARITY {
            let table: Vec<LocalImage> = (0..1usize << (2 * arity))
                .map(|idx| {
                    let w = PauliWord::from_local_index(arity, idx);
                    let all: Vec<usize> = (0..arity).collect();
                    g.image_of_word(&w)
                        .into_terms()
                        .into_iter()
                        .map(|(iw, c)| (iw.local_index(&all), c))
                        .collect()
                })
                .collect();
            g.clifford = table.iter().all(|e| e.len() == 1 && e[0].1.is_unit_sign().is_some());
            g.table = Some(table);
        } else {
            g.clifford = g.images.iter().all(|(x, z)| x.is_pauli() && z.is_pauli());
        }
        g
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn images(&self) -> &[(AdditiveOperator, AdditiveOperator)] {
        &self.images
    }

    /// Image of `X_j` (0-based local qubit).
    pub fn image_x(&self, j: usize) -> &AdditiveOperator {
        &self.images[j].0
    }

    /// Image of `Z_j` (0-based local qubit).
    pub fn image_z(&self, j: usize) -> &AdditiveOperator {
        &self.images[j].1
    }

    /// True when every Pauli word maps to a signed Pauli word.
    pub fn is_clifford(&self) -> bool {
        self.clifford
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Image of a local Pauli word (product of generator images, with
    /// `Y = iXZ` on each qubit).
    pub fn image_of_word(&self, w: &PauliWord) -> AdditiveOperator {
        let mut acc = PauliSum::identity(self.arity);
        for j in 0..self.arity {
            let f = match w.get(j) {
                PauliLetter::I => continue,
                PauliLetter::X => self.images[j].0.to_complex(),
                PauliLetter::Z => self.images[j].1.to_complex(),
                PauliLetter::Y => derive_y_complex(self, j),
            };
            acc = acc.mul(&f);
        }
        acc.to_real().expect("image of a Hermitian word is Hermitian")
    }

    fn local_image(&self, idx: usize) -> std::borrow::Cow<'_, LocalImage> {
        match &self.table {
            Some(t) => std::borrow::Cow::Borrowed(&t[idx]),
            None => {
                let w = PauliWord::from_local_index(self.arity, idx);
                let all: Vec<usize> = (0..self.arity).collect();
                std::borrow::Cow::Owned(
                    self.image_of_word(&w)
                        .into_terms()
                        .into_iter()
                        .map(|(iw, c)| (iw.local_index(&all), c))
                        .collect(),
                )
            }
        }
    }
}

fn derive_y_complex(g: &GateSemantics, j: usize) -> PauliSum {
    g.images[j].0.to_complex().mul(&g.images[j].1.to_complex()).times_i()
}

/// `U Y_j U† = i · (U X_j U†) · (U Z_j U†)`.
pub fn derive_y_action(g: &GateSemantics, j: usize) -> AdditiveOperator {
    derive_y_complex(g, j).to_real().expect("image of Y is Hermitian")
}

/// Counters reported by [`apply_gate_in_place`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ApplyStats {
    /// Summands produced before like terms were combined.
    pub generated: usize,
    /// Summands after combination.
    pub combined: usize,
}

/// Conjugates `term` by gate `g` acting on qubits `at` (0-based).
pub fn apply_gate(term: &AdditiveOperator, g: &GateSemantics, at: &[usize]) -> Result<AdditiveOperator> {
    let mut t = term.clone();
    apply_gate_in_place(&mut t, g, at, usize::MAX)?;
    Ok(t)
}

/// In-place conjugation with a summand cap. The cap error carries position 0;
/// callers that know the statement position rewrite it.
pub fn apply_gate_in_place(
    term: &mut AdditiveOperator,
    g: &GateSemantics,
    at: &[usize],
    cap: usize,
) -> Result<ApplyStats> {
    let n = term.num_qubits();
    if at.len() != g.arity {
        return Err(Error::Arity { gate: g.name.clone(), expected: g.arity, got: at.len() });
    }
    for (i, &q) in at.iter().enumerate() {
        if q >= n {
            return Err(Error::IndexOutOfRange { index: q + 1, qubits: n });
        }
        if at[..i].contains(&q) {
            return Err(Error::RepeatedQubit(q + 1));
        }
    }
    if g.clifford {
        if let Some(table) = &g.table {
            // Bijective on words: rewrite in place, re-sort only if needed.
            let old = std::mem::replace(term, AdditiveOperator::zero(n));
            let mut terms = old.into_terms();
            for (w, c) in terms.iter_mut() {
                let (idx, s) = table[w.local_index(at)][0];
                w.set_local(at, idx);
                if s.is_unit_sign() == Some(false) {
                    *c = -*c;
                }
            }
            let len = terms.len();
            if len > 1 {
                terms.sort_by(|a, b| a.0.cmp(&b.0));
            }
            *term = Sum::from_sorted_unchecked(n, terms);
            return Ok(ApplyStats { generated: len, combined: len });
        }
    }
    let mut out: Vec<(PauliWord, Coeff)> = Vec::with_capacity(term.len() * 2);
    for (w, c) in term.iter() {
        let img = g.local_image(w.local_index(at));
        for (idx, ic) in img.iter() {
            let mut w2 = w.clone();
            w2.set_local(at, *idx);
            out.push((w2, *c * *ic));
        }
        if out.len() > cap {
            return Err(Error::SummandCap { cap, position: 0, gate: g.name.clone() });
        }
    }
    let generated = out.len();
    Sum::canonicalize(&mut out);
    let combined = out.len();
    *term = Sum::from_sorted_unchecked(n, out);
    Ok(ApplyStats { generated, combined })
}

fn op(s: &str) -> AdditiveOperator {
    AdditiveOperator::pauli(s)
}

fn t_image(sign_y: bool) -> AdditiveOperator {
    let c = Coeff::Exact(RingCoeff::INV_SQRT2);
    Sum::from_terms(
        1,
        [
            (PauliWord::single(1, 0, PauliLetter::X), c),
            (PauliWord::single(1, 0, PauliLetter::Y), if sign_y { c } else { -c }),
        ],
    )
}

/// Names accepted by [`builtin_semantics`] (canonical upper-case spelling).
pub const BUILTIN_GATES: &[&str] = &["I", "X", "Y", "Z", "H", "S", "SDG", "T", "TDG", "CNOT", "CZ", "SWAP"];

fn build_builtins() -> HashMap<&'static str, Arc<GateSemantics>> {
    let one = |name: &str, x: &str, z: &str| (name.to_string(), vec![(op(x), op(z))]);
    let mut defs: Vec<(String, Vec<(AdditiveOperator, AdditiveOperator)>)> = vec![
        one("I", "X", "Z"),
        one("X", "X", "-Z"),
        one("Y", "-X", "-Z"),
        one("Z", "-X", "Z"),
        one("H", "Z", "X"),
        one("S", "Y", "Z"),
        one("SDG", "-Y", "Z"),
        ("T".into(), vec![(t_image(true), op("Z"))]),
        ("TDG".into(), vec![(t_image(false), op("Z"))]),
        ("CNOT".into(), vec![(op("XX"), op("ZI")), (op("IX"), op("ZZ"))]),
        ("CZ".into(), vec![(op("XZ"), op("ZI")), (op("ZX"), op("IZ"))]),
        ("SWAP".into(), vec![(op("IX"), op("IZ")), (op("XI"), op("ZI"))]),
    ];
    let mut map = HashMap::new();
    for (name, images) in defs.drain(..) {
        let key: &'static str = BUILTIN_GATES.iter().find(|g| **g == name).expect("builtin listed");
        map.insert(key, Arc::new(GateSemantics::new_unchecked(name, images)));
    }
    map
}

/// Canonical spelling of a gate name (case-insensitive, `T†` aliases).
pub fn canonical_gate_name(name: &str) -> String {
    let up = name.to_ascii_uppercase();
    match up.as_str() {
        "T†" | "TDAG" | "T_DG" => "TDG".into(),
        "S†" | "SDAG" | "S_DG" => "SDG".into(),
        "CX" => "CNOT".into(),
        "ID" => "I".into(),
        _ => up,
    }
}

/// Semantics of a built-in gate (Tables of one- and two-qubit gates).
pub fn builtin_semantics(name: &str) -> Result<Arc<GateSemantics>> {
    static TABLE: OnceLock<HashMap<&'static str, Arc<GateSemantics>>> = OnceLock::new();
    let table = TABLE.get_or_init(build_builtins);
    table
        .get(canonical_gate_name(name).as_str())
        .cloned()
        .ok_or_else(|| Error::UnknownGate(name.to_string()))
}

/// Inverse of a built-in gate name.
pub fn inverse_builtin_name(name: &str) -> Option<&'static str> {
    Some(match canonical_gate_name(name).as_str() {
        "I" => "I",
        "X" => "X",
        "Y" => "Y",
        "Z" => "Z",
        "H" => "H",
        "S" => "SDG",
        "SDG" => "S",
        "T" => "TDG",
        "TDG" => "T",
        "CNOT" => "CNOT",
        "CZ" => "CZ",
        "SWAP" => "SWAP",
        _ => return None,
    })
}

/// Minimal `s` such that `2^(s/2)·c ∈ ℤ[√2]` for every coefficient `c` of
/// every generator image; a lower bound on the T-count of any Clifford+T
/// implementation.
pub fn tcount_lower_bound(g: &GateSemantics) -> Result<u32> {
    let mut best = 0;
    for (x, z) in &g.images {
        for m in [x, z] {
            let s = m
                .max_denominator_exponent()
                .ok_or_else(|| Error::OutsideRing(m.to_string()))?;
            best = best.max(s);
        }
    }
    Ok(best)
}

/// Splits an exact Pauli expansion of a unitary into `Re(U) = ½(U + U†)` and
/// `Im(U) = (U − U†)/2i`, verifying `Re² + Im² = I` and `Re·Im = Im·Re`.
pub fn re_im_decompose(u: &PauliSum) -> Result<(AdditiveOperator, AdditiveOperator)> {
    let re = u.real_part();
    let im = u.imag_part();
    let n = u.num_qubits();
    let (cre, cim) = (re.to_complex(), im.to_complex());
    let sum_sq = &cre.mul(&cre) + &cim.mul(&cim);
    if sum_sq != PauliSum::identity(n) {
        return Err(Error::Invalid(format!("Re² + Im² ≠ I for {u}: not unitary")));
    }
    if cre.mul(&cim) != cim.mul(&cre) {
        return Err(Error::Invalid(format!("Re and Im do not commute for {u}: not unitary")));
    }
    Ok((re, im))
}

/// Checks that `U = Re + i·Im` conjugates every generator as `g` says.
fn re_im_consistent(g: &GateSemantics, re: &AdditiveOperator, im: &AdditiveOperator) -> bool {
    let u = &re.to_complex() + &im.to_complex().times_i();
    let ud = u.adjoint();
    (0..g.arity).all(|j| {
        [(PauliLetter::X, &g.images[j].0), (PauliLetter::Z, &g.images[j].1)].iter().all(|(l, img)| {
            let p = AdditiveOperator::single_letter(g.arity, j, *l).to_complex();
            u.mul(&p).mul(&ud) == img.to_complex()
        })
    })
}

/// Operator `f_0 ⊗ f_1 ⊗ …` from per-qubit factors.
fn tensor_all(factors: &[AdditiveOperator]) -> AdditiveOperator {
    factors.iter().fold(AdditiveOperator::identity(0), |acc, f| acc.tensor(f))
}

fn letter1(l: PauliLetter) -> AdditiveOperator {
    AdditiveOperator::single_letter(1, 0, l)
}

/// Arrow type of `control^k-U` (controls on the first `k` qubits) from the
/// semantics of `U` and its real/imaginary parts.
pub fn controlled_arrow_type(
    g: &GateSemantics,
    re: &AdditiveOperator,
    im: &AdditiveOperator,
    k: usize,
) -> Result<GateSemantics> {
    if k == 0 {
        return Ok(g.clone());
    }
    let n = g.arity;
    if re.num_qubits() != n || im.num_qubits() != n {
        return Err(Error::LengthMismatch { left: n, right: re.num_qubits() });
    }
    if !re_im_consistent(g, re, im) {
        return Err(Error::Invalid(format!("Re/Im parts do not reproduce the action of `{}`", g.name)));
    }
    let total = k + n;
    let i_minus_z = i_minus_z_power(1);
    let id1 = AdditiveOperator::identity(1);
    let coeff_ctrl = Coeff::Exact(RingCoeff::pow2_inv((k - 1) as u32));
    let mut images = Vec::with_capacity(total);
    for c in 0..k {
        let ctrl_factors = |l: PauliLetter| -> Vec<AdditiveOperator> {
            (0..k).map(|p| if p == c { letter1(l) } else { i_minus_z.clone() }).collect()
        };
        let x_c = AdditiveOperator::single_letter(total, c, PauliLetter::X);
        let a = tensor_all(&ctrl_factors(PauliLetter::X)).tensor(&AdditiveOperator::identity(n));
        let b = tensor_all(&ctrl_factors(PauliLetter::X)).tensor(re);
        let y = tensor_all(&ctrl_factors(PauliLetter::Y)).tensor(im);
        let corr = &(&b + &y) - &a;
        let img_x = &x_c + &corr.scale(coeff_ctrl);
        let img_z = AdditiveOperator::single_letter(total, c, PauliLetter::Z);
        images.push((img_x, img_z));
    }
    let proj = i_minus_z_power(k).scale(Coeff::Exact(RingCoeff::pow2_inv(k as u32)));
    let id_k = tensor_all(&vec![id1; k]);
    for j in 0..n {
        let mut pair = Vec::with_capacity(2);
        for (l, v) in [(PauliLetter::X, &g.images[j].0), (PauliLetter::Z, &g.images[j].1)] {
            let p = AdditiveOperator::single_letter(n, j, l);
            let lhs = id_k.tensor(&p);
            let diff = &p - v;
            pair.push(&lhs - &proj.tensor(&diff));
        }
        let z = pair.pop().expect("two images");
        let x = pair.pop().expect("two images");
        images.push((x, z));
    }
    let name = format!("C{}{}", if k == 1 { String::new() } else { k.to_string() }, g.name);
    GateSemantics::new(name, images)
}

/// Additive type of `control^k-M`: `I − 2^(−k) (I−Z)^⊗k ⊗ (I − M)`.
pub fn controlled_additive_type(m: &AdditiveOperator, k: usize) -> Result<AdditiveOperator> {
    if !m.is_valid_additive() {
        return Err(Error::InvalidAdditive(m.to_string()));
    }
    if k == 0 {
        return Ok(m.clone());
    }
    let n = m.num_qubits();
    let id = AdditiveOperator::identity(k + n);
    let inner = &AdditiveOperator::identity(n) - m;
    let corr = i_minus_z_power(k).tensor(&inner).scale(Coeff::Exact(RingCoeff::pow2_inv(k as u32)));
    Ok(&id - &corr)
}

/// Semantics of `control^k-Z` on `k + 1` qubits (controls first).
pub fn multi_controlled_z(k: usize) -> Result<GateSemantics> {
    let z = builtin_semantics("Z")?;
    let re = AdditiveOperator::pauli("Z");
    let im = AdditiveOperator::zero(1);
    controlled_arrow_type(&z, &re, &im, k)
}

/// Composition: semantics of `first` followed by `second` (same arity).
pub fn compose(first: &GateSemantics, second: &GateSemantics) -> Result<GateSemantics> {
    if first.arity != second.arity {
        return Err(Error::LengthMismatch { left: first.arity, right: second.arity });
    }
    let all: Vec<usize> = (0..first.arity).collect();
    let images = first
        .images
        .iter()
        .map(|(x, z)| Ok((apply_gate(x, second, &all)?, apply_gate(z, second, &all)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(GateSemantics::new_unchecked(format!("{};{}", first.name, second.name), images))
}

/// True when `g²` fixes every generator, i.e. `U² ∝ I`.
pub fn squares_to_identity(g: &GateSemantics) -> Result<bool> {
    let sq = compose(g, g)?;
    Ok((0..g.arity).all(|j| {
        sq.images[j].0 == AdditiveOperator::single_letter(g.arity, j, PauliLetter::X)
            && sq.images[j].1 == AdditiveOperator::single_letter(g.arity, j, PauliLetter::Z)
    }))
}

/// Complex expansion helper: `Σ c_w w` from `(word, re, im)` triples.
pub fn complex_sum(n: usize, terms: impl IntoIterator<Item = (PauliWord, Coeff, Coeff)>) -> PauliSum {
    Sum::from_terms(n, terms.into_iter().map(|(w, re, im)| (w, CCoeff { re, im })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sum::additive;

    #[test]
    fn hadamard_rows() {
        let h = builtin_semantics("h").unwrap();
        assert_eq!(h.image_x(0), &op("Z"));
        assert_eq!(h.image_z(0), &op("X"));
        assert_eq!(derive_y_action(&h, 0), op("-Y"));
    }

    #[test]
    fn t_rows() {
        let t = builtin_semantics("T").unwrap();
        let r = RingCoeff::INV_SQRT2;
        assert_eq!(t.image_x(0), &additive(1, &[(r, "X"), (r, "Y")]));
        assert_eq!(derive_y_action(&t, 0), additive(1, &[(r, "Y"), (r, "-X")]));
        assert_eq!(derive_y_action(&builtin_semantics("I").unwrap(), 0), op("Y"));
    }

    #[test]
    fn cnot_rows_and_application() {
        let c = builtin_semantics("CNOT").unwrap();
        assert_eq!(c.image_x(0), &op("XX"));
        assert_eq!(c.image_x(1), &op("IX"));
        assert_eq!(c.image_z(0), &op("ZI"));
        assert_eq!(c.image_z(1), &op("ZZ"));
        assert_eq!(apply_gate(&op("ZYX"), &c, &[0, 2]).unwrap(), op("ZYX"));
        let h = builtin_semantics("H").unwrap();
        assert_eq!(apply_gate(&op("IZ"), &h, &[0]).unwrap(), op("IZ"));
    }

    #[test]
    fn t_twice_takes_x_to_y() {
        let t = builtin_semantics("T").unwrap();
        let once = apply_gate(&op("X"), &t, &[0]).unwrap();
        assert_eq!(apply_gate(&once, &t, &[0]).unwrap(), op("Y"));
    }

    #[test]
    fn tcount_examples() {
        assert_eq!(tcount_lower_bound(&builtin_semantics("CNOT").unwrap()).unwrap(), 0);
        assert_eq!(tcount_lower_bound(&builtin_semantics("T").unwrap()).unwrap(), 1);
        for k in 2..=6 {
            assert_eq!(tcount_lower_bound(&multi_controlled_z(k).unwrap()).unwrap() as usize, 2 * k - 2);
        }
    }

    #[test]
    fn control_z_matches_cz() {
        let cz = multi_controlled_z(1).unwrap();
        let table = builtin_semantics("CZ").unwrap();
        assert_eq!(cz.images(), table.images());
    }

    #[test]
    fn controlled_s_images() {
        let s = builtin_semantics("S").unwrap();
        let h = RingCoeff::HALF;
        let re = additive(1, &[(h, "I"), (h, "Z")]);
        let im = additive(1, &[(h, "I"), (h, "-Z")]);
        let cs = controlled_arrow_type(&s, &re, &im, 1).unwrap();
        assert_eq!(cs.image_x(1), &additive(2, &[(h, "IX"), (h, "IY"), (h, "ZX"), (h, "-ZY")]));
        assert_eq!(cs.image_x(0), &additive(2, &[(h, "XI"), (h, "YI"), (h, "XZ"), (h, "-YZ")]));
        assert_eq!(cs.image_z(0), &op("ZI"));
        assert_eq!(cs.image_z(1), &op("IZ"));
    }

    #[test]
    fn controlled_additive_examples() {
        let h = RingCoeff::HALF;
        assert_eq!(
            controlled_additive_type(&op("Z"), 1).unwrap(),
            additive(2, &[(h, "II"), (h, "ZI"), (h, "IZ"), (h, "-ZZ")])
        );
        assert_eq!(controlled_additive_type(&op("X"), 0).unwrap(), op("X"));
    }

    #[test]
    fn hermiticity_by_squaring() {
        assert!(squares_to_identity(&builtin_semantics("H").unwrap()).unwrap());
        assert!(!squares_to_identity(&builtin_semantics("S").unwrap()).unwrap());
        assert!(squares_to_identity(&builtin_semantics("Z").unwrap()).unwrap());
    }

    #[test]
    fn s_real_imaginary_split() {
        let h = Coeff::Exact(RingCoeff::HALF);
        let u = complex_sum(
            1,
            [
                (PauliWord::identity(1), h, h),
                (PauliWord::single(1, 0, PauliLetter::Z), h, -h),
            ],
        );
        let (re, im) = re_im_decompose(&u).unwrap();
        assert_eq!(re, additive(1, &[(RingCoeff::HALF, "I"), (RingCoeff::HALF, "Z")]));
        assert_eq!(im, additive(1, &[(RingCoeff::HALF, "I"), (RingCoeff::HALF, "-Z")]));
    }
}
