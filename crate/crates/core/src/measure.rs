//! Post-measurement types for z-basis measurement of one qubit.
//!
//! Stabilizer branches use the pivot algorithm (random outcome when some
//! term has an X or Y on the measured qubit, deterministic when `±Z_q` is in
//! the group, under-determined otherwise). Additive branches are handled by
//! the two-qubit theorem and by the I/Z-term lemma; every other shape is
//! reported as unsupported.

use crate::error::{Error, Result};
use crate::pauli::{Insertion, PauliGroup, PauliLetter, PauliString, PauliWord};
use crate::ring::{Coeff, RingCoeff};
use crate::sum::AdditiveOperator;
use crate::types::{normal_form, normalize, operators_commute, signed_z, Branch};

/// One possible outcome of measuring a qubit.
#[derive(Clone, Debug)]
pub struct OutcomeBranch {
    /// `+1` for the `|0⟩` (eigenvalue +1 of Z) outcome, `−1` otherwise.
    pub sign: i8,
    pub branch: Branch,
    /// Outcome probability when the type determines it.
    pub probability: Option<Coeff>,
}

/// All outcomes of one measurement of one source branch, `+` first.
#[derive(Clone, Debug)]
pub struct MeasurementOutcome {
    /// Measured qubit (0-based).
    pub qubit: usize,
    pub branches: Vec<OutcomeBranch>,
}

impl MeasurementOutcome {
    pub fn probability(&self, sign: i8) -> Option<Coeff> {
        match self.branches.iter().find(|b| b.sign == sign) {
            Some(b) => b.probability,
            None => Some(Coeff::ZERO),
        }
    }

    /// True when some retained coefficient or probability is inexact.
    pub fn is_exact(&self) -> bool {
        self.branches
            .iter()
            .all(|b| b.branch.is_exact() && b.probability.map(|p| p.is_exact()).unwrap_or(true))
    }
}

/// Components of `M = I⊗N0 + X⊗N1 + Y⊗N2 + Z⊗N3` relative to one qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitDecomposition {
    pub qubit: usize,
    pub n: [AdditiveOperator; 4],
}

impl QubitDecomposition {
    /// Splits `m` on qubit `q` (0-based); the parts act on the other qubits.
    pub fn new(m: &AdditiveOperator, q: usize) -> Self {
        let total = m.num_qubits();
        let rest: Vec<usize> = (0..total).filter(|&p| p != q).collect();
        let mut parts: [Vec<(PauliWord, Coeff)>; 4] = Default::default();
        for (w, c) in m.iter() {
            let slot = match w.get(q) {
                PauliLetter::I => 0,
                PauliLetter::X => 1,
                PauliLetter::Y => 2,
                PauliLetter::Z => 3,
            };
            parts[slot].push((w.restrict(&rest), *c));
        }
        let n = parts.map(|v| AdditiveOperator::from_terms(total - 1, v));
        QubitDecomposition { qubit: q, n }
    }

    /// Reassembles `M`.
    pub fn recompose(&self) -> AdditiveOperator {
        let total = self.n[0].num_qubits() + 1;
        let rest: Vec<usize> = (0..total).filter(|&p| p != self.qubit).collect();
        let mut acc = AdditiveOperator::zero(total);
        for (slot, letter) in [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z].into_iter().enumerate() {
            let part = AdditiveOperator::from_terms(
                total,
                self.n[slot].iter().map(|(w, c)| {
                    let mut full = w.embed(total, &rest);
                    full.set(self.qubit, letter);
                    (full, *c)
                }),
            );
            acc = &acc + &part;
        }
        acc
    }

    /// Coefficient of `Z_q ⊗ I` (the `c_j` of the two-qubit theorem).
    pub fn z_identity_coefficient(&self) -> Coeff {
        self.n[3].coefficient(&PauliWord::identity(self.n[3].num_qubits()))
    }
}

fn check_qubit(n: usize, q: usize) -> Result<()> {
    if q >= n {
        return Err(Error::IndexOutOfRange { index: q + 1, qubits: n });
    }
    Ok(())
}

fn with_z(n: usize, q: usize, negative: bool, rest: &[PauliString]) -> Result<Branch> {
    let mut terms = vec![PauliString::signed(negative, PauliWord::single(n, q, PauliLetter::Z))];
    terms.extend(rest.iter().cloned());
    normalize(&Branch::from_paulis(n, &terms))
}

/// Stabilizer measurement of qubit `q` (0-based); impossible outcomes pruned.
pub fn measure_stabilizer(b: &Branch, q: usize) -> Result<MeasurementOutcome> {
    measure_stabilizer_with(b, q, false)
}

/// Stabilizer measurement with optional retention of zero-probability
/// outcomes.
pub fn measure_stabilizer_with(b: &Branch, q: usize, keep_impossible: bool) -> Result<MeasurementOutcome> {
    let n = b.num_qubits();
    check_qubit(n, q)?;
    let nf = normal_form(b)?;
    let mut terms = nf.terms;
    let half = Some(Coeff::Exact(RingCoeff::HALF));
    if let Some(j) = terms.iter().position(|p| p.word().x_bit(q)) {
        let pivot = terms.remove(j);
        for t in terms.iter_mut() {
            if t.word().x_bit(q) {
                t.mul_assign_right(&pivot);
            }
        }
        return Ok(MeasurementOutcome {
            qubit: q,
            branches: vec![
                OutcomeBranch { sign: 1, branch: with_z(n, q, false, &terms)?, probability: half },
                OutcomeBranch { sign: -1, branch: with_z(n, q, true, &terms)?, probability: half },
            ],
        });
    }
    let group = PauliGroup::generated_by(n, &terms);
    let zq = PauliString::single(n, q, PauliLetter::Z);
    match group.membership(&zq) {
        Some(positive) => {
            let sign: i8 = if positive { 1 } else { -1 };
            // In normal form the row pivoting on q is exactly ±Z_q.
            let rest: Vec<PauliString> = terms.iter().filter(|t| t.word() != zq.word()).cloned().collect();
            let mut branches = vec![OutcomeBranch {
                sign,
                branch: with_z(n, q, !positive, &rest)?,
                probability: Some(Coeff::ONE),
            }];
            if keep_impossible {
                let mut impossible = vec![PauliString::signed(positive, zq.word().clone())];
                impossible.extend(rest.iter().cloned());
                branches.push(OutcomeBranch {
                    sign: -sign,
                    branch: Branch::from_paulis(n, &impossible),
                    probability: Some(Coeff::ZERO),
                });
                branches.sort_by_key(|o| -o.sign);
            }
            Ok(MeasurementOutcome { qubit: q, branches })
        }
        None => Ok(MeasurementOutcome {
            qubit: q,
            branches: vec![
                OutcomeBranch { sign: 1, branch: with_z(n, q, false, &terms)?, probability: None },
                OutcomeBranch { sign: -1, branch: with_z(n, q, true, &terms)?, probability: None },
            ],
        }),
    }
}

/// Outcome probabilities of measuring a one-qubit additive type
/// `aX + bY + cZ`: `((1+c)/2, (1−c)/2)`.
pub fn meas_prob_1q(m: &AdditiveOperator) -> Result<(Coeff, Coeff)> {
    if m.num_qubits() != 1 || !m.is_valid_additive() {
        return Err(Error::InvalidAdditive(m.to_string()));
    }
    if !m.coefficient(&PauliWord::identity(1)).is_zero() {
        return Err(Error::InvalidAdditive(format!("{m} has an identity component")));
    }
    let c = m.coefficient(&PauliWord::single(1, 0, PauliLetter::Z));
    let half = Coeff::Exact(RingCoeff::HALF);
    Ok(((Coeff::ONE + c) * half, (Coeff::ONE - c) * half))
}

/// `(N0 + N3, N0 − N3)` for `M = I⊗N0 + Z⊗N3` relative to qubit `q`.
pub fn measure_additive_iz_term(m: &AdditiveOperator, q: usize) -> Result<(AdditiveOperator, AdditiveOperator)> {
    check_qubit(m.num_qubits(), q)?;
    let d = QubitDecomposition::new(m, q);
    if !d.n[1].is_empty() || !d.n[2].is_empty() {
        return Err(Error::Unsupported(format!(
            "term {m} has an X/Y component on measured qubit {}",
            q + 1
        )));
    }
    Ok((&d.n[0] + &d.n[3], &d.n[0] - &d.n[3]))
}

fn swap_qubits(m: &AdditiveOperator) -> AdditiveOperator {
    m.map_words(|w| (w.restrict(&[1, 0]), Coeff::ONE))
}

/// Two-qubit additive measurement of qubit `q ∈ {0, 1}` for the branch
/// `M1 ∩ M2`.
pub fn measure_additive_2q(
    m1: &AdditiveOperator,
    m2: &AdditiveOperator,
    q: usize,
    keep_impossible: bool,
) -> Result<MeasurementOutcome> {
    for m in [m1, m2] {
        if m.num_qubits() != 2 {
            return Err(Error::Invalid(format!("{m} is not a two-qubit type")));
        }
        if !m.is_valid_additive() {
            return Err(Error::InvalidAdditive(m.to_string()));
        }
    }
    check_qubit(2, q)?;
    if q == 1 {
        let mut out = measure_additive_2q(&swap_qubits(m1), &swap_qubits(m2), 0, keep_impossible)?;
        for ob in out.branches.iter_mut() {
            let terms = ob.branch.terms().iter().map(swap_qubits).collect();
            ob.branch = Branch::new(2, terms);
        }
        out.qubit = 1;
        return Ok(out);
    }
    if !operators_commute(m1, m2) {
        return Err(Error::Uninhabited { a: m1.to_string(), b: m2.to_string() });
    }
    if m1 == m2 || *m1 == -m2 {
        return Err(Error::Invalid(format!("{m1} and {m2} are not independent")));
    }
    let m3 = m1
        .mul_real(m2)
        .ok_or_else(|| Error::Internal("product of commuting Hermitian types is not Hermitian".into()))?;
    let decs = [QubitDecomposition::new(m1, 0), QubitDecomposition::new(m2, 0), QubitDecomposition::new(&m3, 0)];
    let c_sum = decs.iter().fold(Coeff::ZERO, |acc, d| acc + d.z_identity_coefficient());
    let half = Coeff::Exact(RingCoeff::HALF);
    let p_plus = (Coeff::ONE + c_sum) * half;
    let p_minus = (Coeff::ONE - c_sum) * half;
    for p in [p_plus, p_minus] {
        let v = p.to_f64();
        if !(-1e-12..=1.0 + 1e-12).contains(&v) {
            return Err(Error::Internal(format!("outcome probability {p} outside [0, 1]")));
        }
    }
    let mut branches = Vec::new();
    for (sign, p) in [(1i8, p_plus), (-1i8, p_minus)] {
        if p.is_zero() {
            if keep_impossible {
                branches.push(OutcomeBranch {
                    sign,
                    branch: Branch::new(2, vec![signed_z(2, 0, sign < 0)]),
                    probability: Some(Coeff::ZERO),
                });
            }
            continue;
        }
        let mut acc = AdditiveOperator::zero(1);
        for d in &decs {
            let c_i = AdditiveOperator::scalar(1, d.z_identity_coefficient());
            let n3 = &d.n[3] - &c_i;
            let signed = if sign > 0 { n3 } else { -&n3 };
            acc = &(&acc + &d.n[0]) + &signed;
        }
        let scale = (Coeff::Exact(RingCoeff::from_int(2)) * p)
            .inv()
            .ok_or_else(|| Error::Internal("zero normalisation".into()))?;
        let m_s = acc.scale(scale);
        let mut terms = vec![signed_z(2, 0, sign < 0)];
        if !(m_s.len() == 1 && m_s.terms()[0].0.is_identity() && m_s.terms()[0].1.is_one()) {
            terms.push(m_s.embed(2, &[1]));
        }
        branches.push(OutcomeBranch { sign, branch: Branch::new(2, terms), probability: Some(p) });
    }
    Ok(MeasurementOutcome { qubit: 0, branches })
}

/// Measurement via the I/Z-term lemma: every term must be free of X/Y on
/// the measured qubit.
/// Drops Pauli terms implied by earlier ones. `None` when the Pauli terms
/// contradict each other, i.e. the outcome that produced them is impossible.
fn prune_pauli_terms(n: usize, terms: Vec<AdditiveOperator>) -> Option<Vec<AdditiveOperator>> {
    let mut group = PauliGroup::new(n);
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        if let Some(p) = t.as_pauli() {
            match group.insert(p) {
                Insertion::Added => {}
                Insertion::Dependent { phase: 0, .. } => continue,
                Insertion::Dependent { .. } => return None,
            }
        }
        out.push(t);
    }
    Some(out)
}

fn measure_iz_branch(b: &Branch, q: usize, keep_impossible: bool) -> Result<MeasurementOutcome> {
    let n = b.num_qubits();
    let rest: Vec<usize> = (0..n).filter(|&p| p != q).collect();
    let mut per_sign: Vec<(i8, Option<Vec<AdditiveOperator>>)> = Vec::new();
    let split = b
        .terms()
        .iter()
        .map(|t| measure_additive_iz_term(t, q))
        .collect::<Result<Vec<_>>>()?;
    for sign in [1i8, -1] {
        let mut terms = vec![signed_z(n, q, sign < 0)];
        let mut possible = true;
        for (plus, minus) in &split {
            let part = if sign > 0 { plus } else { minus };
            let id = PauliWord::identity(n - 1);
            if part.len() == 1 && part.terms()[0].0 == id {
                let c = part.terms()[0].1;
                if c.is_one() {
                    continue;
                }
                if (-c).is_one() {
                    possible = false;
                    break;
                }
            }
            terms.push(part.embed(n, &rest));
        }
        // Terms from different source terms may coincide or clash.
        per_sign.push((sign, if possible { prune_pauli_terms(n, terms) } else { None }));
    }
    let possible_count = per_sign.iter().filter(|(_, t)| t.is_some()).count();
    if possible_count == 0 {
        return Err(Error::Internal("both measurement outcomes are impossible".into()));
    }
    let mut branches = Vec::new();
    for (sign, terms) in per_sign {
        match terms {
            Some(t) => {
                let mut br = Branch::new(n, t);
                if br.is_gottesman() {
                    br = normalize(&br)?;
                }
                let probability = if possible_count == 1 { Some(Coeff::ONE) } else { None };
                branches.push(OutcomeBranch { sign, branch: br, probability });
            }
            None if keep_impossible => branches.push(OutcomeBranch {
                sign,
                branch: Branch::new(n, vec![signed_z(n, q, sign < 0)]),
                probability: Some(Coeff::ZERO),
            }),
            None => {}
        }
    }
    Ok(MeasurementOutcome { qubit: q, branches })
}

/// Measurement of a qubit carried by a single one-qubit factor `M_q` with
/// every other term trivial on `q`: the one-qubit probability rule applies
/// and `M_q` is replaced by `±Z_q`. `None` when the branch has another shape.
fn measure_local_factor(b: &Branch, q: usize, keep_impossible: bool) -> Result<Option<MeasurementOutcome>> {
    let n = b.num_qubits();
    let touching: Vec<usize> = (0..b.terms().len())
        .filter(|&i| b.terms()[i].iter().any(|(w, _)| w.get(q) != PauliLetter::I))
        .collect();
    let [i] = touching[..] else { return Ok(None) };
    let factor = &b.terms()[i];
    if factor.support() != [q] {
        return Ok(None);
    }
    let (p_plus, p_minus) = meas_prob_1q(&factor.restrict(&[q]))?;
    let mut branches = Vec::new();
    for (sign, p) in [(1i8, p_plus), (-1, p_minus)] {
        if p.is_zero() && !keep_impossible {
            continue;
        }
        let mut terms = b.terms().to_vec();
        terms[i] = signed_z(n, q, sign < 0);
        branches.push(OutcomeBranch { sign, branch: Branch::new(n, terms), probability: Some(p) });
    }
    Ok(Some(MeasurementOutcome { qubit: q, branches }))
}

/// Dispatches a measurement of qubit `q` on one branch to the supported
/// algorithm for its shape.
pub fn measure_branch(b: &Branch, q: usize, keep_impossible: bool) -> Result<MeasurementOutcome> {
    check_qubit(b.num_qubits(), q)?;
    if b.is_gottesman() {
        return measure_stabilizer_with(b, q, keep_impossible);
    }
    if b.num_qubits() == 2 && b.terms().len() == 2 {
        return measure_additive_2q(&b.terms()[0], &b.terms()[1], q, keep_impossible);
    }
    let iz_ok = b.terms().iter().all(|t| t.iter().all(|(w, _)| !w.x_bit(q)));
    if iz_ok {
        return measure_iz_branch(b, q, keep_impossible);
    }
    if let Some(o) = measure_local_factor(b, q, keep_impossible)? {
        return Ok(o);
    }
    Err(Error::Unsupported(format!(
        "measurement of qubit {} for additive type `{b}` (only two-qubit, I/Z-term and local-factor shapes are covered)",
        q + 1
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sum::additive;
    use crate::types::{types_equal, QType};

    fn br(w: &[&str]) -> Branch {
        Branch::paulis(w)
    }

    fn as_type(o: &MeasurementOutcome) -> QType {
        QType::new(o.branches.iter().map(|b| b.branch.clone()).collect()).unwrap()
    }

    #[test]
    fn measuring_x_is_random() {
        let o = measure_stabilizer(&br(&["X"]), 0).unwrap();
        assert!(types_equal(&as_type(&o), &QType::new(vec![br(&["Z"]), br(&["-Z"])]).unwrap()));
        assert_eq!(o.probability(1), Some(Coeff::Exact(RingCoeff::HALF)));
    }

    #[test]
    fn ghz_measurement() {
        let o = measure_stabilizer(&br(&["XXX", "ZZI", "IZZ"]), 0).unwrap();
        let want = QType::new(vec![br(&["ZII", "IZI", "IIZ"]), br(&["-ZII", "-IZI", "-IIZ"])]).unwrap();
        assert!(types_equal(&as_type(&o), &want));
    }

    #[test]
    fn bell_partner_unconstrained() {
        let o = measure_stabilizer(&br(&["XX"]), 0).unwrap();
        let want = QType::new(vec![br(&["ZI"]), br(&["-ZI"])]).unwrap();
        assert!(types_equal(&as_type(&o), &want));
    }

    #[test]
    fn deterministic_outcome() {
        let o = measure_stabilizer(&br(&["-ZI", "IX"]), 0).unwrap();
        assert_eq!(o.branches.len(), 1);
        assert_eq!(o.branches[0].sign, -1);
        assert_eq!(o.probability(-1), Some(Coeff::ONE));
        let kept = measure_stabilizer_with(&br(&["-ZI", "IX"]), 0, true).unwrap();
        assert_eq!(kept.branches.len(), 2);
        assert_eq!(kept.probability(1), Some(Coeff::ZERO));
    }

    #[test]
    fn one_qubit_probabilities() {
        let (p, m) = meas_prob_1q(&AdditiveOperator::pauli("Z")).unwrap();
        assert_eq!((p, m), (Coeff::ONE, Coeff::ZERO));
        let (p, _) = meas_prob_1q(&AdditiveOperator::pauli("X")).unwrap();
        assert_eq!(p, Coeff::Exact(RingCoeff::HALF));
    }

    #[test]
    fn bell_additive_measurement() {
        let o = measure_additive_2q(&AdditiveOperator::pauli("XX"), &AdditiveOperator::pauli("ZZ"), 0, false).unwrap();
        let want = QType::new(vec![br(&["ZI", "IZ"]), br(&["-ZI", "-IZ"])]).unwrap();
        assert!(types_equal(&as_type(&o), &want));
        assert_eq!(o.probability(1), Some(Coeff::Exact(RingCoeff::HALF)));
    }

    #[test]
    fn injection_measurement() {
        let r = RingCoeff::INV_SQRT2;
        let m1 = additive(2, &[(r, "XI"), (r, "YZ")]);
        let m2 = AdditiveOperator::pauli("XX");
        let o = measure_additive_2q(&m1, &m2, 0, false).unwrap();
        let plus = Branch::new(2, vec![AdditiveOperator::pauli("ZI"), additive(2, &[(r, "IX"), (r, "IY")])]);
        let minus = Branch::new(2, vec![AdditiveOperator::pauli("-ZI"), additive(2, &[(r, "IX"), (r, "-IY")])]);
        assert!(types_equal(&as_type(&o), &QType::new(vec![plus, minus]).unwrap()));
    }

    #[test]
    fn iz_outcomes_are_pruned_for_consistency() {
        // Z1 = −1 and Z1Z2 = −1 force Z2 = +1.
        let r = RingCoeff::INV_SQRT2;
        let b = Branch::new(3, vec![AdditiveOperator::pauli("-ZII"), AdditiveOperator::pauli("-ZZI"), additive(3, &[(r, "ZIX"), (-r, "ZIY")])]);
        let o = measure_branch(&b, 1, false).unwrap();
        assert_eq!(o.branches.len(), 1);
        assert_eq!(o.branches[0].sign, 1);
        assert_eq!(o.probability(1), Some(Coeff::ONE));
        assert_eq!(o.branches[0].branch.terms().len(), 3);
    }

    #[test]
    fn local_factor_measurement() {
        let r = RingCoeff::INV_SQRT2;
        let b = Branch::new(3, vec![additive(3, &[(r, "-XII"), (r, "-YII")]), AdditiveOperator::pauli("-IZI"), AdditiveOperator::pauli("IIZ")]);
        let o = measure_branch(&b, 0, false).unwrap();
        assert_eq!(o.branches.len(), 2);
        assert_eq!(o.probability(1), Some(Coeff::Exact(RingCoeff::HALF)));
        assert_eq!(o.branches[1].branch, br(&["-ZII", "-IZI", "IIZ"]));
    }

    #[test]
    fn iz_lemma() {
        let (p, m) = measure_additive_iz_term(&AdditiveOperator::pauli("IX"), 0).unwrap();
        assert_eq!((p.clone(), m), (AdditiveOperator::pauli("X"), AdditiveOperator::pauli("X")));
        let (p, m) = measure_additive_iz_term(&AdditiveOperator::pauli("ZX"), 0).unwrap();
        assert_eq!((p, m), (AdditiveOperator::pauli("X"), AdditiveOperator::pauli("-X")));
        assert!(matches!(measure_additive_iz_term(&AdditiveOperator::pauli("XX"), 0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn decomposition_round_trip() {
        let r = RingCoeff::INV_SQRT2;
        let m = additive(3, &[(r, "XYZ"), (r, "ZIY")]);
        let d = QubitDecomposition::new(&m, 1);
        assert_eq!(d.recompose(), m);
    }
}
