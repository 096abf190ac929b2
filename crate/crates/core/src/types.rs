//! The type grammar: intersections of additive terms (branches), unions of
//! branches, separability annotations, the canonical normal form, equality,
//! separability judgments and union simplification.

use std::fmt;

use crate::error::{Error, Result};
use crate::pauli::{PauliGroup, PauliString, PauliWord};
use crate::ring::Coeff;
use crate::sum::AdditiveOperator;

/// An intersection of terms on `n` qubits, optionally annotated with
/// separability partitions (0-based, sorted, pairwise disjoint qubit sets).
#[derive(Clone)]
pub struct Branch {
    n: usize,
    terms: Vec<AdditiveOperator>,
    partitions: Vec<Vec<usize>>,
}

/// A union of branches (at least one).
#[derive(Clone)]
pub struct QType {
    branches: Vec<Branch>,
}

/// Which generator occupies a pivot column.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotKind {
    X,
    Z,
}

/// A normalized Gottesman branch together with its pivot data.
#[derive(Clone, Debug)]
pub struct NormalForm {
    /// Terms ordered by pivot qubit.
    pub terms: Vec<PauliString>,
    /// `(qubit, kind)` for each term, aligned with `terms`.
    pub pivots: Vec<(usize, PivotKind)>,
}

impl NormalForm {
    /// Index of the term pivoting on qubit `q`.
    pub fn term_for_qubit(&self, q: usize) -> Option<usize> {
        self.pivots.iter().position(|(p, _)| *p == q)
    }
}

impl Branch {
    pub fn new(n: usize, terms: Vec<AdditiveOperator>) -> Self {
        debug_assert!(terms.iter().all(|t| t.num_qubits() == n));
        Branch { n, terms, partitions: Vec::new() }
    }

    pub fn from_paulis(n: usize, paulis: &[PauliString]) -> Self {
        Branch::new(
            n,
            paulis
                .iter()
                .map(|p| AdditiveOperator::from_pauli(p).expect("Hermitian Pauli term required"))
                .collect(),
        )
    }

    /// Convenience: parses signed Pauli words such as `["XXI", "-ZZI"]`.
    pub fn paulis(words: &[&str]) -> Self {
        let ps: Vec<PauliString> = words.iter().map(|w| w.parse().expect("malformed Pauli word")).collect();
        let n = ps.first().map(|p| p.num_qubits()).unwrap_or(0);
        Branch::from_paulis(n, &ps)
    }

    pub fn with_partitions(mut self, partitions: Vec<Vec<usize>>) -> Self {
        self.partitions = partitions;
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[AdditiveOperator] {
        &self.terms
    }

    pub fn terms_mut(&mut self) -> &mut Vec<AdditiveOperator> {
        &mut self.terms
    }

    pub fn into_terms(self) -> Vec<AdditiveOperator> {
        self.terms
    }

    pub fn partitions(&self) -> &[Vec<usize>] {
        &self.partitions
    }

    pub fn clear_partitions(&mut self) {
        self.partitions.clear();
    }

    /// The restriction of the terms supported inside partition `i`.
    pub fn partition_branch(&self, i: usize) -> Branch {
        let part = &self.partitions[i];
        let terms = self
            .terms
            .iter()
            .filter(|t| t.support().iter().all(|q| part.contains(q)))
            .map(|t| t.restrict(part))
            .collect();
        Branch::new(part.len(), terms)
    }

    /// True when every term is a single Pauli string with coefficient ±1.
    pub fn is_gottesman(&self) -> bool {
        self.terms.iter().all(|t| t.is_pauli())
    }

    /// The terms as signed Pauli strings (error if some term is additive).
    pub fn pauli_terms(&self) -> Result<Vec<PauliString>> {
        self.terms
            .iter()
            .map(|t| t.as_pauli().ok_or_else(|| Error::NotPauli(t.to_string())))
            .collect()
    }

    /// Exact inexactness flag: true if any coefficient lost exactness.
    pub fn is_exact(&self) -> bool {
        self.terms.iter().all(|t| t.is_exact())
    }

    /// Diagnostics for terms that cannot be simultaneously inhabited or are
    /// not valid additive types.
    pub fn lint(&self) -> Vec<String> {
        let mut out = Vec::new();
        for t in &self.terms {
            if !t.is_pauli() && !t.is_valid_additive() {
                out.push(format!("term `{t}` is not unitary and Hermitian (square is not I)"));
            }
        }
        for i in 0..self.terms.len() {
            for j in i + 1..self.terms.len() {
                if !operators_commute(&self.terms[i], &self.terms[j]) {
                    out.push(format!(
                        "terms `{}` and `{}` do not commute: the intersection is uninhabited",
                        self.terms[i], self.terms[j]
                    ));
                }
            }
        }
        out
    }
}

/// True when `a·b = b·a` (symbolically).
pub fn operators_commute(a: &AdditiveOperator, b: &AdditiveOperator) -> bool {
    if let (Some(p), Some(q)) = (a.as_pauli(), b.as_pauli()) {
        return p.word().commutes(q.word());
    }
    let (ca, cb) = (a.to_complex(), b.to_complex());
    ca.mul(&cb) == cb.mul(&ca)
}

/// Normal form of a Gottesman branch with pivot data.
///
/// For each qubit in turn, the first not-yet-pivot term with an X or Y on
/// that qubit becomes its pivot and every other term with an x-bit there is
/// multiplied by it; failing that, the same is done for the z-bit. Terms end
/// up ordered by pivot qubit. `+I` terms are dropped silently.
pub fn normal_form(b: &Branch) -> Result<NormalForm> {
    let n = b.n;
    let input = b.pauli_terms()?;
    for i in 0..input.len() {
        for j in i + 1..input.len() {
            if !input[i].word().commutes(input[j].word()) {
                return Err(Error::Uninhabited { a: input[i].to_string(), b: input[j].to_string() });
            }
        }
    }
    let mut rows: Vec<(PauliString, Vec<usize>)> = Vec::new();
    for (i, p) in input.iter().enumerate() {
        if p.word().is_identity() {
            if p.is_negative() {
                return Err(Error::Contradictory { witness: vec![i] });
            }
            continue;
        }
        rows.push((p.clone(), vec![i]));
    }
    let mut pivot: Vec<Option<(usize, PivotKind)>> = vec![None; rows.len()];
    for q in 0..n {
        for kind in [PivotKind::X, PivotKind::Z] {
            let has = |w: &PauliWord| match kind {
                PivotKind::X => w.x_bit(q),
                PivotKind::Z => w.z_bit(q),
            };
            let Some(j) = (0..rows.len()).find(|&j| pivot[j].is_none() && has(rows[j].0.word())) else {
                continue;
            };
            pivot[j] = Some((q, kind));
            let (pj, cj) = rows[j].clone();
            for (k, row) in rows.iter_mut().enumerate() {
                if k != j && has(row.0.word()) {
                    row.0.mul_assign_right(&pj);
                    row.1 = xor_indices(&row.1, &cj);
                }
            }
            break;
        }
    }
    let mut out: Vec<(usize, PivotKind, PauliString)> = Vec::with_capacity(rows.len());
    for (j, (p, combo)) in rows.into_iter().enumerate() {
        match pivot[j] {
            Some((q, kind)) => out.push((q, kind, p)),
            None => {
                debug_assert!(p.word().is_identity());
                return Err(if p.is_negative() {
                    Error::Contradictory { witness: combo }
                } else {
                    Error::Redundant { witness: combo }
                });
            }
        }
    }
    out.sort_by_key(|(q, _, _)| *q);
    Ok(NormalForm {
        pivots: out.iter().map(|(q, k, _)| (*q, *k)).collect(),
        terms: out.into_iter().map(|(_, _, p)| p).collect(),
    })
}

fn xor_indices(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().filter(|x| !b.contains(x)).copied().collect();
    v.extend(b.iter().filter(|x| !a.contains(x)));
    v.sort_unstable();
    v
}

/// Canonical row-echelon form of a Gottesman branch (partitions preserved).
pub fn normalize(b: &Branch) -> Result<Branch> {
    let nf = normal_form(b)?;
    Ok(Branch::from_paulis(b.n, &nf.terms).with_partitions(b.partitions.clone()))
}

/// Canonical comparison key of a branch: the normal form for Gottesman
/// branches, the sorted term list otherwise.
fn branch_key(b: &Branch) -> Vec<AdditiveOperator> {
    if b.is_gottesman() {
        if let Ok(nb) = normalize(b) {
            return nb.terms;
        }
    }
    let mut terms = b.terms.clone();
    terms.sort_by(cmp_operators);
    terms.dedup();
    terms
}

fn cmp_operators(a: &AdditiveOperator, b: &AdditiveOperator) -> std::cmp::Ordering {
    let ka: Vec<_> = a.terms().iter().map(|(w, c)| (w.clone(), c.to_f64().to_bits())).collect();
    let kb: Vec<_> = b.terms().iter().map(|(w, c)| (w.clone(), c.to_f64().to_bits())).collect();
    ka.cmp(&kb)
}

/// Equality of branches modulo normal form (annotations ignored).
pub fn branches_equal(a: &Branch, b: &Branch) -> bool {
    a.n == b.n && branch_key(a) == branch_key(b)
}

/// Equality of types: branch-wise normal forms, branch order insensitive.
pub fn types_equal(a: &QType, b: &QType) -> bool {
    let ka: Vec<_> = a.branches.iter().map(branch_key).collect();
    let kb: Vec<_> = b.branches.iter().map(branch_key).collect();
    ka.iter().all(|k| kb.contains(k)) && kb.iter().all(|k| ka.contains(k))
        && a.num_qubits() == b.num_qubits()
}

/// True iff some term of the (normalized) branch acts non-trivially on qubit
/// `k` (0-based) only.
pub fn separable_single(b: &Branch, k: usize) -> Result<bool> {
    if k >= b.n {
        return Err(Error::IndexOutOfRange { index: k + 1, qubits: b.n });
    }
    let terms = if b.is_gottesman() { normalize(b)?.terms } else { b.terms.clone() };
    Ok(terms.iter().any(|t| t.support() == [k]))
}

/// Result of a multi-qubit separability query.
#[derive(Clone, Debug)]
pub struct Separability {
    pub separable: bool,
    /// The normalized branch, annotated with `(K, K̄)` on success.
    pub branch: Branch,
    /// Why separability could not be granted.
    pub reason: Option<String>,
}

/// Separability of qubit set `K` (0-based) from the rest: every qubit in `K`
/// needs a pivot term, those terms must commute and be supported inside `K`.
pub fn separable_subset(b: &Branch, k_set: &[usize]) -> Result<Separability> {
    let mut ks: Vec<usize> = k_set.to_vec();
    ks.sort_unstable();
    ks.dedup();
    if let Some(&q) = ks.iter().find(|&&q| q >= b.n) {
        return Err(Error::IndexOutOfRange { index: q + 1, qubits: b.n });
    }
    let nf = normal_form(b)?;
    let normalized = Branch::from_paulis(b.n, &nf.terms);
    if ks.is_empty() || ks.len() == b.n {
        return Ok(Separability { separable: true, branch: normalized, reason: None });
    }
    let fail = |reason: String, branch: Branch| Ok(Separability { separable: false, branch, reason: Some(reason) });
    let mut chosen = Vec::with_capacity(ks.len());
    for &q in &ks {
        match nf.term_for_qubit(q) {
            Some(i) => chosen.push(i),
            None => return fail(format!("qubit {} has no pivot term", q + 1), normalized),
        }
    }
    let first = &nf.terms[chosen[0]];
    for &i in &chosen[1..] {
        if !first.word().commutes(nf.terms[i].word()) {
            return fail(format!("pivot terms {first} and {} anticommute", nf.terms[i]), normalized);
        }
    }
    for &i in &chosen {
        if nf.terms[i].word().support().iter().any(|q| !ks.contains(q)) {
            return fail(
                format!("pivot term {} acts outside the requested qubits", nf.terms[i]),
                normalized,
            );
        }
    }
    // The remaining terms are then necessarily trivial on K; verify anyway.
    let rest: Vec<usize> = (0..nf.terms.len()).filter(|i| !chosen.contains(i)).collect();
    if let Some(&i) = rest.iter().find(|&&i| nf.terms[i].word().support().iter().any(|q| ks.contains(q))) {
        return fail(format!("term {} straddles the bipartition", nf.terms[i]), normalized);
    }
    let complement: Vec<usize> = (0..b.n).filter(|q| !ks.contains(q)).collect();
    let mut ordered: Vec<PauliString> = chosen.iter().map(|&i| nf.terms[i].clone()).collect();
    ordered.extend(rest.iter().map(|&i| nf.terms[i].clone()));
    let mut partitions = vec![ks];
    if !rest.is_empty() {
        partitions.push(complement);
    }
    Ok(Separability {
        separable: true,
        branch: Branch::from_paulis(b.n, &ordered).with_partitions(partitions),
        reason: None,
    })
}

/// Additive validity of a single term.
pub fn is_valid_additive(m: &AdditiveOperator) -> bool {
    m.is_valid_additive()
}

/// `true` when every term of `sup` lies in the group generated by `sub`, i.e.
/// the states of `sub` form a subset of the states of `sup`.
pub fn is_subtype(sub: &Branch, sup: &Branch) -> bool {
    let (Ok(a), Ok(b)) = (sub.pauli_terms(), sup.pauli_terms()) else {
        return false;
    };
    if sub.n != sup.n {
        return false;
    }
    let g = PauliGroup::generated_by(sub.n, &a);
    b.iter().all(|p| g.membership(p) == Some(true))
}

impl QType {
    pub fn new(branches: Vec<Branch>) -> Result<Self> {
        let Some(first) = branches.first() else {
            return Err(Error::Invalid("a type needs at least one branch".into()));
        };
        let n = first.n;
        if let Some(b) = branches.iter().find(|b| b.n != n) {
            return Err(Error::LengthMismatch { left: n, right: b.n });
        }
        Ok(QType { branches })
    }

    pub fn single(b: Branch) -> Self {
        QType { branches: vec![b] }
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn into_branches(self) -> Vec<Branch> {
        self.branches
    }

    pub fn num_qubits(&self) -> usize {
        self.branches[0].n
    }

    pub fn is_gottesman(&self) -> bool {
        self.branches.iter().all(|b| b.is_gottesman())
    }

    /// Normalizes every Gottesman branch (additive branches are kept).
    pub fn normalized(&self) -> Result<QType> {
        let branches = self
            .branches
            .iter()
            .map(|b| if b.is_gottesman() { normalize(b) } else { Ok(b.clone()) })
            .collect::<Result<Vec<_>>>()?;
        Ok(QType { branches })
    }

    pub fn lint(&self) -> Vec<String> {
        self.branches.iter().flat_map(|b| b.lint()).collect()
    }
}

/// Merges branches with equal normal forms and drops Gottesman branches that
/// are subtypes of another branch (`A ∪ B = A` when `B ⊆ A`).
pub fn union_simplify(t: &QType) -> QType {
    let mut kept: Vec<Branch> = Vec::new();
    for b in &t.branches {
        if !kept.iter().any(|k| branches_equal(k, b)) {
            kept.push(b.clone());
        }
    }
    let absorbed: Vec<bool> = (0..kept.len())
        .map(|i| (0..kept.len()).any(|j| j != i && is_subtype(&kept[i], &kept[j]) && !is_subtype(&kept[j], &kept[i])))
        .collect();
    let branches: Vec<Branch> = kept.into_iter().zip(absorbed).filter(|(_, a)| !a).map(|(b, _)| b).collect();
    QType { branches }
}

/// Intersection of two branches: combined constraints, or `None` when the
/// result is uninhabited. Redundant Gottesman terms are dropped.
pub fn intersect_branches(a: &Branch, b: &Branch) -> Option<Branch> {
    if a.n != b.n {
        return None;
    }
    let mut terms = a.terms.clone();
    terms.extend(b.terms.iter().cloned());
    let joined = Branch::new(a.n, terms);
    if joined.is_gottesman() {
        let ps = joined.pauli_terms().ok()?;
        for i in 0..ps.len() {
            for j in i + 1..ps.len() {
                if !ps[i].word().commutes(ps[j].word()) {
                    return None;
                }
            }
        }
        let mut g = PauliGroup::new(a.n);
        let mut kept = Vec::new();
        for p in ps {
            match g.membership(&p) {
                Some(true) => continue,
                Some(false) => return None,
                None => {
                    g.insert(p.clone());
                    kept.push(p);
                }
            }
        }
        normalize(&Branch::from_paulis(a.n, &kept)).ok()
    } else {
        if joined.lint().iter().any(|d| d.contains("do not commute")) {
            return None;
        }
        Some(joined)
    }
}

/// `(A₁ ∪ …) ∩ (B₁ ∪ …)` distributed branch-wise, uninhabited combinations
/// dropped, then union-simplified.
pub fn intersect(a: &QType, b: &QType) -> Result<QType> {
    let mut out = Vec::new();
    for x in &a.branches {
        for y in &b.branches {
            if let Some(z) = intersect_branches(x, y) {
                out.push(z);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Invalid("intersection is uninhabited".into()));
    }
    Ok(union_simplify(&QType { branches: out }))
}

fn fmt_qubits(f: &mut fmt::Formatter<'_>, qs: &[usize]) -> fmt::Result {
    write!(f, "@{{")?;
    for (i, q) in qs.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{}", q + 1)?;
    }
    write!(f, "}}")
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut printed = vec![false; self.terms.len()];
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if !first {
                write!(f, " & ")?;
            }
            first = false;
            Ok(())
        };
        for part in &self.partitions {
            let members: Vec<usize> = (0..self.terms.len())
                .filter(|&i| !printed[i] && self.terms[i].support().iter().all(|q| part.contains(q)))
                .collect();
            if members.is_empty() {
                continue;
            }
            sep(f)?;
            let restricted: Vec<String> = members.iter().map(|&i| self.terms[i].restrict(part).to_string()).collect();
            if restricted.len() == 1 && self.terms[members[0]].len() == 1 {
                write!(f, "{}", restricted[0])?;
            } else {
                write!(f, "({})", restricted.join(" & "))?;
            }
            fmt_qubits(f, part)?;
            for i in members {
                printed[i] = true;
            }
        }
        for (i, t) in self.terms.iter().enumerate() {
            if !printed[i] {
                sep(f)?;
                write!(f, "{t}")?;
            }
        }
        if first {
            write!(f, "{}", PauliWord::identity(self.n))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.branches.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for QType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl PartialEq for Branch {
    /// Structural equality (terms in order, annotations included).
    fn eq(&self, other: &Branch) -> bool {
        self.n == other.n && self.terms == other.terms && self.partitions == other.partitions
    }
}

impl PartialEq for QType {
    /// Structural equality; use [`types_equal`] for semantic comparison.
    fn eq(&self, other: &QType) -> bool {
        self.branches == other.branches
    }
}

/// `sZ_q` on `n` qubits as a one-term operator.
pub fn signed_z(n: usize, q: usize, negative: bool) -> AdditiveOperator {
    let w = PauliWord::single(n, q, crate::pauli::PauliLetter::Z);
    AdditiveOperator::single(w, if negative { Coeff::MINUS_ONE } else { Coeff::ONE })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn br(words: &[&str]) -> Branch {
        Branch::paulis(words)
    }

    #[test]
    fn normalization_example() {
        let out = normalize(&br(&["XXI", "ZZI", "ZZZ"])).unwrap();
        assert_eq!(out, br(&["XXI", "ZZI", "IIZ"]));
        let out2 = normalize(&br(&["XXI", "ZZZ", "ZZI"])).unwrap();
        assert_eq!(out2, out);
        assert_eq!(normalize(&out).unwrap(), out);
    }

    #[test]
    fn normalization_diagnostics() {
        assert!(matches!(normalize(&br(&["X", "Z"])), Err(Error::Uninhabited { .. })));
        assert!(matches!(normalize(&br(&["ZI", "IZ", "ZZ"])), Err(Error::Redundant { .. })));
        assert!(matches!(normalize(&br(&["ZI", "IZ", "-ZZ"])), Err(Error::Contradictory { .. })));
    }

    #[test]
    fn equality_examples() {
        let a = QType::single(br(&["ZI", "IZ"]));
        let b = QType::single(br(&["ZI", "ZZ"]));
        assert!(types_equal(&a, &b));
        assert!(!types_equal(&QType::single(br(&["Z"])), &QType::single(br(&["-Z"]))));
        let u1 = QType::new(vec![br(&["Z"]), br(&["-Z"])]).unwrap();
        let u2 = QType::new(vec![br(&["-Z"]), br(&["Z"])]).unwrap();
        assert!(types_equal(&u1, &u2));
    }

    #[test]
    fn single_qubit_separability() {
        assert!(separable_single(&br(&["ZI", "IZ"]), 0).unwrap());
        assert!(!separable_single(&br(&["XX", "ZZ"]), 0).unwrap());
        assert!(separable_single(&br(&["IX"]), 1).unwrap());
        assert!(separable_single(&br(&["IX"]), 2).is_err());
    }

    #[test]
    fn subset_separability() {
        let s = separable_subset(&br(&["XXI", "ZZI", "IIZ"]), &[0, 1]).unwrap();
        assert!(s.separable);
        assert_eq!(s.branch.to_string(), "(XX & ZZ)@{1,2} & Z@{3}");
        let g = separable_subset(&br(&["XXX", "ZZI", "IZZ"]), &[0, 1]).unwrap();
        assert!(!g.separable);
        assert!(separable_subset(&br(&["XXX", "ZZI", "IZZ"]), &[0, 1, 2]).unwrap().separable);
    }

    #[test]
    fn union_simplification() {
        let t = QType::new(vec![br(&["Z"]), br(&["Z"])]).unwrap();
        assert_eq!(union_simplify(&t).branches().len(), 1);
        let a = QType::new(vec![br(&["ZI"]), br(&["-ZI"])]).unwrap();
        let b = QType::new(vec![br(&["ZI", "IZ"]), br(&["-ZI", "IZ"])]).unwrap();
        let m = intersect(&a, &b).unwrap();
        assert!(types_equal(&m, &b));
        let single = QType::single(br(&["X"]));
        assert_eq!(union_simplify(&single), single);
    }
}
