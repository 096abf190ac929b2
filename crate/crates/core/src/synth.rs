//! Clifford synthesis from types.
//!
//! A Clifford is described by its tableau: the images of every `X_j` and
//! `Z_j`. [`clifford_from_tableau`] reduces a target tableau to the identity
//! by symplectic Gaussian elimination over `{H, S, CNOT}` plus a Pauli sign
//! layer, and emits the inverse of the recorded reduction. The other entry
//! points complete partial tableaux (destabilizers, extra pairs) and reuse it.
//! Every result carries a certificate re-derived by the inference engine.

use crate::error::{Error, Result};
use crate::gates::{apply_gate, builtin_semantics};
use crate::infer::{check, track_generators, Verdict};
use crate::exec::Strategy;
use crate::pauli::{independent, PauliLetter, PauliString, PauliWord};
use crate::program::Program;
use crate::ring::{Coeff, RingCoeff};
use crate::sum::AdditiveOperator;
use crate::types::{Branch, QType};

/// Emitted gate count of [`clifford_from_stabilizers`] is at most
/// `GATE_BOUND_FACTOR · n²`.
pub const GATE_BOUND_FACTOR: usize = 22;

/// A synthesized circuit and its inference certificate.
#[derive(Clone, Debug)]
pub struct SynthResult {
    pub circuit: Program,
    pub certificate: Verdict,
}

/// Images `(C X_j C†, C Z_j C†)` of a Clifford, one pair per qubit.
pub type Tableau = Vec<(PauliString, PauliString)>;

fn symp(a: &PauliString, b: &PauliString) -> bool {
    !a.word().commutes(b.word())
}

fn conj(p: &PauliString, gate: &str, at: &[usize]) -> Result<PauliString> {
    let sem = builtin_semantics(gate)?;
    let op = AdditiveOperator::from_pauli(p).ok_or_else(|| Error::NotPauli(p.to_string()))?;
    apply_gate(&op, &sem, at)?
        .as_pauli()
        .ok_or_else(|| Error::Internal(format!("Clifford `{gate}` produced a non-Pauli image")))
}

struct Reducer {
    rows: Vec<PauliString>,
    gates: Vec<(&'static str, Vec<usize>)>,
}

impl Reducer {
    fn apply(&mut self, gate: &'static str, at: &[usize]) -> Result<()> {
        for r in self.rows.iter_mut() {
            *r = conj(r, gate, at)?;
        }
        self.gates.push((gate, at.to_vec()));
        Ok(())
    }

    /// Row of `X_i` (even) or `Z_i` (odd).
    fn row(&self, i: usize, z: bool) -> &PauliString {
        &self.rows[2 * i + usize::from(z)]
    }
}

fn validate_tableau(t: &Tableau) -> Result<usize> {
    let n = t.len();
    let rows: Vec<&PauliString> = t.iter().flat_map(|(x, z)| [x, z]).collect();
    for r in &rows {
        if r.num_qubits() != n {
            return Err(Error::LengthMismatch { left: n, right: r.num_qubits() });
        }
        if !r.is_hermitian() || r.word().is_identity() {
            return Err(Error::Invalid(format!("tableau row {r} is not a Hermitian non-identity Pauli")));
        }
    }
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let should_anticommute = i / 2 == j / 2;
            if symp(rows[i], rows[j]) != should_anticommute {
                return Err(Error::Invalid(format!(
                    "tableau rows {} and {} violate the symplectic relations",
                    rows[i], rows[j]
                )));
            }
        }
    }
    Ok(n)
}

/// A circuit over `{H, S, CNOT}` whose Clifford maps `X_j ↦ t[j].0` and
/// `Z_j ↦ t[j].1` exactly (signs included).
pub fn clifford_from_tableau(t: &Tableau) -> Result<Program> {
    let n = validate_tableau(t)?;
    let mut red = Reducer { rows: t.iter().flat_map(|(x, z)| [x.clone(), z.clone()]).collect(), gates: Vec::new() };
    for i in 0..n {
        // X row: turn every letter into X, gather onto qubit i, clear the rest.
        let xr = red.row(i, false).word().clone();
        for k in i..n {
            match xr.get(k) {
                PauliLetter::Z => red.apply("H", &[k])?,
                PauliLetter::Y => red.apply("S", &[k])?,
                _ => {}
            }
        }
        let xr = red.row(i, false).word().clone();
        if !xr.x_bit(i) {
            let p = (i + 1..n).find(|&k| xr.x_bit(k)).ok_or_else(|| Error::Internal("empty X row".into()))?;
            red.apply("CNOT", &[p, i])?;
        }
        let xr = red.row(i, false).word().clone();
        for k in i + 1..n {
            if xr.x_bit(k) {
                red.apply("CNOT", &[i, k])?;
            }
        }
        // Z row: make its letter on i a Z while fixing X_i, then gather.
        if red.row(i, true).word().get(i) == PauliLetter::Y {
            red.apply("H", &[i])?;
            red.apply("S", &[i])?;
            red.apply("H", &[i])?;
        }
        let zr = red.row(i, true).word().clone();
        for k in i + 1..n {
            match zr.get(k) {
                PauliLetter::X => red.apply("H", &[k])?,
                PauliLetter::Y => {
                    red.apply("S", &[k])?;
                    red.apply("H", &[k])?;
                }
                _ => {}
            }
        }
        let zr = red.row(i, true).word().clone();
        for k in i + 1..n {
            if zr.z_bit(k) {
                red.apply("CNOT", &[k, i])?;
            }
        }
    }
    for i in 0..n {
        let want_x = PauliString::single(n, i, PauliLetter::X);
        let want_z = PauliString::single(n, i, PauliLetter::Z);
        if red.row(i, false).word() != want_x.word() || red.row(i, true).word() != want_z.word() {
            return Err(Error::Internal(format!("reduction left qubit {} unreduced", i + 1)));
        }
        if red.row(i, false).is_negative() {
            red.apply("Z", &[i])?;
        }
        if red.row(i, true).is_negative() {
            red.apply("X", &[i])?;
        }
    }
    // The reduction G satisfies G C = I (up to phase), so C = G⁻¹.
    let mut out = Program::new(n);
    for (g, at0) in red.gates.iter().rev() {
        let wires: Vec<usize> = at0.iter().map(|q| q + 1).collect();
        let at = wires.as_slice();
        match *g {
            "H" | "CNOT" => out.push_gate(g, at),
            "S" => {
                for _ in 0..3 {
                    out.push_gate("S", at);
                }
            }
            "Z" => {
                out.push_gate("S", at);
                out.push_gate("S", at);
            }
            "X" => {
                out.push_gate("H", at);
                out.push_gate("S", at);
                out.push_gate("S", at);
                out.push_gate("H", at);
            }
            other => return Err(Error::Internal(format!("unexpected reduction gate {other}"))),
        }
    }
    peephole(&out)
}

/// Solves `⟨x, a_i⟩ = b_i` (symplectic products) for a word `x`.
fn solve_symplectic(n: usize, constraints: &[(&PauliWord, bool)]) -> Option<PauliWord> {
    // Unknown bits: x_0..x_{n-1}, z_0..z_{n-1}; ⟨x, a⟩ = Σ x_q a.z_q + z_q a.x_q.
    let cols = 2 * n;
    let mut rows: Vec<(Vec<bool>, bool)> = constraints
        .iter()
        .map(|(a, b)| {
            let mut r = vec![false; cols];
            for q in 0..n {
                r[q] = a.z_bit(q);
                r[n + q] = a.x_bit(q);
            }
            (r, *b)
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows.len()).find(|&r| rows[r].0[col]) else {
            continue;
        };
        rows.swap(row, p);
        for r in 0..rows.len() {
            if r != row && rows[r].0[col] {
                let (src, rhs) = (rows[row].0.clone(), rows[row].1);
                for (d, s) in rows[r].0.iter_mut().zip(src) {
                    *d ^= s;
                }
                rows[r].1 ^= rhs;
            }
        }
        pivots.push(col);
        row += 1;
    }
    if rows[row..].iter().any(|(_, b)| *b) {
        return None;
    }
    let mut w = PauliWord::identity(n);
    for (r, &col) in pivots.iter().enumerate() {
        if rows[r].1 {
            if col < n {
                w.flip_x(col);
            } else {
                w.flip_z(col - n);
            }
        }
    }
    Some(w)
}

/// Completes a partial tableau. `pairs[j] = (x_j?, z_j)` for the first
/// `pairs.len()` qubits: every `z_j` is given, missing `x_j` are found, and
/// the remaining qubits receive fresh symplectic pairs.
pub fn complete_tableau(n: usize, pairs: &[(Option<PauliString>, PauliString)]) -> Result<Tableau> {
    let zs: Vec<PauliString> = pairs.iter().map(|(_, z)| z.clone()).collect();
    if pairs.len() > n {
        return Err(Error::Invalid(format!("{} pairs for {n} qubits", pairs.len())));
    }
    for z in &zs {
        if z.num_qubits() != n {
            return Err(Error::LengthMismatch { left: n, right: z.num_qubits() });
        }
    }
    if !independent(&zs) {
        return Err(Error::Invalid("stabilizer targets are not independent".into()));
    }
    let mut xs: Vec<Option<PauliString>> = pairs.iter().map(|(x, _)| x.clone()).collect();
    // Partners: ⟨x_j, z_k⟩ = δ_jk, then ⟨x_j, x_l⟩ = 0 against finished partners.
    let order: Vec<usize> = (0..xs.len()).filter(|&j| xs[j].is_some()).chain((0..xs.len()).filter(|&j| xs[j].is_none())).collect();
    let mut done: Vec<usize> = Vec::new();
    for j in order {
        let x = match &xs[j] {
            Some(x) => x.clone(),
            None => {
                let cons: Vec<(&PauliWord, bool)> = zs.iter().enumerate().map(|(k, z)| (z.word(), k == j)).collect();
                let mut w = solve_symplectic(n, &cons)
                    .ok_or_else(|| Error::Internal("no destabilizer solves the constraints".into()))?;
                for &l in &done {
                    let xl = xs[l].as_ref().expect("finished partner");
                    if !w.commutes(xl.word()) {
                        w = w.xor(zs[l].word());
                    }
                }
                PauliString::signed(false, w)
            }
        };
        xs[j] = Some(x);
        done.push(j);
    }
    let mut tab: Tableau = xs.into_iter().map(|x| x.expect("partner")).zip(zs).collect();
    // Extra pairs from the symplectic complement of the existing ones.
    let basis: Vec<PauliWord> = (0..n)
        .flat_map(|q| [PauliWord::single(n, q, PauliLetter::X), PauliWord::single(n, q, PauliLetter::Z)])
        .collect();
    let project = |w: &PauliWord, tab: &Tableau| {
        let mut v = w.clone();
        for (x, z) in tab {
            let (sz, sx) = (!v.commutes(z.word()), !v.commutes(x.word()));
            if sz {
                v = v.xor(x.word());
            }
            if sx {
                v = v.xor(z.word());
            }
        }
        v
    };
    while tab.len() < n {
        let z = basis
            .iter()
            .map(|e| project(e, &tab))
            .find(|v| !v.is_identity())
            .ok_or_else(|| Error::Internal("symplectic complement is empty".into()))?;
        let x = basis
            .iter()
            .map(|e| project(e, &tab))
            .find(|v| !v.commutes(&z))
            .ok_or_else(|| Error::Internal("no symplectic partner".into()))?;
        tab.push((PauliString::signed(false, x), PauliString::signed(false, z)));
    }
    Ok(tab)
}

fn z_type(n: usize) -> QType {
    let terms: Vec<PauliString> = (0..n).map(|q| PauliString::single(n, q, PauliLetter::Z)).collect();
    QType::single(Branch::from_paulis(n, &terms))
}

/// Cancels adjacent inverse pairs: `H·H` and `CNOT·CNOT` on the same wires,
/// and runs of `S` modulo four. Other gates are kept and block merging on
/// their wires. Cancellations cascade, so `H S S S S H` vanishes entirely.
pub fn peephole(p: &Program) -> Result<Program> {
    // (name, 1-based wires, repetitions)
    let mut ops: Vec<Option<(String, Vec<usize>, u8)>> = Vec::new();
    // Per wire, the indices of live operations touching it, oldest first.
    let mut stacks: Vec<Vec<usize>> = vec![Vec::new(); p.qubits];
    for op in p.expand()? {
        let crate::program::Op::Gate { sem, at } = op else {
            return Err(Error::Invalid("peephole: program contains a measurement".into()));
        };
        let name = sem.name().to_string();
        let wires: Vec<usize> = at.iter().map(|q| q + 1).collect();
        let order = match name.as_str() {
            "H" | "CNOT" => Some(2),
            "S" => Some(4),
            _ => None,
        };
        let top = stacks[at[0]].last().copied();
        let mergeable = order.is_some()
            && top.is_some_and(|i| {
                at.iter().all(|&q| stacks[q].last() == Some(&i))
                    && matches!(&ops[i], Some((n, w, _)) if *n == name && *w == wires)
            });
        if let (true, Some(i), Some(order)) = (mergeable, top, order) {
            let slot = ops[i].as_mut().expect("live operation");
            slot.2 = (slot.2 + 1) % order;
            if slot.2 == 0 {
                ops[i] = None;
                for &q in at.iter() {
                    stacks[q].pop();
                }
            }
            continue;
        }
        for &q in at.iter() {
            stacks[q].push(ops.len());
        }
        ops.push(Some((name, wires, 1)));
    }
    let mut out = Program::new(p.qubits);
    for (name, wires, reps) in ops.into_iter().flatten() {
        for _ in 0..reps {
            out.push_gate(&name, &wires);
        }
    }
    Ok(out)
}

fn certify(circuit: Program, target: &Branch) -> Result<SynthResult> {
    let circuit = peephole(&circuit)?;
    let n = target.num_qubits();
    let certificate = check(&circuit, &z_type(n), &QType::single(target.clone()))?;
    if !certificate.pass {
        return Err(Error::Internal(format!(
            "synthesized circuit fails its certificate: {}",
            certificate.diff.join("; ")
        )));
    }
    Ok(SynthResult { circuit, certificate })
}

fn check_stabilizers(n: usize, terms: &[PauliString]) -> Result<()> {
    for t in terms {
        if t.num_qubits() != n {
            return Err(Error::LengthMismatch { left: n, right: t.num_qubits() });
        }
        if !t.is_hermitian() || t.word().is_identity() {
            return Err(Error::NotPauli(t.to_string()));
        }
    }
    for (i, a) in terms.iter().enumerate() {
        for b in &terms[i + 1..] {
            if symp(a, b) {
                return Err(Error::Uninhabited { a: a.to_string(), b: b.to_string() });
            }
        }
    }
    if !independent(terms) {
        return Err(Error::Invalid("stabilizer terms are not independent".into()));
    }
    Ok(())
}

/// A `{H, S, CNOT}` circuit `C` with `C: Z_j → P_j` for every `j`.
pub fn clifford_from_stabilizers(terms: &[PauliString]) -> Result<SynthResult> {
    let n = terms.len();
    if n == 0 {
        return Err(Error::Invalid("no stabilizer terms".into()));
    }
    check_stabilizers(terms[0].num_qubits(), terms)?;
    if terms[0].num_qubits() != n {
        return Err(Error::Invalid(format!(
            "{n} terms cannot fix a state of {} qubits",
            terms[0].num_qubits()
        )));
    }
    let pairs: Vec<(Option<PauliString>, PauliString)> = terms.iter().map(|t| (None, t.clone())).collect();
    let tab = complete_tableau(n, &pairs)?;
    let circuit = clifford_from_tableau(&tab)?;
    certify(circuit, &Branch::from_paulis(n, terms))
}

/// Canonical-pair Clifford `A` with `A: X_1 → p1, Z_1 → p2` (anticommuting
/// pair) or `A: Z_1 → p1, Z_2 → p2` (commuting pair).
fn canonical_route(p1: &PauliString, p2: &PauliString) -> Result<Program> {
    let n = p1.num_qubits();
    let pairs = if symp(p1, p2) {
        vec![(Some(p1.clone()), p2.clone())]
    } else {
        if n < 2 {
            return Err(Error::Invalid("commuting independent pairs need two qubits".into()));
        }
        vec![(None, p1.clone()), (None, p2.clone())]
    };
    clifford_from_tableau(&complete_tableau(n, &pairs)?)
}

/// Clifford `C` with `C: p1 → q1` and `C: p2 → q2`, routed through a fixed
/// canonical pair so that outputs are reproducible.
pub fn two_transitive_clifford(
    p1: &PauliString,
    p2: &PauliString,
    q1: &PauliString,
    q2: &PauliString,
) -> Result<(Program, [Verdict; 2])> {
    let n = p1.num_qubits();
    for p in [p1, p2, q1, q2] {
        if p.num_qubits() != n {
            return Err(Error::LengthMismatch { left: n, right: p.num_qubits() });
        }
        if !p.is_hermitian() || p.word().is_identity() {
            return Err(Error::NotPauli(p.to_string()));
        }
    }
    if p1.word() == p2.word() || q1.word() == q2.word() {
        return Err(Error::Invalid("pairs must consist of distinct Paulis (up to sign)".into()));
    }
    if symp(p1, p2) != symp(q1, q2) {
        return Err(Error::Invalid(format!(
            "({p1}, {p2}) and ({q1}, {q2}) fall in different commutation classes"
        )));
    }
    let a_p = canonical_route(p1, p2)?;
    let a_q = canonical_route(q1, q2)?;
    let circuit = a_p.inverse()?.then(&a_q);
    let cert = |p: &PauliString, q: &PauliString| -> Result<Verdict> {
        let init = QType::single(Branch::from_paulis(n, std::slice::from_ref(p)));
        let want = QType::single(Branch::from_paulis(n, std::slice::from_ref(q)));
        let v = check(&circuit, &init, &want)?;
        if !v.pass {
            return Err(Error::Internal(format!("two-transitive circuit fails {p} -> {q}")));
        }
        Ok(v)
    };
    let certs = [cert(p1, q1)?, cert(p2, q2)?];
    Ok((expand_sdg(circuit), certs))
}

/// Rewrites any `SDG` into `S;S;S` so that output stays over `{H, S, CNOT}`.
fn expand_sdg(p: Program) -> Program {
    let mut out = Program::new(p.qubits);
    for op in p.expand().expect("circuit built from built-ins") {
        if let crate::program::Op::Gate { sem, at } = op {
            let wires: Vec<usize> = at.iter().map(|q| q + 1).collect();
            if sem.name() == "SDG" {
                for _ in 0..3 {
                    out.push_gate("S", &wires);
                }
            } else {
                out.push_gate(sem.name(), &wires);
            }
        }
    }
    out
}

/// The additive term `(P₀ + P₁)/√2` split into its signed Pauli parts.
fn split_t_term(m: &AdditiveOperator) -> Option<(PauliString, PauliString)> {
    if m.len() != 2 {
        return None;
    }
    let r = RingCoeff::INV_SQRT2;
    let mut parts = Vec::new();
    for (w, c) in m.iter() {
        let neg = match c {
            Coeff::Exact(x) if *x == r => false,
            Coeff::Exact(x) if *x == -r => true,
            _ => return None,
        };
        parts.push(PauliString::signed(neg, w.clone()));
    }
    let (a, b) = (parts[0].clone(), parts[1].clone());
    symp(&a, &b).then_some((a, b))
}

/// Preparation circuit with exactly one T gate for a complete branch whose
/// only non-Pauli term is `(P₀ + P₁)/√2` with `P₀`, `P₁` anticommuting.
pub fn prep_clifford_plus_t(b: &Branch) -> Result<SynthResult> {
    let n = b.num_qubits();
    if b.is_gottesman() {
        return clifford_from_stabilizers(&b.pauli_terms()?);
    }
    let shape = || Error::Unsupported("unsupported shape: expected one (P0 + P1)/rt2 term and Pauli terms".into());
    let additive: Vec<usize> = (0..b.terms().len()).filter(|&i| !b.terms()[i].is_pauli()).collect();
    if additive.len() != 1 || b.terms().len() != n {
        return Err(shape());
    }
    let (p0, p1) = split_t_term(&b.terms()[additive[0]]).ok_or_else(shape)?;
    let rest: Vec<PauliString> = b
        .terms()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != additive[0])
        .map(|(_, t)| t.as_pauli().ok_or_else(shape))
        .collect::<Result<_>>()?;
    for r in &rest {
        if symp(r, &p0) || symp(r, &p1) {
            return Err(Error::Uninhabited { a: r.to_string(), b: b.terms()[additive[0]].to_string() });
        }
    }
    // D: X₁ → P₀, Y₁ → P₁ so that D: (X₁ + Y₁)/√2 → (P₀ + P₁)/√2.
    let x1 = PauliString::single(n, 0, PauliLetter::X);
    let y1 = PauliString::single(n, 0, PauliLetter::Y);
    let (d, _) = two_transitive_clifford(&x1, &y1, &p0, &p1)?;
    let d_inv = d.inverse()?;
    let mut pulled = vec![x1];
    for r in &rest {
        let op = AdditiveOperator::from_pauli(r).ok_or_else(|| Error::NotPauli(r.to_string()))?;
        let img = conj_program(&d_inv, &op)?;
        pulled.push(img.as_pauli().ok_or_else(|| Error::Internal("Clifford image is not Pauli".into()))?);
    }
    let prefix = clifford_from_stabilizers(&pulled)?.circuit;
    let circuit = expand_sdg(prefix.gate("T", &[1]).then(&d));
    certify(circuit, b)
}

fn conj_program(p: &Program, op: &AdditiveOperator) -> Result<AdditiveOperator> {
    let mut t = op.clone();
    for o in p.expand()? {
        if let crate::program::Op::Gate { sem, at } = o {
            t = apply_gate(&t, &sem, &at)?;
        }
    }
    Ok(t)
}

/// Tableau of a measurement-free Clifford program.
pub fn tableau_of(p: &Program) -> Result<Tableau> {
    track_generators(p, Strategy::Sequential)?
        .into_iter()
        .map(|(x, z)| {
            let px = x.as_pauli().ok_or_else(|| Error::NotPauli(x.to_string()))?;
            let pz = z.as_pauli().ok_or_else(|| Error::NotPauli(z.to_string()))?;
            Ok((px, pz))
        })
        .collect()
}
