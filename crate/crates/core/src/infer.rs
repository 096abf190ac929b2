//! The typing engine: pushes types through programs gate by gate, branch by
//! branch and term by term, delegating measurements to [`crate::measure`].

use crate::error::{Error, Result};
use crate::exec::{self, Strategy};
use crate::gates::{apply_gate_in_place, squares_to_identity, GateSemantics};
use crate::measure::{measure_branch, MeasurementOutcome};
use crate::oracle;
use crate::pauli::PauliLetter;
use crate::program::{Op, Program, Stmt};
use crate::sum::AdditiveOperator;
use crate::types::{branches_equal, types_equal, union_simplify, Branch, QType};

/// Default bound on the number of summands one term may generate per gate.
pub const DEFAULT_SUMMAND_CAP: usize = 65_536;

/// Below this many summands in a branch, terms are processed sequentially.
const PARALLEL_TERM_THRESHOLD: usize = 64;

#[derive(Clone, Debug)]
pub struct InferConfig {
    pub summand_cap: usize,
    /// Keep zero-probability measurement outcomes.
    pub keep_impossible: bool,
    pub strategy: Strategy,
    /// Record the type after every statement.
    pub trace: bool,
}

impl Default for InferConfig {
    fn default() -> Self {
        InferConfig { summand_cap: DEFAULT_SUMMAND_CAP, keep_impossible: false, strategy: Strategy::default(), trace: false }
    }
}

/// The type after one expanded statement (1-based position).
#[derive(Clone, Debug)]
pub struct TraceStep {
    pub position: usize,
    pub op: String,
    pub output: QType,
}

/// Outcomes of one MEAS statement, one entry per source branch.
#[derive(Clone, Debug)]
pub struct MeasurementRecord {
    pub position: usize,
    pub outcomes: Vec<MeasurementOutcome>,
}

#[derive(Clone, Debug)]
pub struct Inference {
    pub output: QType,
    pub trace: Vec<TraceStep>,
    pub measurements: Vec<MeasurementRecord>,
    /// Largest summand count produced by one term before combination.
    pub max_generated: usize,
}

/// Infers the output type of `p` on input `init` with default settings.
pub fn infer(p: &Program, init: &QType) -> Result<QType> {
    Ok(infer_with(p, init, &InferConfig::default())?.output)
}

fn apply_to_branch(
    b: &mut Branch,
    sem: &GateSemantics,
    at: &[usize],
    cfg: &InferConfig,
    position: usize,
) -> Result<usize> {
    let size: usize = b.terms().iter().map(|t| t.len()).sum();
    let strategy = if size >= PARALLEL_TERM_THRESHOLD { cfg.strategy } else { Strategy::Sequential };
    let cap = cfg.summand_cap;
    let mut generated = vec![0usize; b.terms().len()];
    let mut pairs: Vec<(&mut AdditiveOperator, &mut usize)> = b.terms_mut().iter_mut().zip(generated.iter_mut()).collect();
    exec::try_for_each_mut(strategy, &mut pairs, |(t, g)| {
        let stats = apply_gate_in_place(t, sem, at, cap)?;
        **g = stats.generated;
        Ok(())
    })
    .map_err(|e| match e {
        Error::SummandCap { cap, gate, .. } => Error::SummandCap { cap, position, gate },
        other => other,
    })?;
    b.clear_partitions();
    Ok(generated.into_iter().max().unwrap_or(0))
}

/// Full inference with configuration, trace and measurement records.
pub fn infer_with(p: &Program, init: &QType, cfg: &InferConfig) -> Result<Inference> {
    if init.num_qubits() != p.qubits {
        return Err(Error::LengthMismatch { left: p.qubits, right: init.num_qubits() });
    }
    let ops = p.expand()?;
    let mut branches: Vec<Branch> = init.branches().to_vec();
    let mut trace = Vec::new();
    let mut measurements = Vec::new();
    let mut max_generated = 0;
    for (i, op) in ops.iter().enumerate() {
        let position = i + 1;
        match op {
            Op::Gate { sem, at } => {
                let results = {
                    let mut slots: Vec<(Branch, usize)> = branches.drain(..).map(|b| (b, 0)).collect();
                    exec::try_for_each_mut(cfg.strategy, &mut slots, |(b, g)| {
                        *g = apply_to_branch(b, sem, at, cfg, position)?;
                        Ok::<(), Error>(())
                    })?;
                    slots
                };
                for (b, g) in results {
                    max_generated = max_generated.max(g);
                    branches.push(b);
                }
            }
            Op::Meas { qubit } => {
                let outcomes = exec::map(cfg.strategy, &branches, |b| measure_branch(b, *qubit, cfg.keep_impossible))
                    .into_iter()
                    .collect::<Result<Vec<_>>>()?;
                branches = outcomes.iter().flat_map(|o| o.branches.iter().map(|ob| ob.branch.clone())).collect();
                measurements.push(MeasurementRecord { position, outcomes });
            }
        }
        if cfg.trace {
            trace.push(TraceStep { position, op: describe(op), output: QType::new(branches.clone())? });
        }
    }
    let output = union_simplify(&QType::new(branches)?);
    Ok(Inference { output, trace, measurements, max_generated })
}

fn describe(op: &Op) -> String {
    match op {
        Op::Gate { sem, at } => {
            let wires: Vec<String> = at.iter().map(|q| (q + 1).to_string()).collect();
            format!("{} {}", sem.name(), wires.join(" "))
        }
        Op::Meas { qubit } => format!("MEAS {}", qubit + 1),
    }
}

/// Images of all `2n` generators `X_j`, `Z_j` under a measurement-free
/// program, each tracked independently.
pub fn track_generators(p: &Program, strategy: Strategy) -> Result<Vec<(AdditiveOperator, AdditiveOperator)>> {
    if p.contains_measurement() {
        return Err(Error::Unsupported("generator tracking needs a measurement-free program".into()));
    }
    let ops = p.expand()?;
    let n = p.qubits;
    let images = exec::map_range(strategy, 2 * n, |g| {
        let letter = if g % 2 == 0 { PauliLetter::X } else { PauliLetter::Z };
        let mut t = AdditiveOperator::single_letter(n, g / 2, letter);
        for (i, op) in ops.iter().enumerate() {
            if let Op::Gate { sem, at } = op {
                apply_gate_in_place(&mut t, sem, at, DEFAULT_SUMMAND_CAP).map_err(|e| match e {
                    Error::SummandCap { cap, gate, .. } => Error::SummandCap { cap, position: i + 1, gate },
                    other => other,
                })?;
            }
        }
        Ok(t)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut it = images.into_iter();
    let mut out = Vec::with_capacity(n);
    while let (Some(x), Some(z)) = (it.next(), it.next()) {
        out.push((x, z));
    }
    Ok(out)
}

/// Arrow-type semantics of a whole measurement-free program.
pub fn semantics_of_program(name: &str, p: &Program, strategy: Strategy) -> Result<GateSemantics> {
    GateSemantics::new(name, track_generators(p, strategy)?)
}

/// Outcome of [`check`].
#[derive(Clone, Debug)]
pub struct Verdict {
    pub pass: bool,
    pub inferred: QType,
    pub claimed: QType,
    /// Branches present on one side only, rendered for humans.
    pub diff: Vec<String>,
}

/// Infers, normalizes and compares with a claimed type.
pub fn check(p: &Program, init: &QType, claimed: &QType) -> Result<Verdict> {
    check_with(p, init, claimed, &InferConfig::default())
}

pub fn check_with(p: &Program, init: &QType, claimed: &QType, cfg: &InferConfig) -> Result<Verdict> {
    if claimed.num_qubits() != p.qubits {
        return Err(Error::LengthMismatch { left: p.qubits, right: claimed.num_qubits() });
    }
    let inferred = infer_with(p, init, cfg)?.output.normalized()?;
    let claimed_n = union_simplify(&claimed.normalized()?);
    let pass = types_equal(&inferred, &claimed_n);
    let mut diff = Vec::new();
    if !pass {
        for b in inferred.branches() {
            if !claimed_n.branches().iter().any(|c| branches_equal(b, c)) {
                diff.push(format!("+ inferred only: {b}"));
            }
        }
        for b in claimed_n.branches() {
            if !inferred.branches().iter().any(|c| branches_equal(b, c)) {
                diff.push(format!("- claimed only:  {b}"));
            }
        }
    }
    Ok(Verdict { pass, inferred, claimed: claimed_n, diff })
}

/// The additive type `U` itself when `U` is Hermitian (`U² ∝ I`), obtained
/// from a matrix realising the semantics, normalised to a positive leading
/// coefficient. `Ok(None)` when the gate is not Hermitian.
pub fn additive_type_of_gate(g: &GateSemantics) -> Result<Option<AdditiveOperator>> {
    if !squares_to_identity(g)? {
        return Ok(None);
    }
    let u = oracle::semantics_matrix(g, oracle::MAX_CAP)?;
    // U² = e^{2iφ} I; divide by one square root of e^{2iφ}.
    let sq = &u * &u;
    let phase = (sq[(0, 0)] / sq[(0, 0)].norm()).sqrt();
    let h = u / phase;
    let expansion = oracle::pauli_decompose(&h, Strategy::Sequential)?;
    let lead_negative = expansion.terms().first().map(|(_, c)| {
        let v = c.to_c64();
        if v.re.abs() > 1e-9 { v.re < 0.0 } else { v.im < 0.0 }
    });
    let expansion = if lead_negative == Some(true) { -&expansion } else { expansion };
    let real = expansion
        .to_real()
        .ok_or_else(|| Error::Internal(format!("Hermitian gate `{}` has a complex expansion", g.name())))?;
    if let Some((_, c)) = real.iter().find(|(_, c)| !c.is_exact()) {
        return Err(Error::OutsideRing(format!("{c} in the expansion of `{}`", g.name())));
    }
    Ok(Some(real))
}

/// Principle of deferred measurement: moves every MEAS later past gates
/// that leave the measured wire alone or use it only as a control of CNOT
/// or CZ (both diagonal on the control). Definitions are inlined first.
pub fn defer_measurements(p: &Program) -> Result<Program> {
    let ops = p.expand()?;
    let mut gates: Vec<(String, Vec<usize>)> = Vec::new();
    let mut pending: Vec<usize> = Vec::new();
    let mut out = Program::new(p.qubits);
    let commutes = |q: usize, name: &str, at: &[usize]| {
        !at.contains(&q) || (matches!(name, "CNOT" | "CZ") && at[0] == q) || (name == "CZ" && at[1] == q)
    };
    for op in &ops {
        match op {
            Op::Meas { qubit } => pending.push(*qubit),
            Op::Gate { sem, at } => {
                let wires: Vec<usize> = at.iter().map(|q| q + 1).collect();
                if let Some(pos) = pending.iter().position(|&q| !commutes(q, sem.name(), at)) {
                    // A pending measurement blocks this gate: emit it now.
                    for q in pending.drain(..=pos) {
                        for (n, w) in gates.drain(..) {
                            out.push_gate(&n, &w);
                        }
                        out = out.meas(q + 1);
                    }
                }
                gates.push((sem.name().to_string(), wires));
            }
        }
    }
    for (n, w) in gates {
        out.push_gate(&n, &w);
    }
    for q in pending {
        out = out.meas(q + 1);
    }
    Ok(out)
}

/// True when the program's statements are all measurements at the end.
pub fn measurements_are_terminal(p: &Program) -> bool {
    let mut seen = false;
    for s in &p.body {
        match s {
            Stmt::Meas { .. } => seen = true,
            Stmt::Gate { .. } if seen => return false,
            Stmt::Gate { .. } => {}
        }
    }
    true
}
