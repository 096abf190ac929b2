//! The `qtype` command line.
//!
//! [`run`] never exits the process: it returns the exit status and the
//! rendered output, so the binary and the tests share one code path.
//!
//! Exit status: 0 pass, 1 check failure, 2 usage or parse error, 3 analysis
//! outside the supported fragment.

use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use qtype_core::exec::Strategy;
use qtype_core::fuzz;
use qtype_core::gates::{builtin_semantics, canonical_gate_name, multi_controlled_z, tcount_lower_bound, GateSemantics};
use qtype_core::infer::{check_with, infer_with, semantics_of_program, track_generators, Inference, InferConfig};
use qtype_core::oracle::{self, TOLERANCES};
use qtype_core::pauli::PauliLetter;
use qtype_core::program::{Op, Program};
use qtype_core::qecc::conjugate;
use qtype_core::report::{branch_json, outcome_json, type_json, Report, Status};
use qtype_core::sum::AdditiveOperator;
use qtype_core::synth::{clifford_from_stabilizers, prep_clifford_plus_t};
use qtype_core::syntax::{parse_program_with, parse_type_with, parse_wire_list, ParseOptions, SourceFile};
use qtype_core::types::{separable_subset, QType};
use qtype_core::Error;

#[derive(Debug, Parser)]
#[command(name = "qtype", version, about = "Static type analysis for quantum programs")]
pub struct Cli {
    /// Print the machine-readable report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Accept decimal and non-ring coefficients in types (stored inexactly).
    #[arg(long, global = true)]
    pub numeric: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Infer the output type of a program.
    Infer {
        file: PathBuf,
        /// Show the type after every statement.
        #[arg(long)]
        trace: bool,
        /// Print the normal form of the result.
        #[arg(long)]
        normalize: bool,
    },
    /// Compare the inferred type with the file's EXPECT clause.
    Check {
        file: PathBuf,
        /// Compare the raw inferred text instead of normal forms.
        #[arg(long)]
        strict: bool,
    },
    /// Normal form of a type.
    Normalize {
        #[arg(value_name = "TYPE", allow_hyphen_values = true)]
        ty: String,
    },
    /// Whether a set of qubits splits off a single-branch type.
    Separable {
        #[arg(value_name = "TYPE", allow_hyphen_values = true)]
        ty: String,
        /// Comma-separated 1-based qubits.
        #[arg(long, value_name = "LIST")]
        qubits: String,
    },
    /// Infer through MEAS statements and report outcome probabilities.
    Measure {
        file: PathBuf,
        /// Keep zero-probability outcomes.
        #[arg(long)]
        keep_impossible: bool,
    },
    /// T-count lower bound of a program file or a gate (`T`, `CCZ`, `C4Z`, …).
    Tbound {
        #[arg(value_name = "FILE|GATE")]
        target: String,
    },
    /// Synthesize a preparation circuit from |0…0⟩ for a type.
    Synth {
        #[arg(value_name = "TYPE", allow_hyphen_values = true)]
        ty: String,
    },
    /// Cross-check inference against dense simulation.
    Verify {
        file: PathBuf,
        /// Use the dense-matrix oracle (the only backend).
        #[arg(long)]
        oracle: bool,
        /// Seed for sampled input states and probe operators.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A finished command: its report and the text rendering.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub text: String,
}

impl Outcome {
    fn new(report: Report, text: impl Into<String>) -> Self {
        Outcome { report, text: text.into() }
    }

    fn error(command: &str, e: &Error) -> Self {
        let status = if e.is_unsupported() { Status::Unsupported } else { Status::Error };
        let report = Report { diagnostics: vec![e.to_string()], ..Report::new(command, status) };
        let label = if e.is_unsupported() { "unsupported" } else { "error" };
        Outcome::new(report, format!("{label}: {e}"))
    }

    pub fn exit_code(&self) -> i32 {
        self.report.exit_code()
    }
}

/// Everything the binary needs to finish.
#[derive(Clone, Debug)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Output { code: 0, stdout: text, stderr: String::new() },
                _ => Output { code: 2, stdout: String::new(), stderr: text },
            };
        }
    };
    let outcome = execute(&cli);
    let code = outcome.exit_code();
    if cli.json {
        return Output { code, stdout: outcome.report.to_json(), stderr: String::new() };
    }
    let mut text = outcome.text;
    if !text.ends_with('\n') {
        text.push('\n');
    }
    if matches!(outcome.report.verdict, Status::Error | Status::Unsupported) {
        Output { code, stdout: String::new(), stderr: text }
    } else {
        Output { code, stdout: text, stderr: String::new() }
    }
}

/// Runs a parsed command.
pub fn execute(cli: &Cli) -> Outcome {
    let opts = ParseOptions { numeric: cli.numeric };
    let (name, result) = match &cli.command {
        Command::Infer { file, trace, normalize } => ("infer", cmd_infer(file, opts, *trace, *normalize)),
        Command::Check { file, strict } => ("check", cmd_check(file, opts, *strict)),
        Command::Normalize { ty } => ("normalize", cmd_normalize(ty, opts)),
        Command::Separable { ty, qubits } => ("separable", cmd_separable(ty, qubits, opts)),
        Command::Measure { file, keep_impossible } => ("measure", cmd_measure(file, opts, *keep_impossible)),
        Command::Tbound { target } => ("tbound", cmd_tbound(target, opts)),
        Command::Synth { ty } => ("synth", cmd_synth(ty, opts)),
        Command::Verify { file, oracle, seed } => ("verify", cmd_verify(file, opts, *oracle, *seed)),
    };
    result.unwrap_or_else(|e| Outcome::error(name, &e))
}

fn load(path: &Path, opts: ParseOptions) -> Result<SourceFile, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    parse_program_with(&text, opts)
}

fn trace_json(inf: &Inference) -> Vec<Value> {
    inf.trace.iter().map(|s| json!({ "position": s.position, "op": s.op, "type": type_json(&s.output) })).collect()
}

fn probabilities_json(inf: &Inference) -> Value {
    Value::Array(
        inf.measurements
            .iter()
            .map(|m| json!({ "position": m.position, "outcomes": m.outcomes.iter().map(outcome_json).collect::<Vec<_>>() }))
            .collect(),
    )
}

fn cmd_infer(file: &Path, opts: ParseOptions, trace: bool, normalize: bool) -> Result<Outcome, Error> {
    let src = load(file, opts)?;
    let cfg = InferConfig { trace, ..InferConfig::default() };
    let inf = infer_with(&src.program, &src.init_or_default(), &cfg)?;
    let out = if normalize { inf.output.normalized()? } else { inf.output.clone() };
    let mut text = String::new();
    for s in &inf.trace {
        text.push_str(&format!("{:>4}  {:<8} {}\n", s.position, s.op, s.output));
    }
    text.push_str(&out.to_string());
    let report = Report {
        inferred: Some(type_json(&out)),
        trace: trace.then(|| trace_json(&inf)),
        probabilities: (!inf.measurements.is_empty()).then(|| probabilities_json(&inf)),
        ..Report::new("infer", Status::Pass)
    };
    Ok(Outcome::new(report, text))
}

fn cmd_check(file: &Path, opts: ParseOptions, strict: bool) -> Result<Outcome, Error> {
    let src = load(file, opts)?;
    let expect = src.expect.clone().ok_or_else(|| Error::Invalid(format!("{}: no EXPECT clause", file.display())))?;
    let init = src.init_or_default();
    let (pass, inferred, expected, diagnostics) = if strict {
        let raw = infer_with(&src.program, &init, &InferConfig::default())?.output;
        let pass = raw.to_string() == expect.to_string();
        let diag = if pass { Vec::new() } else { vec![format!("+ inferred: {raw}"), format!("- expected: {expect}")] };
        (pass, raw, expect, diag)
    } else {
        let v = check_with(&src.program, &init, &expect, &InferConfig::default())?;
        (v.pass, v.inferred, v.claimed, v.diff)
    };
    let mut text = if pass { format!("PASS  {inferred}") } else { format!("FAIL\n  inferred: {inferred}\n  expected: {expected}") };
    for d in &diagnostics {
        text.push_str(&format!("\n  {d}"));
    }
    let report = Report {
        inferred: Some(type_json(&inferred)),
        expected: Some(type_json(&expected)),
        diagnostics,
        ..Report::new("check", if pass { Status::Pass } else { Status::Fail })
    };
    Ok(Outcome::new(report, text))
}

fn cmd_normalize(ty: &str, opts: ParseOptions) -> Result<Outcome, Error> {
    let t = parse_type_with(ty, None, opts)?.normalized()?;
    let report = Report { inferred: Some(type_json(&t)), diagnostics: t.lint(), ..Report::new("normalize", Status::Pass) };
    Ok(Outcome::new(report, t.to_string()))
}

fn single_branch(ty: &str, opts: ParseOptions) -> Result<QType, Error> {
    let t = parse_type_with(ty, None, opts)?;
    if t.branches().len() != 1 {
        return Err(Error::Invalid(format!("expected a single branch, got {} (`|`-separated)", t.branches().len())));
    }
    Ok(t)
}

fn cmd_separable(ty: &str, qubits: &str, opts: ParseOptions) -> Result<Outcome, Error> {
    let t = single_branch(ty, opts)?;
    let k = parse_wire_list(qubits)?;
    let n = t.num_qubits();
    if let Some(&q) = k.iter().find(|&&q| q >= n) {
        return Err(Error::IndexOutOfRange { index: q + 1, qubits: n });
    }
    let s = separable_subset(&t.branches()[0], &k)?;
    let mut report = Report { inferred: Some(branch_json(&s.branch)), ..Report::new("separable", Status::Pass) };
    if s.separable {
        return Ok(Outcome::new(report, s.branch.to_string()));
    }
    let reason = s.reason.unwrap_or_else(|| "no witness".into());
    report.verdict = Status::Fail;
    report.diagnostics.push(reason.clone());
    Ok(Outcome::new(report, format!("not separable: {reason}")))
}

fn cmd_measure(file: &Path, opts: ParseOptions, keep_impossible: bool) -> Result<Outcome, Error> {
    let src = load(file, opts)?;
    let cfg = InferConfig { keep_impossible, ..InferConfig::default() };
    let inf = infer_with(&src.program, &src.init_or_default(), &cfg)?;
    let mut text = String::new();
    for m in &inf.measurements {
        for o in &m.outcomes {
            text.push_str(&format!("MEAS {} (statement {})\n", o.qubit + 1, m.position));
            for b in &o.branches {
                let p = b.probability.as_ref().map_or("?".to_string(), ToString::to_string);
                text.push_str(&format!("  {} p = {:<8} {}\n", if b.sign > 0 { '+' } else { '-' }, p, b.branch));
            }
        }
    }
    let mut report = Report {
        inferred: Some(type_json(&inf.output)),
        probabilities: Some(probabilities_json(&inf)),
        ..Report::new("measure", Status::Pass)
    };
    if inf.measurements.is_empty() {
        report.diagnostics.push("program has no MEAS statements".into());
    }
    text.push_str(&inf.output.to_string());
    Ok(Outcome::new(report, text))
}

/// `CCZ`, `CZ` and `C<k>Z` name multi-controlled Z gates.
fn controlled_z_arity(name: &str) -> Option<usize> {
    match name {
        "CZ" => Some(1),
        "CCZ" => Some(2),
        _ => name.strip_prefix('C')?.strip_suffix('Z')?.parse().ok().filter(|&k| k >= 1),
    }
}

fn gate_by_name(name: &str) -> Result<GateSemantics, Error> {
    let canon = canonical_gate_name(name);
    match controlled_z_arity(&canon) {
        Some(k) => multi_controlled_z(k),
        None => Ok((*builtin_semantics(&canon)?).clone()),
    }
}

fn cmd_tbound(target: &str, opts: ParseOptions) -> Result<Outcome, Error> {
    let path = Path::new(target);
    let g = if path.is_file() {
        let src = load(path, opts)?;
        if src.program.contains_measurement() {
            return Err(Error::Invalid("tbound needs a measurement-free program".into()));
        }
        let name = path.file_stem().map_or("P".into(), |s| s.to_string_lossy().into_owned());
        semantics_of_program(&name, &src.program, Strategy::Parallel)?
    } else {
        gate_by_name(target)?
    };
    let bound = tcount_lower_bound(&g)?;
    let report = Report { tbound: Some(bound), ..Report::new("tbound", Status::Pass) };
    Ok(Outcome::new(report, bound.to_string()))
}

fn cmd_synth(ty: &str, opts: ParseOptions) -> Result<Outcome, Error> {
    let t = single_branch(ty, opts)?;
    let b = &t.branches()[0];
    let r = if b.is_gottesman() { clifford_from_stabilizers(&b.pauli_terms()?)? } else { prep_clifford_plus_t(b)? };
    let gates = r.circuit.gate_count()?;
    let tcount = r.circuit.t_count()?;
    let file = SourceFile { program: r.circuit, init: None, expect: Some(r.certificate.claimed.clone()) };
    let text = file.to_string();
    let report = Report {
        inferred: Some(type_json(&r.certificate.inferred)),
        expected: Some(type_json(&r.certificate.claimed)),
        diagnostics: r.certificate.diff.clone(),
        output: Some(json!({ "circuit": text, "gates": gates, "t_count": tcount })),
        ..Report::new("synth", if r.certificate.pass { Status::Pass } else { Status::Fail })
    };
    Ok(Outcome::new(report, text))
}

/// Probe operators checked per `verify` run besides the generators.
const VERIFY_PROBES: usize = 8;

fn cmd_verify(file: &Path, opts: ParseOptions, use_oracle: bool, seed: u64) -> Result<Outcome, Error> {
    if !use_oracle {
        return Err(Error::Invalid("verify needs a backend: pass --oracle".into()));
    }
    let src = load(file, opts)?;
    let p = &src.program;
    let n = p.qubits;
    if n > oracle::MAX_CAP {
        return Err(Error::OracleCap { qubits: n, cap: oracle::MAX_CAP });
    }
    let init = src.init_or_default();
    let inf = infer_with(p, &init, &InferConfig::default())?;
    let mut rng = fuzz::rng(seed);
    let mut failures = Vec::new();

    // Heisenberg arrows of the gate part against its dense unitary.
    let mut gates = Program::new(n);
    for op in p.expand()? {
        if let Op::Gate { sem, at } = op {
            let wires: Vec<usize> = at.iter().map(|q| q + 1).collect();
            gates.push_gate(sem.name(), &wires);
        }
    }
    let u = oracle::program_matrix(&gates, oracle::MAX_CAP)?;
    let mut arrows = 0;
    let mut check_arrow = |from: &AdditiveOperator, to: &AdditiveOperator| -> Result<(), Error> {
        arrows += 1;
        if !oracle::verify_arrow_matrix(&u, from, to, TOLERANCES.eq)? {
            failures.push(format!("arrow {from} -> {to} disagrees with the unitary"));
        }
        Ok(())
    };
    for (j, (x, z)) in track_generators(&gates, Strategy::Parallel)?.iter().enumerate() {
        check_arrow(&AdditiveOperator::single_letter(n, j, PauliLetter::X), x)?;
        check_arrow(&AdditiveOperator::single_letter(n, j, PauliLetter::Z), z)?;
    }
    for _ in 0..VERIFY_PROBES {
        let probe = AdditiveOperator::from_pauli(&fuzz::hermitian_pauli(&mut rng, n))
            .ok_or_else(|| Error::Internal("probe is not Hermitian".into()))?;
        check_arrow(&probe, &conjugate(&gates, &probe)?)?;
    }

    // Sampled inhabitants of every input branch land in the inferred type,
    // and the first measurement's probabilities match the Born rule.
    let mut states = 0;
    for (i, b) in init.branches().iter().enumerate() {
        let Some(s) = oracle::sample_eigenstate(b, oracle::MAX_CAP, &mut rng)? else {
            failures.push(format!("input branch {} is uninhabited", i + 1));
            continue;
        };
        let leaves = oracle::run_measured(p, &s)?;
        for leaf in &leaves {
            states += 1;
            if !oracle::verify_inhabitation(&leaf.state, &inf.output, TOLERANCES.eq)? {
                failures.push(format!("outcome history {:?} leaves the inferred type", leaf.signs));
            }
        }
        let Some(first) = inf.measurements.first() else { continue };
        if init.branches().len() != 1 || first.outcomes.len() != 1 {
            continue;
        }
        for sign in [1i8, -1] {
            let born: f64 = leaves.iter().filter(|l| l.signs[0] == sign).map(|l| l.probability).sum();
            if let Some(pr) = first.outcomes[0].probability(sign) {
                if (pr.to_f64() - born).abs() > TOLERANCES.eq {
                    failures.push(format!("p{} = {pr} but the oracle gives {born}", if sign > 0 { '+' } else { '-' }));
                }
            }
        }
    }

    let pass = failures.is_empty();
    let summary = format!("{arrows} arrows, {states} sampled states (seed {seed})");
    let mut text = format!("{}  {summary}", if pass { "PASS" } else { "FAIL" });
    for f in &failures {
        text.push_str(&format!("\n  {f}"));
    }
    let report = Report {
        inferred: Some(type_json(&inf.output)),
        diagnostics: failures,
        output: Some(json!({ "arrows": arrows, "states": states, "seed": seed })),
        ..Report::new("verify", if pass { Status::Pass } else { Status::Fail })
    };
    Ok(Outcome::new(report, text))
}
