//! Stabilizer codes: validation, logical types, encoder checks and
//! transversality of physical programs.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gates::{apply_gate, GateSemantics};
use crate::infer::{check, Verdict};
use crate::pauli::{dependency_witness, PauliGroup, PauliLetter, PauliString, PauliWord};
use crate::program::{Op, Program};
use crate::sum::AdditiveOperator;
use crate::types::{Branch, QType};

/// A stabilizer code encoding one logical qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerCode {
    n: usize,
    generators: Vec<PauliString>,
    logical_x: PauliString,
    logical_z: PauliString,
}

/// Which logical state a [`logical_type`] describes (`I` = whole codespace).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogicalBasis {
    X,
    Y,
    Z,
    I,
}

impl FromStr for LogicalBasis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().trim_end_matches("_L").to_ascii_uppercase().as_str() {
            "X" => Ok(LogicalBasis::X),
            "Y" => Ok(LogicalBasis::Y),
            "Z" => Ok(LogicalBasis::Z),
            "I" => Ok(LogicalBasis::I),
            other => Err(Error::Invalid(format!("unknown logical basis `{other}`"))),
        }
    }
}

impl StabilizerCode {
    /// Validates the code invariants: generators commute pairwise, are
    /// independent and commute with both logicals; the logicals anticommute.
    pub fn new(n: usize, generators: Vec<PauliString>, logical_x: PauliString, logical_z: PauliString) -> Result<Self> {
        let all: Vec<&PauliString> = generators.iter().chain([&logical_x, &logical_z]).collect();
        for p in &all {
            if p.num_qubits() != n {
                return Err(Error::LengthMismatch { left: n, right: p.num_qubits() });
            }
            if !p.is_hermitian() {
                return Err(Error::NotPauli(p.to_string()));
            }
        }
        for (i, a) in generators.iter().enumerate() {
            for b in generators[i + 1..].iter().chain([&logical_x, &logical_z]) {
                if !a.word().commutes(b.word()) {
                    return Err(Error::Invalid(format!("{a} anticommutes with {b}")));
                }
            }
        }
        if let Some((idx, phase)) = dependency_witness(&generators) {
            let names: Vec<String> = idx.iter().map(|i| format!("g{}", i + 1)).collect();
            let value = if phase == 2 { "-I" } else { "I" };
            return Err(Error::Invalid(format!("generators are dependent: {} = {value}", names.join("·"))));
        }
        if logical_x.word().commutes(logical_z.word()) {
            return Err(Error::Invalid(format!("logicals {logical_x} and {logical_z} commute")));
        }
        let group = PauliGroup::generated_by(n, &generators);
        for l in [&logical_x, &logical_z] {
            if group.contains_up_to_phase(l.word()) {
                return Err(Error::Invalid(format!("logical {l} lies in the stabilizer group")));
            }
        }
        Ok(StabilizerCode { n, generators, logical_x, logical_z })
    }

    /// The [[7,1,3]] Steane code.
    pub fn steane() -> Self {
        let p = |s: &str| s.parse::<PauliString>().expect("literal");
        let gens = ["IIIXXXX", "IXXIIXX", "XIXIXIX", "IIIZZZZ", "IZZIIZZ", "ZIZIZIZ"].map(p).to_vec();
        StabilizerCode::new(7, gens, p("XXXXXXX"), p("ZZZZZZZ")).expect("the Steane code is valid")
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn logical_x(&self) -> &PauliString {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &PauliString {
        &self.logical_z
    }

    /// `Ȳ = i·X̄·Z̄`.
    pub fn logical_y(&self) -> PauliString {
        (&self.logical_x * &self.logical_z).mul_phase(1)
    }

    pub fn logical(&self, basis: LogicalBasis) -> Option<PauliString> {
        match basis {
            LogicalBasis::X => Some(self.logical_x.clone()),
            LogicalBasis::Y => Some(self.logical_y()),
            LogicalBasis::Z => Some(self.logical_z.clone()),
            LogicalBasis::I => None,
        }
    }

    pub fn stabilizer_group(&self) -> PauliGroup {
        PauliGroup::generated_by(self.n, &self.generators)
    }
}

impl FromStr for StabilizerCode {
    type Err = Error;

    /// Code file: `N <int>`, `GEN <word>` (repeatable), `LOGX <word>`,
    /// `LOGZ <word>`; `#` starts a comment.
    fn from_str(text: &str) -> Result<Self> {
        let mut n = None;
        let mut gens = Vec::new();
        let (mut lx, mut lz) = (None, None);
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Syntax { line: ln + 1, col: 1, msg };
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap_or_default().to_ascii_uppercase();
            let val = parts.next().ok_or_else(|| err(format!("`{key}` needs a value")))?;
            if parts.next().is_some() {
                return Err(err(format!("trailing input after `{key} {val}`")));
            }
            let pauli = |v: &str| {
                v.parse::<PauliString>().map_err(|e| err(e.to_string()))
            };
            match key.as_str() {
                "N" => n = Some(val.parse::<usize>().map_err(|_| err(format!("bad qubit count `{val}`")))?),
                "GEN" => gens.push(pauli(val)?),
                "LOGX" => lx = Some(pauli(val)?),
                "LOGZ" => lz = Some(pauli(val)?),
                other => return Err(err(format!("unknown code directive `{other}`"))),
            }
        }
        let lx = lx.ok_or_else(|| Error::Invalid("code file lacks LOGX".into()))?;
        let lz = lz.ok_or_else(|| Error::Invalid("code file lacks LOGZ".into()))?;
        let n = n.unwrap_or(lx.num_qubits());
        StabilizerCode::new(n, gens, lx, lz)
    }
}

impl fmt::Display for StabilizerCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "N {}", self.n)?;
        for g in &self.generators {
            writeln!(f, "GEN {g}")?;
        }
        writeln!(f, "LOGX {}", self.logical_x)?;
        write!(f, "LOGZ {}", self.logical_z)
    }
}

/// `St ∩ L̄` for the chosen logical basis (`St` alone for `I`).
pub fn logical_type(code: &StabilizerCode, basis: LogicalBasis) -> Branch {
    let mut terms = code.generators.clone();
    terms.extend(code.logical(basis));
    Branch::from_paulis(code.n, &terms)
}

/// `(St ⊗ I) ∩ (I ⊗ St) ∩ (Ā ⊗ B̄)`; an `I` factor contributes `I` to the
/// logical term, and `I ⊗ I` contributes no logical term at all.
pub fn logical_tensor(code: &StabilizerCode, a: LogicalBasis, b: LogicalBasis) -> Branch {
    let n = code.n;
    let id = PauliString::identity(n);
    let mut terms: Vec<PauliString> = code.generators.iter().map(|g| g.tensor(&id)).collect();
    terms.extend(code.generators.iter().map(|g| id.tensor(g)));
    let (la, lb) = (code.logical(a), code.logical(b));
    if la.is_some() || lb.is_some() {
        terms.push(la.unwrap_or_else(|| id.clone()).tensor(&lb.unwrap_or(id)));
    }
    Branch::from_paulis(2 * n, &terms)
}

/// Runs an encoder on `L_data ∩ Z_others` (data on wire `data`, 0-based) and
/// compares with the normalized logical type.
pub fn encoder_check(p: &Program, code: &StabilizerCode, basis: LogicalBasis, data: usize) -> Result<Verdict> {
    let n = code.n;
    if p.qubits != n {
        return Err(Error::LengthMismatch { left: n, right: p.qubits });
    }
    if data >= n {
        return Err(Error::IndexOutOfRange { index: data + 1, qubits: n });
    }
    let mut init = Vec::new();
    let letter = match basis {
        LogicalBasis::X => Some(PauliLetter::X),
        LogicalBasis::Y => Some(PauliLetter::Y),
        LogicalBasis::Z => Some(PauliLetter::Z),
        LogicalBasis::I => None,
    };
    if let Some(l) = letter {
        init.push(PauliString::single(n, data, l));
    }
    init.extend((0..n).filter(|&q| q != data).map(|q| PauliString::single(n, q, PauliLetter::Z)));
    let init = QType::single(Branch::from_paulis(n, &init));
    check(p, &init, &QType::single(logical_type(code, basis)))
}

/// Conjugates one operator through a measurement-free program.
pub fn conjugate(p: &Program, op: &AdditiveOperator) -> Result<AdditiveOperator> {
    let mut t = op.clone();
    for o in p.expand()? {
        match o {
            Op::Gate { sem, at } => t = apply_gate(&t, &sem, &at)?,
            Op::Meas { .. } => return Err(Error::Unsupported("transversality of a measurement".into())),
        }
    }
    Ok(t)
}

/// Why a transversality check failed.
#[derive(Clone, Debug, PartialEq)]
pub enum TransversalityDefect {
    /// A generator's image is a non-trivial additive type.
    AdditiveEscape { generator: String, image: String },
    /// A generator's image is a Pauli outside the stabilizer group (or in it
    /// with sign −1).
    LeavesCodespace { generator: String, image: String },
    /// A logical image equals minus the expected logical, e.g. `X_L -> -Y_L`.
    SignDefect { witness: String },
    /// A logical image is neither ± the expected logical modulo stabilizers.
    WrongLogical { logical: String, image: String, expected: String },
}

impl fmt::Display for TransversalityDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransversalityDefect::AdditiveEscape { generator, image } => {
                write!(f, "{generator} escapes the Pauli group: image {image}")
            }
            TransversalityDefect::LeavesCodespace { generator, image } => {
                write!(f, "{generator} maps outside the stabilizer group: image {image}")
            }
            TransversalityDefect::SignDefect { witness } => write!(f, "sign defect: {witness}"),
            TransversalityDefect::WrongLogical { logical, image, expected } => {
                write!(f, "{logical} maps to {image}, expected {expected}")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct TransversalityVerdict {
    pub pass: bool,
    pub defects: Vec<TransversalityDefect>,
}

fn logical_name(w: &PauliWord) -> String {
    let s = w.to_string();
    format!("{s}_L")
}

/// Physical operator of a logical Pauli word (one letter per block).
fn materialize_word(code: &StabilizerCode, w: &PauliWord) -> PauliString {
    let blocks = w.num_qubits();
    let mut out = PauliString::identity(0);
    for b in 0..blocks {
        let factor = match w.get(b) {
            PauliLetter::I => PauliString::identity(code.n),
            PauliLetter::X => code.logical_x.clone(),
            PauliLetter::Y => code.logical_y(),
            PauliLetter::Z => code.logical_z.clone(),
        };
        out = out.tensor(&factor);
    }
    out
}

/// Checks that `p` (acting on `k` blocks of the code) preserves the
/// codespace and implements the `k`-qubit logical gate `target`.
pub fn transversality_check(code: &StabilizerCode, p: &Program, target: &GateSemantics) -> Result<TransversalityVerdict> {
    let blocks = target.arity();
    let total = code.n * blocks;
    if p.qubits != total {
        return Err(Error::LengthMismatch { left: total, right: p.qubits });
    }
    let id = PauliString::identity(code.n);
    let place = |b: usize, s: &PauliString| -> PauliString {
        (0..blocks).fold(PauliString::identity(0), |acc, j| acc.tensor(if j == b { s } else { &id }))
    };
    let mut gens = Vec::new();
    for b in 0..blocks {
        for (i, g) in code.generators.iter().enumerate() {
            let name = if blocks == 1 { format!("g{}", i + 1) } else { format!("g{} (block {})", i + 1, b + 1) };
            gens.push((name, place(b, g)));
        }
    }
    let group = PauliGroup::generated_by(total, gens.iter().map(|(_, g)| g));
    let mut defects = Vec::new();
    for (name, g) in &gens {
        let op = AdditiveOperator::from_pauli(g).expect("Hermitian generator");
        let img = conjugate(p, &op)?;
        match img.as_pauli() {
            None => defects.push(TransversalityDefect::AdditiveEscape { generator: name.clone(), image: img.to_string() }),
            Some(ps) => {
                if group.membership(&ps) != Some(true) {
                    defects.push(TransversalityDefect::LeavesCodespace { generator: name.clone(), image: ps.to_string() });
                }
            }
        }
    }
    for j in 0..blocks {
        for (letter, expected) in [(PauliLetter::X, target.image_x(j)), (PauliLetter::Z, target.image_z(j))] {
            let lw = PauliWord::single(blocks, j, letter);
            let physical = materialize_word(code, &lw);
            let op = AdditiveOperator::from_pauli(&physical).expect("Hermitian logical");
            let img = conjugate(p, &op)?;
            let Some(exp) = expected.as_pauli() else {
                // Non-Clifford target: compare the materialized sum exactly.
                let mut want = AdditiveOperator::zero(total);
                for (w, c) in expected.iter() {
                    let phys = AdditiveOperator::from_pauli(&materialize_word(code, w)).expect("Hermitian logical");
                    want = &want + &phys.scale(*c);
                }
                if img != want {
                    defects.push(TransversalityDefect::WrongLogical {
                        logical: logical_name(&lw),
                        image: img.to_string(),
                        expected: want.to_string(),
                    });
                }
                continue;
            };
            let exp_phys = materialize_word(code, exp.word());
            let exp_phys = if exp.is_negative() { exp_phys.negate() } else { exp_phys };
            let Some(img_p) = img.as_pauli() else {
                defects.push(TransversalityDefect::AdditiveEscape {
                    generator: logical_name(&lw),
                    image: img.to_string(),
                });
                continue;
            };
            let prod = &img_p * &exp_phys;
            match group.membership(&prod) {
                Some(true) => {}
                Some(false) => {
                    let sign = if exp.is_negative() { "" } else { "-" };
                    defects.push(TransversalityDefect::SignDefect {
                        witness: format!("{} -> {sign}{}", logical_name(&lw), logical_name(exp.word())),
                    });
                }
                None => defects.push(TransversalityDefect::WrongLogical {
                    logical: logical_name(&lw),
                    image: img_p.to_string(),
                    expected: format!("{}{}", if exp.is_negative() { "-" } else { "" }, logical_name(exp.word())),
                }),
            }
        }
    }
    Ok(TransversalityVerdict { pass: defects.is_empty(), defects })
}

/// `gate` applied to every qubit of `blocks` blocks (for two-qubit gates,
/// qubit `i` of block 1 with qubit `i` of block 2).
pub fn transversal_program(code: &StabilizerCode, gates: &[&str], blocks: usize) -> Program {
    let n = code.n;
    let mut p = Program::new(n * blocks);
    for g in gates {
        for q in 1..=n {
            if blocks == 2 {
                p.push_gate(g, &[q, q + n]);
            } else {
                p.push_gate(g, &[q]);
            }
        }
    }
    p
}

/// The Steane encoder with the data qubit on wire 1.
pub fn steane_encoder() -> Program {
    let mut p = Program::new(7);
    for (g, w) in [
        ("CNOT", vec![1, 2]),
        ("CNOT", vec![1, 3]),
        ("H", vec![5]),
        ("H", vec![6]),
        ("H", vec![7]),
        ("CNOT", vec![7, 4]),
        ("CNOT", vec![7, 2]),
        ("CNOT", vec![7, 1]),
        ("CNOT", vec![6, 4]),
        ("CNOT", vec![6, 3]),
        ("CNOT", vec![6, 1]),
        ("CNOT", vec![5, 4]),
        ("CNOT", vec![5, 3]),
        ("CNOT", vec![5, 2]),
    ] {
        p.push_gate(g, &w);
    }
    p
}

/// Sign of `Ȳ²` (must be `+I`): true when `(iX̄Z̄)² = I`.
pub fn logical_y_squares_to_identity(code: &StabilizerCode) -> bool {
    let y = code.logical_y();
    let sq = &y * &y;
    sq.word().is_identity() && sq.phase() == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::builtin_semantics;

    #[test]
    fn steane_is_valid_and_y_is_minus_y7() {
        let c = StabilizerCode::steane();
        assert_eq!(c.logical_y(), "-YYYYYYY".parse().unwrap());
        assert!(logical_y_squares_to_identity(&c));
    }

    #[test]
    fn invalid_codes_are_rejected() {
        let p = |s: &str| s.parse::<PauliString>().unwrap();
        assert!(StabilizerCode::new(2, vec![p("XX"), p("ZZ")], p("XI"), p("ZI")).is_err());
        assert!(StabilizerCode::new(1, vec![], p("X"), p("Z")).is_ok());
    }

    #[test]
    fn encoder() {
        let c = StabilizerCode::steane();
        let e = steane_encoder();
        assert!(encoder_check(&e, &c, LogicalBasis::Z, 0).unwrap().pass);
        assert!(encoder_check(&e, &c, LogicalBasis::X, 0).unwrap().pass);
        assert!(!encoder_check(&Program::new(7), &c, LogicalBasis::Z, 0).unwrap().pass);
    }

    #[test]
    fn transversal_gates() {
        let c = StabilizerCode::steane();
        let h = builtin_semantics("H").unwrap();
        let s = builtin_semantics("S").unwrap();
        let t = builtin_semantics("T").unwrap();
        let cnot = builtin_semantics("CNOT").unwrap();
        assert!(transversality_check(&c, &transversal_program(&c, &["H"], 1), &h).unwrap().pass);
        let v = transversality_check(&c, &transversal_program(&c, &["S"], 1), &s).unwrap();
        assert_eq!(v.defects, vec![TransversalityDefect::SignDefect { witness: "X_L -> -Y_L".into() }]);
        assert!(transversality_check(&c, &transversal_program(&c, &["Z", "S"], 1), &s).unwrap().pass);
        let v = transversality_check(&c, &transversal_program(&c, &["T"], 1), &t).unwrap();
        assert!(!v.pass);
        assert!(matches!(&v.defects[0], TransversalityDefect::AdditiveEscape { generator, .. } if generator == "g1"));
        assert!(transversality_check(&c, &transversal_program(&c, &["CNOT"], 2), &cnot).unwrap().pass);
    }

    #[test]
    fn logical_tensor_sizes() {
        let c = StabilizerCode::steane();
        assert_eq!(logical_tensor(&c, LogicalBasis::X, LogicalBasis::I).terms().len(), 13);
        assert_eq!(logical_tensor(&c, LogicalBasis::I, LogicalBasis::I).terms().len(), 12);
    }

    #[test]
    fn code_file_round_trip() {
        let c = StabilizerCode::steane();
        assert_eq!(c.to_string().parse::<StabilizerCode>().unwrap(), c);
    }
}
