//! Straight-line quantum programs: gate applications and z-basis
//! measurements over 1-based wires, with named composite gates that are
//! expanded by inlining.

use std::collections::HashMap;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::gates::{builtin_semantics, canonical_gate_name, inverse_builtin_name, GateSemantics};

/// A wire reference: a literal 1-based index or a parameter of the enclosing
/// composite definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arg {
    Index(usize),
    Param(String),
}

/// Source position (1-based line and column).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    Gate { name: String, args: Vec<Arg>, span: Span },
    Meas { qubit: Arg, span: Span },
}

/// `GATE NAME params { body }`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateDef {
    pub name: String,
    pub params: Vec<String>,
    pub body: Vec<Stmt>,
}

/// A program over `qubits` wires.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub qubits: usize,
    pub defs: Vec<GateDef>,
    pub body: Vec<Stmt>,
}

/// A fully expanded operation with 0-based wires.
#[derive(Clone, Debug)]
pub enum Op {
    Gate { sem: Arc<GateSemantics>, at: SmallVec<[usize; 3]> },
    Meas { qubit: usize },
}

impl Op {
    pub fn name(&self) -> &str {
        match self {
            Op::Gate { sem, .. } => sem.name(),
            Op::Meas { .. } => "MEAS",
        }
    }
}

impl Program {
    pub fn new(qubits: usize) -> Self {
        Program { qubits, defs: Vec::new(), body: Vec::new() }
    }

    /// Appends a gate on 1-based wires.
    pub fn gate(mut self, name: &str, wires: &[usize]) -> Self {
        self.push_gate(name, wires);
        self
    }

    pub fn push_gate(&mut self, name: &str, wires: &[usize]) {
        self.body.push(Stmt::Gate {
            name: canonical_gate_name(name),
            args: wires.iter().map(|&w| Arg::Index(w)).collect(),
            span: Span::default(),
        });
    }

    /// Appends a z-basis measurement of a 1-based wire.
    pub fn meas(mut self, wire: usize) -> Self {
        self.body.push(Stmt::Meas { qubit: Arg::Index(wire), span: Span::default() });
        self
    }

    /// Appends every statement of `other` (definitions are merged).
    pub fn then(mut self, other: &Program) -> Self {
        for d in &other.defs {
            if !self.defs.iter().any(|e| e.name == d.name) {
                self.defs.push(d.clone());
            }
        }
        self.body.extend(other.body.iter().cloned());
        self
    }

    pub fn define(mut self, def: GateDef) -> Self {
        self.defs.push(def);
        self
    }

    pub fn len(&self) -> usize {
        self.body.len()
    }

    pub fn is_empty(&self) -> bool {
        self.body.is_empty()
    }

    /// Inlines composite gates and resolves built-in semantics.
    pub fn expand(&self) -> Result<Vec<Op>> {
        let defs: HashMap<String, &GateDef> = self.defs.iter().map(|d| (canonical_gate_name(&d.name), d)).collect();
        check_acyclic(&defs)?;
        let mut out = Vec::with_capacity(self.body.len());
        let mut cache: HashMap<String, Arc<GateSemantics>> = HashMap::new();
        for stmt in &self.body {
            expand_stmt(stmt, &HashMap::new(), &defs, self.qubits, &mut cache, &mut out)?;
        }
        Ok(out)
    }

    /// Number of T/T† gates after expansion.
    pub fn t_count(&self) -> Result<usize> {
        Ok(self
            .expand()?
            .iter()
            .filter(|op| matches!(op.name(), "T" | "TDG"))
            .count())
    }

    /// Total number of expanded gate applications.
    pub fn gate_count(&self) -> Result<usize> {
        Ok(self.expand()?.iter().filter(|op| matches!(op, Op::Gate { .. })).count())
    }

    /// Reversed program with every gate inverted (built-ins only, no MEAS).
    pub fn inverse(&self) -> Result<Program> {
        let ops = self.expand()?;
        let mut p = Program::new(self.qubits);
        for op in ops.iter().rev() {
            match op {
                Op::Gate { sem, at } => {
                    let inv = inverse_builtin_name(sem.name())
                        .ok_or_else(|| Error::Unsupported(format!("no inverse for gate `{}`", sem.name())))?;
                    let wires: Vec<usize> = at.iter().map(|q| q + 1).collect();
                    p.push_gate(inv, &wires);
                }
                Op::Meas { .. } => return Err(Error::Unsupported("cannot invert a measurement".into())),
            }
        }
        Ok(p)
    }

    /// True when a MEAS statement occurs anywhere (body or definitions).
    pub fn contains_measurement(&self) -> bool {
        fn has(stmts: &[Stmt]) -> bool {
            stmts.iter().any(|s| matches!(s, Stmt::Meas { .. }))
        }
        has(&self.body) || self.defs.iter().any(|d| has(&d.body))
    }
}

fn check_acyclic(defs: &HashMap<String, &GateDef>) -> Result<()> {
    fn visit(
        name: &str,
        defs: &HashMap<String, &GateDef>,
        state: &mut HashMap<String, u8>,
    ) -> Result<()> {
        match state.get(name) {
            Some(1) => return Err(Error::CyclicDefinition(name.to_string())),
            Some(2) => return Ok(()),
            _ => {}
        }
        let Some(def) = defs.get(name) else {
            return Ok(());
        };
        state.insert(name.to_string(), 1);
        for s in &def.body {
            if let Stmt::Gate { name: callee, .. } = s {
                visit(&canonical_gate_name(callee), defs, state)?;
            }
        }
        state.insert(name.to_string(), 2);
        Ok(())
    }
    let mut state = HashMap::new();
    for name in defs.keys() {
        visit(name, defs, &mut state)?;
    }
    Ok(())
}

fn resolve(arg: &Arg, env: &HashMap<String, usize>, qubits: usize, span: Span) -> Result<usize> {
    let idx = match arg {
        Arg::Index(i) => *i,
        Arg::Param(p) => *env.get(p).ok_or_else(|| Error::Syntax {
            line: span.line,
            col: span.col,
            msg: format!("unbound wire parameter `{p}`"),
        })?,
    };
    if idx == 0 || idx > qubits {
        return Err(Error::IndexOutOfRange { index: idx, qubits });
    }
    Ok(idx)
}

fn expand_stmt(
    stmt: &Stmt,
    env: &HashMap<String, usize>,
    defs: &HashMap<String, &GateDef>,
    qubits: usize,
    cache: &mut HashMap<String, Arc<GateSemantics>>,
    out: &mut Vec<Op>,
) -> Result<()> {
    match stmt {
        Stmt::Meas { qubit, span } => {
            let q = resolve(qubit, env, qubits, *span)?;
            out.push(Op::Meas { qubit: q - 1 });
        }
        Stmt::Gate { name, args, span } => {
            let key = canonical_gate_name(name);
            let wires = args
                .iter()
                .map(|a| resolve(a, env, qubits, *span))
                .collect::<Result<Vec<_>>>()?;
            for (i, w) in wires.iter().enumerate() {
                if wires[..i].contains(w) {
                    return Err(Error::RepeatedQubit(*w));
                }
            }
            if let Some(def) = defs.get(&key) {
                if def.params.len() != wires.len() {
                    return Err(Error::Arity { gate: def.name.clone(), expected: def.params.len(), got: wires.len() });
                }
                let inner: HashMap<String, usize> =
                    def.params.iter().cloned().zip(wires.iter().copied()).collect();
                for s in &def.body {
                    expand_stmt(s, &inner, defs, qubits, cache, out)?;
                }
                return Ok(());
            }
            let sem = match cache.get(&key) {
                Some(s) => s.clone(),
                None => {
                    let s = builtin_semantics(&key)?;
                    cache.insert(key.clone(), s.clone());
                    s
                }
            };
            if sem.arity() != wires.len() {
                return Err(Error::Arity { gate: key, expected: sem.arity(), got: wires.len() });
            }
            out.push(Op::Gate { sem, at: wires.iter().map(|w| w - 1).collect() });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composite_gates_inline() {
        let def = GateDef {
            name: "BELL".into(),
            params: vec!["a".into(), "b".into()],
            body: vec![
                Stmt::Gate { name: "H".into(), args: vec![Arg::Param("a".into())], span: Span::default() },
                Stmt::Gate {
                    name: "CNOT".into(),
                    args: vec![Arg::Param("a".into()), Arg::Param("b".into())],
                    span: Span::default(),
                },
            ],
        };
        let p = Program::new(3).define(def).gate("bell", &[2, 3]);
        let ops = p.expand().unwrap();
        assert_eq!(ops.len(), 2);
        match &ops[1] {
            Op::Gate { sem, at } => {
                assert_eq!(sem.name(), "CNOT");
                assert_eq!(at.as_slice(), &[1, 2]);
            }
            _ => panic!("expected gate"),
        }
    }

    #[test]
    fn index_errors() {
        assert!(matches!(Program::new(2).gate("H", &[3]).expand(), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(Program::new(2).gate("FOO", &[1]).expand(), Err(Error::UnknownGate(_))));
        assert!(matches!(Program::new(2).gate("CNOT", &[1, 1]).expand(), Err(Error::RepeatedQubit(1))));
    }

    #[test]
    fn cycles_are_rejected() {
        let a = GateDef {
            name: "A".into(),
            params: vec!["q".into()],
            body: vec![Stmt::Gate { name: "B".into(), args: vec![Arg::Param("q".into())], span: Span::default() }],
        };
        let b = GateDef {
            name: "B".into(),
            params: vec!["q".into()],
            body: vec![Stmt::Gate { name: "A".into(), args: vec![Arg::Param("q".into())], span: Span::default() }],
        };
        let p = Program::new(1).define(a).define(b).gate("A", &[1]);
        assert!(matches!(p.expand(), Err(Error::CyclicDefinition(_))));
    }

    #[test]
    fn inverse_reverses_and_daggers() {
        let p = Program::new(2).gate("H", &[1]).gate("T", &[2]).gate("CNOT", &[1, 2]);
        let inv = p.inverse().unwrap();
        let names: Vec<String> = inv.expand().unwrap().iter().map(|o| o.name().to_string()).collect();
        assert_eq!(names, ["CNOT", "TDG", "H"]);
    }
}
