//! Text syntax for types and programs.
//!
//! Types: `|` separates branches, `&` separates intersection terms, `+`/`-`
//! build sums, and juxtaposition is the tensor product (scalars are 0-qubit
//! factors), so `I(-X)`, `(1/rt2)(X + Y)`, `1/2 XX` and `(1+rt2)/4 I` all
//! parse. `T@{1,3}` and `(A & B)@{1,3}` place local terms on the listed
//! wires and record the partition.
//!
//! Programs: `QUBITS n`, `INIT type`, `EXPECT type`,
//! `GATE NAME params { stmts }`, gate applications `NAME i j ...` and
//! `MEAS i`, separated by newlines or `;`; comments are `# …` and `(* … *)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::gates::canonical_gate_name;
use crate::pauli::{PauliLetter, PauliWord};
use crate::program::{Arg, GateDef, Program, Span, Stmt};
use crate::ring::{Coeff, RingCoeff};
use crate::sum::AdditiveOperator;
use crate::types::{Branch, QType};

/// Parser options.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Accept decimal and non-ring coefficients (stored inexactly).
    pub numeric: bool,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(i128),
    Float(f64),
    Ident(String),
    Sym(char),
    Sep,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str, line0: usize, col0: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (line0, col0);
    let mut i = 0;
    let err = |line, col, msg: String| Error::Syntax { line, col, msg };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let advance = |i: &mut usize, line: &mut usize, col: &mut usize| {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        };
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col);
            }
            continue;
        }
        if c == '(' && chars.get(i + 1) == Some(&'*') {
            advance(&mut i, &mut line, &mut col);
            advance(&mut i, &mut line, &mut col);
            loop {
                if i >= chars.len() {
                    return Err(err(tl, tc, "unterminated comment".into()));
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&')') {
                    advance(&mut i, &mut line, &mut col);
                    advance(&mut i, &mut line, &mut col);
                    break;
                }
                advance(&mut i, &mut line, &mut col);
            }
            continue;
        }
        if c == '\n' || c == ';' {
            out.push(Token { tok: Tok::Sep, line: tl, col: tc });
            advance(&mut i, &mut line, &mut col);
            continue;
        }
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col);
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                advance(&mut i, &mut line, &mut col);
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let save = (i, line, col);
                advance(&mut i, &mut line, &mut col);
                if i < chars.len() && (chars[i] == '-' || chars[i] == '+') {
                    advance(&mut i, &mut line, &mut col);
                }
                if i < chars.len() && chars[i].is_ascii_digit() {
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        advance(&mut i, &mut line, &mut col);
                    }
                } else {
                    (i, line, col) = save;
                }
            }
            let s: String = chars[start..i].iter().collect();
            let tok = if s.contains(['.', 'e', 'E']) {
                Tok::Float(s.parse().map_err(|_| err(tl, tc, format!("bad number `{s}`")))?)
            } else {
                Tok::Int(s.parse().map_err(|_| err(tl, tc, format!("bad integer `{s}`")))?)
            };
            out.push(Token { tok, line: tl, col: tc });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '†') {
                advance(&mut i, &mut line, &mut col);
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token { tok: Tok::Ident(s), line: tl, col: tc });
            continue;
        }
        if "()[]{}&|+-*/@,".contains(c) {
            out.push(Token { tok: Tok::Sym(c), line: tl, col: tc });
            advance(&mut i, &mut line, &mut col);
            continue;
        }
        return Err(err(tl, tc, format!("unexpected character `{c}`")));
    }
    Ok(out)
}

fn pauli_word(s: &str) -> Option<PauliWord> {
    let letters: Option<Vec<PauliLetter>> =
        s.chars().map(|c| if "IXYZ".contains(c) { PauliLetter::from_char(c) } else { None }).collect();
    letters.map(|l| PauliWord::from_letters(&l))
}

struct TypeParser<'a> {
    toks: &'a [Token],
    pos: usize,
    opts: ParseOptions,
    /// Position reported at end of input.
    end: (usize, usize),
}

/// A parsed intersection term before placement: local operator and the
/// (0-based) wires it lives on, if given.
struct Placed {
    op: AdditiveOperator,
    wires: Option<Vec<usize>>,
    line: usize,
    col: usize,
}

/// Groups of placed terms, each with an optional explicit partition.
type RawBranch = Vec<(Vec<Placed>, Option<Vec<usize>>)>;

impl<'a> TypeParser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|t| (t.line, t.col)).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (line, col) = self.here();
        Err(Error::Syntax { line, col, msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn qtype(&mut self) -> Result<Vec<RawBranch>> {
        let mut branches = vec![self.branch()?];
        while self.eat('|') {
            branches.push(self.branch()?);
        }
        Ok(branches)
    }

    /// A branch: groups separated by `&`; each group is a list of terms and
    /// an optional partition.
    fn branch(&mut self) -> Result<RawBranch> {
        let mut groups = vec![self.group()?];
        while self.eat('&') {
            groups.push(self.group()?);
        }
        Ok(groups)
    }

    fn group(&mut self) -> Result<(Vec<Placed>, Option<Vec<usize>>)> {
        if self.peek() == Some(&Tok::Sym('(')) {
            let save = self.pos;
            self.pos += 1;
            if let Ok(inner) = self.branch() {
                if self.eat(')') && self.peek() == Some(&Tok::Sym('@')) {
                    let wires = self.wires()?;
                    let terms = inner.into_iter().map(|(t, w)| {
                        if w.is_some() {
                            return Err(Error::Syntax { line: t[0].line, col: t[0].col, msg: "nested placement".into() });
                        }
                        Ok(t)
                    });
                    let mut flat = Vec::new();
                    for t in terms {
                        flat.extend(t?);
                    }
                    return Ok((flat, Some(wires)));
                }
            }
            self.pos = save;
        }
        let (line, col) = self.here();
        let op = self.sum()?;
        let wires = if self.peek() == Some(&Tok::Sym('@')) { Some(self.wires()?) } else { None };
        Ok((vec![Placed { op, wires: None, line, col }], wires))
    }

    fn wires(&mut self) -> Result<Vec<usize>> {
        self.expect('@')?;
        self.expect('{')?;
        let mut out = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Int(i)) if *i >= 1 => {
                    let q = *i as usize - 1;
                    if out.contains(&q) {
                        return self.err(format!("wire {} listed twice", q + 1));
                    }
                    out.push(q);
                    self.pos += 1;
                }
                _ => return self.err("expected a 1-based wire index"),
            }
            if !self.eat(',') {
                break;
            }
        }
        self.expect('}')?;
        Ok(out)
    }

    fn sum(&mut self) -> Result<AdditiveOperator> {
        let neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let mut acc = self.prod()?;
        if neg {
            acc = -&acc;
        }
        loop {
            let sign = if self.eat('+') {
                false
            } else if self.eat('-') {
                true
            } else {
                break;
            };
            let (line, col) = self.here();
            let t = self.prod()?;
            if t.num_qubits() != acc.num_qubits() {
                return Err(Error::Syntax {
                    line,
                    col,
                    msg: format!("cannot add {}-qubit and {}-qubit operators", acc.num_qubits(), t.num_qubits()),
                });
            }
            acc = if sign { &acc - &t } else { &acc + &t };
        }
        Ok(acc)
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Some(Tok::Int(_) | Tok::Float(_) | Tok::Ident(_) | Tok::Sym('(')))
    }

    fn prod(&mut self) -> Result<AdditiveOperator> {
        if !self.starts_factor() {
            return self.err("expected a coefficient or a Pauli word");
        }
        let mut acc = self.factor()?;
        while self.starts_factor() {
            // `(`…`)@{` belongs to the enclosing group, never to a product.
            let f = self.factor()?;
            acc = acc.tensor(&f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<AdditiveOperator> {
        let mut acc = self.atom()?;
        while self.peek() == Some(&Tok::Sym('/')) {
            self.pos += 1;
            let (line, col) = self.here();
            let d = self.atom()?;
            if d.num_qubits() != 0 {
                return Err(Error::Syntax { line, col, msg: "division by an operator".into() });
            }
            let c = d.coefficient(&PauliWord::identity(0));
            let inv = c.inv().ok_or_else(|| Error::Syntax { line, col, msg: "division by zero".into() })?;
            if !inv.is_exact() && c.is_exact() && !self.opts.numeric {
                return Err(Error::OutsideRing(format!("1/({c}) (use numeric mode)")));
            }
            acc = acc.scale(inv);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<AdditiveOperator> {
        let (line, col) = self.here();
        let Some(tok) = self.peek().cloned() else {
            return self.err("unexpected end of type");
        };
        self.pos += 1;
        match tok {
            Tok::Int(i) => Ok(AdditiveOperator::scalar(0, Coeff::Exact(RingCoeff::from_int(i)))),
            Tok::Float(v) => {
                if !self.opts.numeric {
                    return Err(Error::OutsideRing(format!("decimal coefficient {v} (use numeric mode)")));
                }
                Ok(AdditiveOperator::scalar(0, Coeff::Approx(v)))
            }
            Tok::Ident(s) if s == "rt2" || s == "sqrt2" => Ok(AdditiveOperator::scalar(0, Coeff::Exact(RingCoeff::SQRT2))),
            Tok::Ident(s) => match pauli_word(&s) {
                Some(w) => Ok(AdditiveOperator::single(w, Coeff::ONE)),
                None => Err(Error::Syntax { line, col, msg: format!("`{s}` is not a Pauli word") }),
            },
            Tok::Sym('(') => {
                let s = self.sum()?;
                self.expect(')')?;
                Ok(s)
            }
            Tok::Sym('-') => Ok(-&self.atom()?),
            other => Err(Error::Syntax { line, col, msg: format!("unexpected {}", describe(&other)) }),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(i) => format!("integer {i}"),
        Tok::Float(v) => format!("number {v}"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::Sep => "end of statement".into(),
    }
}

fn build_type(
    raw: Vec<RawBranch>,
    qubits: Option<usize>,
) -> Result<QType> {
    // Width: declared, else the widest wire list / unplaced term.
    let mut n = qubits.unwrap_or(0);
    if qubits.is_none() {
        for groups in &raw {
            for (terms, wires) in groups {
                match wires {
                    Some(w) => n = n.max(w.iter().max().map_or(0, |m| m + 1)),
                    None => {
                        for t in terms {
                            n = n.max(t.op.num_qubits());
                        }
                    }
                }
            }
        }
    }
    let mut branches = Vec::new();
    for groups in raw {
        let mut terms = Vec::new();
        let mut partitions = Vec::new();
        for (group, wires) in groups {
            for t in group {
                let placed = match &wires {
                    Some(w) => {
                        if t.op.num_qubits() != w.len() {
                            return Err(Error::Syntax {
                                line: t.line,
                                col: t.col,
                                msg: format!("{}-qubit term placed on {} wires", t.op.num_qubits(), w.len()),
                            });
                        }
                        if let Some(&q) = w.iter().find(|&&q| q >= n) {
                            return Err(Error::IndexOutOfRange { index: q + 1, qubits: n });
                        }
                        t.op.embed(n, w)
                    }
                    None => {
                        if t.op.num_qubits() != n {
                            return Err(Error::Syntax {
                                line: t.line,
                                col: t.col,
                                msg: format!("term `{}` has {} qubits, expected {n}", t.op, t.op.num_qubits()),
                            });
                        }
                        t.op
                    }
                };
                let _ = t.wires;
                if placed.is_empty() {
                    return Err(Error::Syntax { line: t.line, col: t.col, msg: "term is zero".into() });
                }
                if !placed.is_pauli() && !placed.is_valid_additive() {
                    return Err(Error::InvalidAdditive(placed.to_string()));
                }
                terms.push(placed);
            }
            if let Some(w) = wires {
                partitions.push(w);
            }
        }
        branches.push(Branch::new(n, terms).with_partitions(partitions));
    }
    QType::new(branches)
}

fn parse_type_tokens(toks: &[Token], qubits: Option<usize>, opts: ParseOptions, end: (usize, usize)) -> Result<QType> {
    let mut p = TypeParser { toks, pos: 0, opts, end };
    if toks.is_empty() {
        return p.err("empty type");
    }
    let raw = p.qtype()?;
    if p.pos != toks.len() {
        return p.err(format!("unexpected {} after type", describe(&toks[p.pos].tok)));
    }
    build_type(raw, qubits)
}

/// Parses a type; the width comes from its words (or wire lists).
pub fn parse_type(text: &str) -> Result<QType> {
    parse_type_with(text, None, ParseOptions::default())
}

/// Parses a type with an optional fixed width and options.
pub fn parse_type_with(text: &str, qubits: Option<usize>, opts: ParseOptions) -> Result<QType> {
    let toks: Vec<Token> = lex(text, 1, 1)?.into_iter().filter(|t| t.tok != Tok::Sep).collect();
    let end = (1, text.chars().count() + 1);
    parse_type_tokens(&toks, qubits, opts, end)
}

/// Parses a Pauli-sum expression without the unitary/Hermitian check, e.g.
/// `1/2 I + 1/2 Z` or `X(1/2 I + 1/2 Z)`.
pub fn parse_sum(text: &str) -> Result<AdditiveOperator> {
    parse_sum_with(text, ParseOptions::default())
}

pub fn parse_sum_with(text: &str, opts: ParseOptions) -> Result<AdditiveOperator> {
    let toks: Vec<Token> = lex(text, 1, 1)?.into_iter().filter(|t| t.tok != Tok::Sep).collect();
    let mut p = TypeParser { toks: &toks, pos: 0, opts, end: (1, text.chars().count() + 1) };
    let s = p.sum()?;
    if p.pos != toks.len() {
        return p.err(format!("unexpected {} after expression", describe(&toks[p.pos].tok)));
    }
    Ok(s)
}

/// Parses a single intersection term (operator).
pub fn parse_operator(text: &str) -> Result<AdditiveOperator> {
    let t = parse_type(text)?;
    match (t.branches(), t.branches().first().map(|b| b.terms().len())) {
        ([b], Some(1)) => Ok(b.terms()[0].clone()),
        _ => Err(Error::Syntax { line: 1, col: 1, msg: format!("`{text}` is not a single operator") }),
    }
}

/// A parsed source file.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceFile {
    pub program: Program,
    pub init: Option<QType>,
    pub expect: Option<QType>,
}

impl SourceFile {
    /// The declared input type, or `Z` on every wire (`|0…0⟩`).
    pub fn init_or_default(&self) -> QType {
        self.init.clone().unwrap_or_else(|| {
            let n = self.program.qubits;
            let terms = (0..n).map(|q| AdditiveOperator::single_letter(n, q, PauliLetter::Z)).collect();
            QType::single(Branch::new(n, terms))
        })
    }
}

struct ProgramParser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl ProgramParser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (line, col) = self.peek().map(|t| (t.line, t.col)).unwrap_or(self.end);
        Err(Error::Syntax { line, col, msg: msg.into() })
    }

    fn skip_seps(&mut self) {
        while matches!(self.peek(), Some(Token { tok: Tok::Sep, .. })) {
            self.pos += 1;
        }
    }

    fn end_stmt(&mut self) -> Result<()> {
        match self.peek() {
            None | Some(Token { tok: Tok::Sep, .. }) | Some(Token { tok: Tok::Sym('}'), .. }) => Ok(()),
            Some(t) => {
                let d = describe(&t.tok);
                self.err(format!("unexpected {d}; expected end of statement"))
            }
        }
    }

    fn until_sep(&mut self) -> Vec<Token> {
        let start = self.pos;
        while !matches!(self.peek(), None | Some(Token { tok: Tok::Sep, .. })) {
            self.pos += 1;
        }
        self.toks[start..self.pos].to_vec()
    }

    fn stmt(&mut self, name: String, span: Span) -> Result<Stmt> {
        let mut args = Vec::new();
        loop {
            match self.peek().map(|t| t.tok.clone()) {
                Some(Tok::Int(i)) => {
                    if i < 1 {
                        return self.err("wire indices are 1-based");
                    }
                    args.push(Arg::Index(i as usize));
                    self.pos += 1;
                }
                Some(Tok::Ident(s)) => {
                    args.push(Arg::Param(s));
                    self.pos += 1;
                }
                _ => break,
            }
        }
        self.end_stmt()?;
        if name == "MEAS" {
            if args.len() != 1 {
                return Err(Error::Arity { gate: "MEAS".into(), expected: 1, got: args.len() });
            }
            return Ok(Stmt::Meas { qubit: args.remove(0), span });
        }
        if args.is_empty() {
            return Err(Error::Syntax { line: span.line, col: span.col, msg: format!("`{name}` needs wire arguments") });
        }
        Ok(Stmt::Gate { name, args, span })
    }
}

/// Parses a program file.
pub fn parse_program(text: &str) -> Result<SourceFile> {
    parse_program_with(text, ParseOptions::default())
}

pub fn parse_program_with(text: &str, opts: ParseOptions) -> Result<SourceFile> {
    let toks = lex(text, 1, 1)?;
    let last_line = text.lines().count().max(1);
    let mut p = ProgramParser { toks, pos: 0, end: (last_line, text.lines().last().map_or(1, |l| l.chars().count() + 1)) };
    let mut qubits: Option<usize> = None;
    let mut init_toks = None;
    let mut expect_toks = None;
    let mut defs: Vec<GateDef> = Vec::new();
    let mut body = Vec::new();
    loop {
        p.skip_seps();
        let Some(tok) = p.peek().cloned() else { break };
        let span = Span { line: tok.line, col: tok.col };
        let Tok::Ident(word) = tok.tok else {
            return p.err(format!("unexpected {}; expected a declaration or statement", describe(&tok.tok)));
        };
        p.pos += 1;
        let key = word.to_ascii_uppercase();
        match key.as_str() {
            "QUBITS" => {
                if qubits.is_some() {
                    return Err(Error::Syntax { line: span.line, col: span.col, msg: "QUBITS declared twice".into() });
                }
                match p.peek().map(|t| t.tok.clone()) {
                    Some(Tok::Int(n)) if n >= 1 => {
                        qubits = Some(n as usize);
                        p.pos += 1;
                    }
                    _ => return p.err("QUBITS needs a positive integer"),
                }
                p.end_stmt()?;
            }
            "INIT" | "EXPECT" => {
                let t = p.until_sep();
                if t.is_empty() {
                    return p.err(format!("{key} needs a type"));
                }
                let slot = if key == "INIT" { &mut init_toks } else { &mut expect_toks };
                if slot.is_some() {
                    return Err(Error::Syntax { line: span.line, col: span.col, msg: format!("{key} declared twice") });
                }
                *slot = Some((t, span));
            }
            "GATE" => {
                let name = match p.peek().map(|t| t.tok.clone()) {
                    Some(Tok::Ident(n)) => {
                        p.pos += 1;
                        canonical_gate_name(&n)
                    }
                    _ => return p.err("GATE needs a name"),
                };
                let mut params = Vec::new();
                while let Some(Tok::Ident(s)) = p.peek().map(|t| t.tok.clone()) {
                    if params.contains(&s) {
                        return p.err(format!("parameter `{s}` repeated"));
                    }
                    params.push(s);
                    p.pos += 1;
                }
                p.skip_seps();
                if !matches!(p.peek(), Some(Token { tok: Tok::Sym('{'), .. })) {
                    return p.err("expected `{` to open the gate body");
                }
                p.pos += 1;
                let mut gbody = Vec::new();
                loop {
                    p.skip_seps();
                    match p.peek().cloned() {
                        Some(Token { tok: Tok::Sym('}'), .. }) => {
                            p.pos += 1;
                            break;
                        }
                        Some(Token { tok: Tok::Ident(s), line, col }) => {
                            p.pos += 1;
                            let n = canonical_gate_name(&s);
                            gbody.push(p.stmt(n, Span { line, col })?);
                        }
                        Some(t) => return p.err(format!("unexpected {} in gate body", describe(&t.tok))),
                        None => return p.err("unterminated gate body"),
                    }
                }
                if defs.iter().any(|d| d.name == name) {
                    return Err(Error::Syntax { line: span.line, col: span.col, msg: format!("gate `{name}` defined twice") });
                }
                defs.push(GateDef { name, params, body: gbody });
                p.end_stmt()?;
            }
            _ => {
                let name = canonical_gate_name(&word);
                let s = p.stmt(name, span)?;
                body.push(s);
            }
        }
    }
    let parse_decl = |slot: Option<(Vec<Token>, Span)>, n: Option<usize>| -> Result<Option<QType>> {
        match slot {
            None => Ok(None),
            Some((t, span)) => {
                let end = t.last().map(|t| (t.line, t.col + 1)).unwrap_or((span.line, span.col));
                parse_type_tokens(&t, n, opts, end).map(Some)
            }
        }
    };
    let init = parse_decl(init_toks, qubits)?;
    let n = match (qubits, &init) {
        (Some(n), _) => n,
        (None, Some(t)) => t.num_qubits(),
        (None, None) => return Err(Error::Syntax { line: 1, col: 1, msg: "missing QUBITS declaration".into() }),
    };
    let expect = parse_decl(expect_toks, Some(n))?;
    let program = Program { qubits: n, defs, body };
    program.expand()?;
    Ok(SourceFile { program, init, expect })
}

fn fmt_args(f: &mut fmt::Formatter<'_>, args: &[Arg]) -> fmt::Result {
    for a in args {
        match a {
            Arg::Index(i) => write!(f, " {i}")?,
            Arg::Param(p) => write!(f, " {p}")?,
        }
    }
    Ok(())
}

fn fmt_stmt(f: &mut fmt::Formatter<'_>, s: &Stmt, indent: &str) -> fmt::Result {
    match s {
        Stmt::Gate { name, args, .. } => {
            write!(f, "{indent}{name}")?;
            fmt_args(f, args)?;
        }
        Stmt::Meas { qubit, .. } => {
            write!(f, "{indent}MEAS")?;
            fmt_args(f, std::slice::from_ref(qubit))?;
        }
    }
    writeln!(f)
}

impl fmt::Display for SourceFile {
    /// Canonical rendering; parsing it back yields the same file.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QUBITS {}", self.program.qubits)?;
        if let Some(t) = &self.init {
            writeln!(f, "INIT {t}")?;
        }
        for d in &self.program.defs {
            write!(f, "GATE {}", d.name)?;
            for p in &d.params {
                write!(f, " {p}")?;
            }
            writeln!(f, " {{")?;
            for s in &d.body {
                fmt_stmt(f, s, "  ")?;
            }
            writeln!(f, "}}")?;
        }
        for s in &self.program.body {
            fmt_stmt(f, s, "")?;
        }
        if let Some(t) = &self.expect {
            writeln!(f, "EXPECT {t}")?;
        }
        Ok(())
    }
}

/// Renders a program body alone (no declarations besides QUBITS).
pub fn print_program(p: &Program) -> String {
    SourceFile { program: p.clone(), init: None, expect: None }.to_string()
}

/// Parses a comma- or space-separated list of 1-based wires into 0-based
/// indices.
pub fn parse_wire_list(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (i, part) in s.split([',', ' ']).filter(|p| !p.is_empty()).enumerate() {
        let q: usize = part
            .trim()
            .parse()
            .map_err(|_| Error::Syntax { line: 1, col: i + 1, msg: format!("bad wire `{part}`") })?;
        if q == 0 {
            return Err(Error::Syntax { line: 1, col: i + 1, msg: "wire indices are 1-based".into() });
        }
        out.push(q - 1);
    }
    Ok(out)
}
