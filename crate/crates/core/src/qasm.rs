//! QASM dialect of the five-qubit composer.
//!
//! Accepted grammar (whitespace-insensitive, `//` line comments):
//!
//! ```text
//! program   := [ "OPENQASM" real ";" ] { "include" string ";" } decl* stmt*
//! decl      := ("qreg" | "creg") ident "[" int "]" ";"
//! stmt      := gate [ "(" expr { "," expr } ")" ] arg { "," arg } ";"
//!            | "measure" arg "->" arg ";"
//! arg       := ident "[" int "]"
//! expr      := [ "-" | "+" ] factor { ("*" | "/") factor }
//! factor    := number | "pi"
//! ```
//!
//! Exactly one `qreg` and one `creg` must be declared before use. Emission
//! always writes, in order: version header, include line, `qreg`, `creg`,
//! gate statements, measurements.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, GateOp, MAX_CLBITS};
use crate::gates::{GateName, GateSpec};
use crate::linalg::MAX_QUBITS;

pub const HEADER: &str = "OPENQASM 2.0;";
pub const INCLUDE: &str = "include \"qelib1.inc\";";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QasmErrorKind {
    Lexical,
    Syntax,
    UndeclaredRegister,
    IndexOverflow,
    MissingDeclaration,
    DuplicateDeclaration,
    UnknownGate,
    Arity,
    Semantic,
}

impl fmt::Display for QasmErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            QasmErrorKind::Lexical => "lexical error",
            QasmErrorKind::Syntax => "syntax error",
            QasmErrorKind::UndeclaredRegister => "undeclared register",
            QasmErrorKind::IndexOverflow => "index overflow",
            QasmErrorKind::MissingDeclaration => "missing declaration",
            QasmErrorKind::DuplicateDeclaration => "duplicate declaration",
            QasmErrorKind::UnknownGate => "unknown gate",
            QasmErrorKind::Arity => "arity error",
            QasmErrorKind::Semantic => "invalid circuit",
        };
        f.write_str(s)
    }
}

/// A diagnostic with a 1-based source position.
#[derive(Debug, Error, Clone, PartialEq, Serialize)]
#[error("{line}:{column}: {kind}: {message}")]
pub struct QasmError {
    pub kind: QasmErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl QasmError {
    fn at(kind: QasmErrorKind, pos: Pos, message: impl Into<String>) -> Self {
        Self {
            kind,
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    Real(f64),
    Str(String),
    Semi,
    Comma,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Arrow,
    Star,
    Slash,
    Minus,
    Plus,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Real(x) => format!("`{x}`"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Plus => "`+`".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, QasmError> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let ch = chars[i];
        let pos = Pos { line, column: col };
        let start = i;
        if ch == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if ch.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if ch == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let tok = if ch.is_ascii_alphabetic() || ch == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if ch.is_ascii_digit() || (ch == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            let mut real = false;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if chars.get(i) == Some(&'.') {
                real = true;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if matches!(chars.get(i), Some('e' | 'E')) {
                let mut j = i + 1;
                if matches!(chars.get(j), Some('+' | '-')) {
                    j += 1;
                }
                if chars.get(j).is_some_and(char::is_ascii_digit) {
                    real = true;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            if real {
                Tok::Real(text.parse().map_err(|_| {
                    QasmError::at(QasmErrorKind::Lexical, pos, format!("bad number `{text}`"))
                })?)
            } else {
                Tok::Int(text.parse().map_err(|_| {
                    QasmError::at(QasmErrorKind::Lexical, pos, format!("integer `{text}` too large"))
                })?)
            }
        } else if ch == '"' {
            i += 1;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                i += 1;
            }
            if chars.get(i) != Some(&'"') {
                return Err(QasmError::at(QasmErrorKind::Lexical, pos, "unterminated string"));
            }
            i += 1;
            Tok::Str(chars[start + 1..i - 1].iter().collect())
        } else {
            i += 1;
            match ch {
                ';' => Tok::Semi,
                ',' => Tok::Comma,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '+' => Tok::Plus,
                '-' if chars.get(i) == Some(&'>') => {
                    i += 1;
                    Tok::Arrow
                }
                '-' => Tok::Minus,
                other => {
                    return Err(QasmError::at(
                        QasmErrorKind::Lexical,
                        pos,
                        format!("unexpected character `{other}`"),
                    ))
                }
            }
        };
        col += i - start;
        toks.push((tok, pos));
    }
    Ok(toks)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Register {
    pub name: String,
    pub size: usize,
    pub pos: Pos,
}

/// `name[index]` with the position of the index.
#[derive(Debug, Clone, PartialEq)]
pub struct Arg {
    pub register: String,
    pub index: usize,
    pub pos: Pos,
    pub index_pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Gate {
        name: String,
        params: Vec<f64>,
        args: Vec<Arg>,
        pos: Pos,
    },
    Measure {
        qubit: Arg,
        clbit: Arg,
        pos: Pos,
    },
}

/// Parsed source before lowering to a [`Circuit`].
#[derive(Debug, Clone, PartialEq)]
pub struct QasmProgram {
    pub source: String,
    pub qreg: Register,
    pub creg: Register,
    pub statements: Vec<Statement>,
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    idx: usize,
    end: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.idx).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<(Tok, Pos)> {
        let t = self.toks.get(self.idx).cloned();
        self.idx += 1;
        t
    }

    fn unexpected(&self, wanted: &str) -> QasmError {
        let found = self
            .peek()
            .map(Tok::describe)
            .unwrap_or_else(|| "end of input".into());
        QasmError::at(QasmErrorKind::Syntax, self.pos(), format!("expected {wanted}, found {found}"))
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos, QasmError> {
        if self.peek() == Some(&tok) {
            Ok(self.next().expect("peeked").1)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), QasmError> {
        match self.peek() {
            Some(Tok::Ident(_)) => match self.next() {
                Some((Tok::Ident(s), p)) => Ok((s, p)),
                _ => unreachable!(),
            },
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn int(&mut self) -> Result<(u64, Pos), QasmError> {
        match self.peek() {
            Some(Tok::Int(_)) => match self.next() {
                Some((Tok::Int(n), p)) => Ok((n, p)),
                _ => unreachable!(),
            },
            _ => Err(self.unexpected("integer")),
        }
    }

    fn arg(&mut self) -> Result<Arg, QasmError> {
        let (register, pos) = self.ident()?;
        self.expect(Tok::LBracket)?;
        let (index, index_pos) = self.int()?;
        self.expect(Tok::RBracket)?;
        Ok(Arg {
            register,
            index: usize::try_from(index).unwrap_or(usize::MAX),
            pos,
            index_pos,
        })
    }

    fn factor(&mut self) -> Result<f64, QasmError> {
        match self.next() {
            Some((Tok::Int(n), _)) => Ok(n as f64),
            Some((Tok::Real(x), _)) => Ok(x),
            Some((Tok::Ident(s), _)) if s == "pi" => Ok(PI),
            _ => {
                self.idx -= 1;
                Err(self.unexpected("number or `pi`"))
            }
        }
    }

    fn expr(&mut self) -> Result<f64, QasmError> {
        let start = self.pos();
        let negate = match self.peek() {
            Some(Tok::Minus) => {
                self.idx += 1;
                true
            }
            Some(Tok::Plus) => {
                self.idx += 1;
                false
            }
            _ => false,
        };
        let mut value = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.idx += 1;
                    value *= self.factor()?;
                }
                Some(Tok::Slash) => {
                    self.idx += 1;
                    let p = self.pos();
                    let d = self.factor()?;
                    if d == 0.0 {
                        return Err(QasmError::at(QasmErrorKind::Syntax, p, "division by zero"));
                    }
                    value /= d;
                }
                _ => break,
            }
        }
        if !value.is_finite() {
            return Err(QasmError::at(QasmErrorKind::Syntax, start, "angle is not finite"));
        }
        Ok(if negate { -value } else { value })
    }

    fn declaration(&mut self, max: usize, min: usize) -> Result<Register, QasmError> {
        let (name, pos) = self.ident()?;
        self.expect(Tok::LBracket)?;
        let (size, size_pos) = self.int()?;
        self.expect(Tok::RBracket)?;
        self.expect(Tok::Semi)?;
        let size = usize::try_from(size).unwrap_or(usize::MAX);
        if size < min || size > max {
            return Err(QasmError::at(
                QasmErrorKind::IndexOverflow,
                size_pos,
                format!("register size {size} outside {min}..={max}"),
            ));
        }
        Ok(Register { name, size, pos })
    }
}

/// Parses source text into a positioned program.
pub fn parse_program(text: &str) -> Result<QasmProgram, QasmError> {
    let toks = lex(text)?;
    let end = {
        let line = text.lines().count().max(1);
        let column = text.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
        Pos { line, column }
    };
    let mut p = Parser { toks, idx: 0, end };
    let mut qreg: Option<Register> = None;
    let mut creg: Option<Register> = None;
    let mut statements = Vec::new();
    let mut first = true;

    while let Some(tok) = p.peek().cloned() {
        let pos = p.pos();
        let Tok::Ident(word) = tok else {
            return Err(p.unexpected("statement"));
        };
        match word.as_str() {
            "OPENQASM" => {
                if !first {
                    return Err(QasmError::at(
                        QasmErrorKind::Syntax,
                        pos,
                        "version header must be the first statement",
                    ));
                }
                p.idx += 1;
                let vpos = p.pos();
                match p.next() {
                    Some((Tok::Real(2.0), _)) => {}
                    Some((Tok::Int(2), _)) => {}
                    Some((Tok::Real(_) | Tok::Int(_), _)) => {
                        return Err(QasmError::at(
                            QasmErrorKind::Syntax,
                            vpos,
                            "only OPENQASM 2.0 is supported",
                        ))
                    }
                    _ => {
                        p.idx -= 1;
                        return Err(p.unexpected("version number"));
                    }
                }
                p.expect(Tok::Semi)?;
            }
            "include" => {
                p.idx += 1;
                match p.next() {
                    Some((Tok::Str(_), _)) => {}
                    _ => {
                        p.idx -= 1;
                        return Err(p.unexpected("file name string"));
                    }
                }
                p.expect(Tok::Semi)?;
            }
            "qreg" | "creg" => {
                p.idx += 1;
                let is_q = word == "qreg";
                let slot = if is_q { &mut qreg } else { &mut creg };
                if slot.is_some() {
                    return Err(QasmError::at(
                        QasmErrorKind::DuplicateDeclaration,
                        pos,
                        format!("only one `{word}` declaration is supported"),
                    ));
                }
                let reg = if is_q {
                    p.declaration(MAX_QUBITS, 1)?
                } else {
                    p.declaration(MAX_CLBITS, 0)?
                };
                let other = if is_q { &creg } else { &qreg };
                if other.as_ref().is_some_and(|o| o.name == reg.name) {
                    return Err(QasmError::at(
                        QasmErrorKind::DuplicateDeclaration,
                        reg.pos,
                        format!("register name `{}` already used", reg.name),
                    ));
                }
                *if is_q { &mut qreg } else { &mut creg } = Some(reg);
            }
            "measure" => {
                p.idx += 1;
                let qubit = p.arg()?;
                p.expect(Tok::Arrow)?;
                let clbit = p.arg()?;
                p.expect(Tok::Semi)?;
                check_arg(&qubit, qreg.as_ref(), creg.as_ref(), true)?;
                check_arg(&clbit, creg.as_ref(), qreg.as_ref(), false)?;
                statements.push(Statement::Measure { qubit, clbit, pos });
            }
            _ => {
                p.idx += 1;
                let mut params = Vec::new();
                if p.peek() == Some(&Tok::LParen) {
                    p.idx += 1;
                    if p.peek() != Some(&Tok::RParen) {
                        loop {
                            params.push(p.expr()?);
                            if p.peek() == Some(&Tok::Comma) {
                                p.idx += 1;
                            } else {
                                break;
                            }
                        }
                    }
                    p.expect(Tok::RParen)?;
                }
                let mut args = vec![p.arg()?];
                while p.peek() == Some(&Tok::Comma) {
                    p.idx += 1;
                    args.push(p.arg()?);
                }
                p.expect(Tok::Semi)?;
                for a in &args {
                    check_arg(a, qreg.as_ref(), creg.as_ref(), true)?;
                }
                statements.push(Statement::Gate {
                    name: word,
                    params,
                    args,
                    pos,
                });
            }
        }
        first = false;
    }

    let (qreg, creg) = match (qreg, creg) {
        (Some(q), Some(c)) => (q, c),
        (None, _) => {
            return Err(QasmError::at(
                QasmErrorKind::MissingDeclaration,
                end,
                "missing `qreg` declaration",
            ))
        }
        (_, None) => {
            return Err(QasmError::at(
                QasmErrorKind::MissingDeclaration,
                end,
                "missing `creg` declaration",
            ))
        }
    };
    Ok(QasmProgram {
        source: text.to_string(),
        qreg,
        creg,
        statements,
    })
}

fn check_arg(
    arg: &Arg,
    expected: Option<&Register>,
    other: Option<&Register>,
    quantum: bool,
) -> Result<(), QasmError> {
    let kind = if quantum { "quantum" } else { "classical" };
    match expected {
        Some(reg) if reg.name == arg.register => {
            if arg.index >= reg.size {
                Err(QasmError::at(
                    QasmErrorKind::IndexOverflow,
                    arg.index_pos,
                    format!("index {} out of range for {}[{}]", arg.index, reg.name, reg.size),
                ))
            } else {
                Ok(())
            }
        }
        _ if other.is_some_and(|o| o.name == arg.register) => Err(QasmError::at(
            QasmErrorKind::Syntax,
            arg.pos,
            format!("`{}` is not a {kind} register", arg.register),
        )),
        _ => Err(QasmError::at(
            QasmErrorKind::UndeclaredRegister,
            arg.pos,
            format!("undeclared {kind} register `{}`", arg.register),
        )),
    }
}

impl QasmProgram {
    /// Lowers the program to a circuit.
    pub fn to_circuit(&self) -> Result<Circuit, QasmError> {
        let semantic = |pos: Pos, e: CircuitError| QasmError::at(QasmErrorKind::Semantic, pos, e.to_string());
        let mut circuit = Circuit::new(self.qreg.size, self.creg.size)
            .map_err(|e| semantic(self.qreg.pos, e))?;
        for stmt in &self.statements {
            match stmt {
                Statement::Gate {
                    name,
                    params,
                    args,
                    pos,
                } => {
                    let gate: GateName = name.parse().map_err(|_| {
                        QasmError::at(QasmErrorKind::UnknownGate, *pos, format!("unknown gate `{name}`"))
                    })?;
                    let spec = GateSpec::new(gate, params.clone()).map_err(|e| {
                        QasmError::at(QasmErrorKind::Arity, *pos, e.to_string())
                    })?;
                    let qubits = args.iter().map(|a| a.index).collect();
                    let op = GateOp::new(spec, qubits)
                        .map_err(|e| QasmError::at(QasmErrorKind::Arity, *pos, e.to_string()))?;
                    circuit.append(op).map_err(|e| semantic(*pos, e))?;
                }
                Statement::Measure { qubit, clbit, pos } => {
                    circuit
                        .measure(qubit.index, clbit.index)
                        .map_err(|e| semantic(*pos, e))?;
                }
            }
        }
        Ok(circuit)
    }
}

/// Parses QASM source into a circuit.
pub fn parse(text: &str) -> Result<Circuit, QasmError> {
    parse_program(text)?.to_circuit()
}

/// `k·π/m`, evaluated exactly as the parser evaluates `k*pi/m`.
fn pi_fraction(k: f64, m: f64) -> f64 {
    k * PI / m
}

/// Renders an angle so that the parser reads back the identical `f64`.
pub fn format_angle(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    for m in 1..=64u32 {
        let m = f64::from(m);
        let k = (x.abs() * m / PI).round();
        if k == 0.0 || k > 1024.0 || pi_fraction(k, m) != x.abs() {
            continue;
        }
        let sign = if x < 0.0 { "-" } else { "" };
        let body = match (k == 1.0, m == 1.0) {
            (true, true) => "pi".to_string(),
            (true, false) => format!("pi/{m}"),
            (false, true) => format!("{k}*pi"),
            (false, false) => format!("{k}*pi/{m}"),
        };
        return format!("{sign}{body}");
    }
    format!("{x}")
}

/// Emits the canonical program text for a circuit.
pub fn emit(circuit: &Circuit) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    out.push_str(INCLUDE);
    out.push('\n');
    out.push_str(&format!("qreg q[{}];\n", circuit.n_qubits()));
    out.push_str(&format!("creg c[{}];\n", circuit.n_clbits()));
    for op in circuit.ops() {
        out.push_str(op.name().as_str());
        let params = op.spec().params();
        if !params.is_empty() {
            let rendered: Vec<String> = params.iter().map(|&p| format_angle(p)).collect();
            out.push('(');
            out.push_str(&rendered.join(","));
            out.push(')');
        }
        let args: Vec<String> = op.qubits().iter().map(|q| format!("q[{q}]")).collect();
        out.push(' ');
        out.push_str(&args.join(","));
        out.push_str(";\n");
    }
    for m in circuit.measurements() {
        out.push_str(&format!("measure q[{}] -> c[{}];\n", m.qubit, m.clbit));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const FIG5A: &str = "OPENQASM 2.0;
include \"qelib1.inc\";
qreg q[5];
creg c[5];

h q[1];
cx q[1],q[0];
measure q[0] -> c[0];
measure q[1] -> c[1];
";

    #[test]
    fn parses_bell_program() {
        let c = parse(FIG5A).unwrap();
        assert_eq!(c.n_qubits(), 5);
        assert_eq!(c.n_clbits(), 5);
        let mut expect = Circuit::new(5, 5).unwrap();
        expect.h(1).unwrap().cx(1, 0).unwrap().measure(0, 0).unwrap().measure(1, 1).unwrap();
        assert_eq!(c, expect);
    }

    #[test]
    fn x_in_blank_line_gives_second_bell_circuit() {
        let src = FIG5A.replacen("\n\nh q[1];", "\nx q[0];\nh q[1];", 1);
        let c = parse(&src).unwrap();
        assert_eq!(c.ops()[0].name(), GateName::X);
        assert_eq!(c.ops().len(), 3);
    }

    #[test]
    fn declarations_only() {
        let c = parse("qreg q[5]; creg c[5];").unwrap();
        assert!(c.ops().is_empty() && c.measurements().is_empty());
    }

    #[test]
    fn emits_canonical_text() {
        let c = parse(FIG5A).unwrap();
        let text = emit(&c);
        assert_eq!(
            text,
            "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[5];\ncreg c[5];\nh q[1];\ncx q[1],q[0];\nmeasure q[0] -> c[0];\nmeasure q[1] -> c[1];\n"
        );
        let empty = Circuit::new(5, 5).unwrap();
        assert_eq!(emit(&empty), "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[5];\ncreg c[5];\n");
    }

    #[test]
    fn pi_fraction_round_trip() {
        let mut c = Circuit::new(5, 5).unwrap();
        c.gate(GateSpec::u1(PI / 4.0).unwrap(), &[2]).unwrap();
        let text = emit(&c);
        assert!(text.contains("u1(pi/4) q[2];"), "{text}");
        let back = parse(&text).unwrap();
        let angle = back.ops()[0].spec().params()[0];
        assert!((angle - PI / 4.0).abs() <= 1e-15);
        assert_eq!(back, c);
    }

    #[test]
    fn angle_formats() {
        assert_eq!(format_angle(PI), "pi");
        assert_eq!(format_angle(-PI / 2.0), "-pi/2");
        assert_eq!(format_angle(2.0 * PI), "2*pi");
        assert_eq!(format_angle(3.0 * PI / 4.0), "3*pi/4");
        assert_eq!(format_angle(0.7), "0.7");
        assert_eq!(format_angle(0.0), "0");
        for x in [1e-300, 123456.789, -2.5e-7, 0.1 + 0.2] {
            let text = format!("u1({}) q[0];", format_angle(x));
            let c = parse(&format!("qreg q[1]; creg c[1]; {text}")).unwrap();
            assert_eq!(c.ops()[0].spec().params()[0], x);
        }
    }

    #[test]
    fn expression_forms() {
        let src = "qreg q[1]; creg c[1]; u3(pi/2, -pi, 2*pi/3) q[0]; u2(0.5, +1) q[0]; u1(1e-3) q[0];";
        let c = parse(src).unwrap();
        assert_eq!(c.ops()[0].spec().params(), &[PI / 2.0, -PI, 2.0 * PI / 3.0]);
        assert_eq!(c.ops()[1].spec().params(), &[0.5, 1.0]);
        assert_eq!(c.ops()[2].spec().params(), &[1e-3]);
    }

    #[test]
    fn comments_and_whitespace() {
        let src = "// bell\nqreg   q[2];creg c[2];\n  h q[0]; // superpose\ncx q[0] , q[1] ;";
        let c = parse(src).unwrap();
        assert_eq!(c.ops().len(), 2);
    }

    fn err(src: &str) -> QasmError {
        parse(src).unwrap_err()
    }

    #[test]
    fn diagnostics() {
        let e = err("");
        assert_eq!(e.kind, QasmErrorKind::MissingDeclaration);

        let e = err("qreg q[5];\ncreg c[5];\ncx q[9],q[0];");
        assert_eq!((e.kind, e.line, e.column), (QasmErrorKind::IndexOverflow, 3, 6));

        let e = err("qreg q[5];\ncreg c[5];\nh r[0];");
        assert_eq!((e.kind, e.line), (QasmErrorKind::UndeclaredRegister, 3));

        let e = err("qreg q[5];\ncreg c[5];\nfoo q[0];");
        assert_eq!((e.kind, e.line), (QasmErrorKind::UnknownGate, 3));

        let e = err("qreg q[5];\ncreg c[5];\nh q[0]\nx q[1];");
        assert_eq!((e.kind, e.line), (QasmErrorKind::Syntax, 4));

        let e = err("qreg q[5];\ncreg c[5];\nh $q[0];");
        assert_eq!((e.kind, e.line, e.column), (QasmErrorKind::Lexical, 3, 3));

        let e = err("qreg q[5];\ncreg c[5];\nu2(1) q[0];");
        assert_eq!((e.kind, e.line), (QasmErrorKind::Arity, 3));

        let e = err("qreg q[5];\ncreg c[5];\nmeasure q[0] -> c[0];\nh q[0];");
        assert_eq!((e.kind, e.line), (QasmErrorKind::Semantic, 4));

        let e = err("qreg q[5];\nqreg r[2];");
        assert_eq!((e.kind, e.line), (QasmErrorKind::DuplicateDeclaration, 2));

        let e = err("qreg q[5];\ncreg c[5];\nmeasure c[0] -> q[0];");
        assert_eq!((e.kind, e.line), (QasmErrorKind::Syntax, 3));

        let e = err("OPENQASM 3.0;\nqreg q[1];creg c[1];");
        assert_eq!(e.line, 1);

        let e = err("qreg q[1];\ncreg c[1];\nu1(pi/0) q[0];");
        assert_eq!(e.line, 3);
    }
}
