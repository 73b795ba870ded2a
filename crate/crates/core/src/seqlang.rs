//! The `.acs` cooling-sequence language.
//!
//! One operation per line, `#` starts a comment, tokens are separated by
//! whitespace:
//!
//! ```text
//! swap I J            # exchange qubits I and J
//! comp T A B          # 3-bit compression onto T using A and B
//! not I               # flip qubit I
//! perm X:Y [X:Y ...]  # transpose basis states X and Y, left to right
//! wait SECONDS        # let everything thermalize
//! wait auto LABEL     # duration chosen later by the optimizer
//! ```
//!
//! Qubit indices are 0-based; `perm` takes basis-state indices.

use std::collections::HashSet;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::config::SystemConfig;

#[derive(Debug, Clone, PartialEq)]
pub enum WaitSpec {
    Fixed(f64),
    Auto(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum OpKind {
    Swap(usize, usize),
    Comp { target: usize, a: usize, b: usize },
    Not(usize),
    Perm(Vec<(usize, usize)>),
    Wait(WaitSpec),
}

impl OpKind {
    pub fn is_wait(&self) -> bool {
        matches!(self, OpKind::Wait(_))
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpKind::Swap(i, j) => write!(f, "swap {i} {j}"),
            OpKind::Comp { target, a, b } => write!(f, "comp {target} {a} {b}"),
            OpKind::Not(i) => write!(f, "not {i}"),
            OpKind::Perm(pairs) => {
                f.write_str("perm")?;
                for (x, y) in pairs {
                    write!(f, " {x}:{y}")?;
                }
                Ok(())
            }
            OpKind::Wait(WaitSpec::Fixed(d)) => write!(f, "wait {}", format_float(*d)),
            OpKind::Wait(WaitSpec::Auto(label)) => write!(f, "wait auto {label}"),
        }
    }
}

/// An operation and the line it came from. The line number is bookkeeping
/// only and does not take part in equality.
#[derive(Debug, Clone)]
pub struct SeqOp {
    pub kind: OpKind,
    pub source_line: usize,
}

impl PartialEq for SeqOp {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Sequence {
    pub ops: Vec<SeqOp>,
}

impl Sequence {
    pub fn from_kinds(kinds: impl IntoIterator<Item = OpKind>) -> Self {
        Sequence {
            ops: kinds
                .into_iter()
                .enumerate()
                .map(|(i, kind)| SeqOp { kind, source_line: i + 1 })
                .collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    /// Auto-wait labels in order of appearance.
    pub fn free_waits(&self) -> Vec<&str> {
        self.ops
            .iter()
            .filter_map(|op| match &op.kind {
                OpKind::Wait(WaitSpec::Auto(label)) => Some(label.as_str()),
                _ => None,
            })
            .collect()
    }

    /// Replaces the auto wait `label` by a literal duration. Returns whether
    /// the label was found.
    pub fn resolve_wait(&mut self, label: &str, seconds: f64) -> bool {
        let mut found = false;
        for op in &mut self.ops {
            if matches!(&op.kind, OpKind::Wait(WaitSpec::Auto(l)) if l == label) {
                op.kind = OpKind::Wait(WaitSpec::Fixed(seconds));
                found = true;
            }
        }
        found
    }

    /// Replaces the auto waits, in order of appearance, by `durations`.
    pub fn with_durations(&self, durations: &[f64]) -> Sequence {
        let mut out = self.clone();
        let mut it = durations.iter();
        for op in &mut out.ops {
            if let OpKind::Wait(WaitSpec::Auto(_)) = op.kind {
                if let Some(&d) = it.next() {
                    op.kind = OpKind::Wait(WaitSpec::Fixed(d));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnknownKeyword,
    Arity,
    MalformedNumber,
    InvalidValue,
    DuplicateLabel,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub message: String,
}

fn err(kind: ParseErrorKind, line: usize, message: impl Into<String>) -> ParseError {
    ParseError { kind, line, message: message.into() }
}

pub fn parse_sequence(text: &str) -> Result<Sequence, ParseError> {
    let mut ops = Vec::new();
    let mut labels = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        let Some((&keyword, args)) = tokens.split_first() else {
            continue;
        };
        let kind = match keyword {
            "swap" => {
                let [i, j] = qubit_args::<2>(args, line, "swap I J")?;
                OpKind::Swap(i, j)
            }
            "comp" => {
                let [target, a, b] = qubit_args::<3>(args, line, "comp TARGET A B")?;
                if target == a || target == b || a == b {
                    return Err(err(
                        ParseErrorKind::InvalidValue,
                        line,
                        format!("comp needs three distinct qubits, got {target} {a} {b}"),
                    ));
                }
                OpKind::Comp { target, a, b }
            }
            "not" => {
                let [i] = qubit_args::<1>(args, line, "not I")?;
                OpKind::Not(i)
            }
            "perm" => {
                if args.is_empty() {
                    return Err(err(ParseErrorKind::Arity, line, "expected at least one X:Y pair after `perm`"));
                }
                let pairs = args.iter().map(|t| parse_pair(t, line)).collect::<Result<Vec<_>, _>>()?;
                OpKind::Perm(pairs)
            }
            "wait" => match args {
                ["auto", label] => {
                    if !is_ident(label) {
                        return Err(err(
                            ParseErrorKind::InvalidValue,
                            line,
                            format!("`{label}` is not a valid label"),
                        ));
                    }
                    if !labels.insert(label.to_string()) {
                        return Err(err(
                            ParseErrorKind::DuplicateLabel,
                            line,
                            format!("auto label `{label}` is already used"),
                        ));
                    }
                    OpKind::Wait(WaitSpec::Auto(label.to_string()))
                }
                ["auto"] | ["auto", _, ..] => {
                    return Err(err(ParseErrorKind::Arity, line, "expected `wait auto LABEL`"));
                }
                [value] => {
                    let d: f64 = value.parse().map_err(|_| {
                        err(ParseErrorKind::MalformedNumber, line, format!("expected a duration, found `{value}`"))
                    })?;
                    if !d.is_finite() {
                        return Err(err(ParseErrorKind::MalformedNumber, line, format!("duration `{value}` is not finite")));
                    }
                    if d < 0.0 {
                        return Err(err(ParseErrorKind::InvalidValue, line, format!("negative wait {value}")));
                    }
                    OpKind::Wait(WaitSpec::Fixed(d))
                }
                _ => return Err(err(ParseErrorKind::Arity, line, "expected `wait SECONDS` or `wait auto LABEL`")),
            },
            other => {
                return Err(err(
                    ParseErrorKind::UnknownKeyword,
                    line,
                    format!("unknown operation `{other}`, expected one of swap, comp, not, perm, wait"),
                ))
            }
        };
        ops.push(SeqOp { kind, source_line: line });
    }
    Ok(Sequence { ops })
}

fn qubit_args<const N: usize>(args: &[&str], line: usize, usage: &str) -> Result<[usize; N], ParseError> {
    if args.len() != N {
        return Err(err(
            ParseErrorKind::Arity,
            line,
            format!("expected `{usage}` ({N} arguments), found {}", args.len()),
        ));
    }
    let mut out = [0; N];
    for (slot, tok) in out.iter_mut().zip(args) {
        *slot = parse_index(tok, line)?;
    }
    Ok(out)
}

fn parse_index(tok: &str, line: usize) -> Result<usize, ParseError> {
    tok.parse()
        .map_err(|_| err(ParseErrorKind::MalformedNumber, line, format!("expected a non-negative integer, found `{tok}`")))
}

fn parse_pair(tok: &str, line: usize) -> Result<(usize, usize), ParseError> {
    let (x, y) = tok
        .split_once(':')
        .ok_or_else(|| err(ParseErrorKind::MalformedNumber, line, format!("expected X:Y, found `{tok}`")))?;
    Ok((parse_index(x, line)?, parse_index(y, line)?))
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Shortest decimal text that parses back to exactly `x`, always with a
/// decimal point or exponent.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

/// Canonical text: one operation per line, no comments.
pub fn format_sequence(seq: &Sequence) -> String {
    let mut out = String::new();
    for op in &seq.ops {
        let _ = writeln!(out, "{}", op.kind);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "line {}: {tag}: {}", self.line, self.message)
    }
}

/// Checks a sequence against a configuration. Index problems are errors;
/// gates between qubits that are not coupled (when a coupling graph is
/// declared) and self-swaps are warnings.
pub fn validate(seq: &Sequence, config: &SystemConfig) -> Vec<Diagnostic> {
    let n = config.qubits.len();
    let dim = 1usize.checked_shl(n as u32).unwrap_or(usize::MAX);
    let mut out = Vec::new();
    for op in &seq.ops {
        let line = op.source_line;
        let mut error = |message: String| out.push(Diagnostic { severity: Severity::Error, line, message });
        let qubits: Vec<usize> = match &op.kind {
            OpKind::Swap(i, j) => vec![*i, *j],
            OpKind::Comp { target, a, b } => vec![*target, *a, *b],
            OpKind::Not(i) => vec![*i],
            OpKind::Perm(pairs) => {
                for &(x, y) in pairs {
                    for v in [x, y] {
                        if v >= dim {
                            error(format!("basis index {v} out of range for {n} qubits (limit {dim})"));
                        }
                    }
                }
                vec![]
            }
            OpKind::Wait(_) => vec![],
        };
        let mut bad = false;
        for &q in &qubits {
            if q >= n {
                error(format!("qubit {q} out of range for {n} qubits"));
                bad = true;
            }
        }
        if bad {
            continue;
        }
        let warn = |out: &mut Vec<Diagnostic>, message: String| {
            out.push(Diagnostic { severity: Severity::Warning, line, message })
        };
        match &op.kind {
            OpKind::Swap(i, j) if i == j => warn(&mut out, format!("swap {i} {i} is a no-op")),
            OpKind::Swap(i, j) => {
                if let Some(false) = config.adjacent(*i, *j) {
                    warn(&mut out, format!("swap between uncoupled qubits {} and {}", config.qubits[*i].name, config.qubits[*j].name));
                }
            }
            OpKind::Comp { target, a, b } if config.coupling_edges.is_some() && !config.connected(&[*target, *a, *b]) => {
                warn(&mut out, format!(
                    "compression on qubits {}, {}, {} that are not connected by couplings",
                    config.qubits[*target].name, config.qubits[*a].name, config.qubits[*b].name
                ));
            }
            _ => {}
        }
    }
    out
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(|d| d.severity == Severity::Error)
}
