//! Circuit files, oracle adapters and the command-line front end.
//!
//! A circuit file looks like
//!
//! ```text
//! # two terms over F_1481
//! field p=1481
//! params n=2 d=82 r=2 s=2 delta=1
//! term coeff=2 poly=1*x1+1*x2
//! term coeff=3 poly=1*x1+2*x2
//! ```
//!
//! `params` may omit `r`, `s` and `delta`; when present they are enforced.
//! Polynomials are `+`-separated products of an optional integer and
//! factors `x<i>` or `x<i>^<e>`, joined by `*`.

pub mod cli;
mod oracle;

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::field::{FpElem, PrimeField};
use crate::poly::{ExponentVector, SparsePoly};
use crate::reconstruct::{PowCircuitMulti, PowerTermMulti};

pub use oracle::{evaluate_circuit, OracleHandle};

/// What went wrong in a circuit file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    InvalidField(String),
    ZeroCoefficient,
    ZeroBase,
    VariableOutOfRange { var: usize, n: usize },
    DegreeExceedsBound { degree: usize, delta: usize },
    SparsityExceedsBound { sparsity: usize, s: usize },
    TooManyTerms { terms: usize, r: usize },
    AssociateBases { first: usize, second: usize },
}

impl ParseErrorKind {
    /// Stable code for each kind.
    pub fn code(&self) -> &'static str {
        match self {
            ParseErrorKind::Syntax(_) => "E01",
            ParseErrorKind::InvalidField(_) => "E02",
            ParseErrorKind::ZeroCoefficient => "E03",
            ParseErrorKind::ZeroBase => "E04",
            ParseErrorKind::VariableOutOfRange { .. } => "E05",
            ParseErrorKind::DegreeExceedsBound { .. } => "E06",
            ParseErrorKind::SparsityExceedsBound { .. } => "E07",
            ParseErrorKind::TooManyTerms { .. } => "E08",
            ParseErrorKind::AssociateBases { .. } => "E09",
        }
    }
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            ParseErrorKind::InvalidField(msg) => write!(f, "invalid field: {msg}"),
            ParseErrorKind::ZeroCoefficient => write!(f, "coefficient is zero modulo p"),
            ParseErrorKind::ZeroBase => write!(f, "term base is the zero polynomial"),
            ParseErrorKind::VariableOutOfRange { var, n } => write!(f, "variable x{var} outside x1..x{n}"),
            ParseErrorKind::DegreeExceedsBound { degree, delta } => {
                write!(f, "base degree {degree} exceeds delta = {delta}")
            }
            ParseErrorKind::SparsityExceedsBound { sparsity, s } => {
                write!(f, "base has {sparsity} monomials, more than s = {s}")
            }
            ParseErrorKind::TooManyTerms { terms, r } => write!(f, "{terms} terms, more than r = {r}"),
            ParseErrorKind::AssociateBases { first, second } => {
                write!(f, "bases of terms {first} and {second} are scalar multiples")
            }
        }
    }
}

/// A [`ParseErrorKind`] with its 1-based position.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{}:{}: [{}] {kind}", .line, .column, .kind.code())]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

/// A parsed and validated circuit file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitDoc {
    pub field: PrimeField,
    pub n: usize,
    pub d: usize,
    pub r: Option<usize>,
    pub s: Option<usize>,
    pub delta: Option<usize>,
    pub terms: Vec<(FpElem, SparsePoly)>,
}

impl CircuitDoc {
    /// The document of a circuit, with the given declared bounds.
    pub fn from_circuit(c: &PowCircuitMulti, r: Option<usize>, s: Option<usize>, delta: Option<usize>) -> Self {
        CircuitDoc {
            field: c.field(),
            n: c.n(),
            d: c.d(),
            r,
            s,
            delta,
            terms: c.terms().iter().map(|t| (t.lambda, t.base.clone())).collect(),
        }
    }

    pub fn to_circuit(&self) -> PowCircuitMulti {
        let terms = self
            .terms
            .iter()
            .map(|(c, b)| PowerTermMulti { lambda: *c, base: b.clone() })
            .collect();
        PowCircuitMulti::new(self.field, self.n, self.d, terms).expect("validated at parse time")
    }

    /// Declared bounds, or the measured ones where a bound is absent.
    /// Measured values are at least 1.
    pub fn bounds(&self) -> (usize, usize, usize) {
        let r = self.r.unwrap_or(self.terms.len()).max(1);
        let s = self.s.unwrap_or_else(|| self.terms.iter().map(|(_, b)| b.sparsity()).max().unwrap_or(1)).max(1);
        let delta = self
            .delta
            .unwrap_or_else(|| self.terms.iter().filter_map(|(_, b)| b.degree()).max().unwrap_or(1))
            .max(1);
        (r, s, delta)
    }

    /// The same document with terms normalized and sorted as in
    /// [`PowCircuitMulti`].
    pub fn canonical(&self) -> Self {
        Self::from_circuit(&self.to_circuit(), self.r, self.s, self.delta)
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        writeln!(out, "field p={}", self.field.modulus()).expect("string write");
        write!(out, "params n={} d={}", self.n, self.d).expect("string write");
        for (name, v) in [("r", self.r), ("s", self.s), ("delta", self.delta)] {
            if let Some(v) = v {
                write!(out, " {name}={v}").expect("string write");
            }
        }
        out.push('\n');
        for (c, b) in &self.terms {
            writeln!(out, "term coeff={c} poly={b}").expect("string write");
        }
        out
    }
}

struct Cursor<'a> {
    line: usize,
    text: &'a str,
    /// Byte offset of `text` within the line.
    offset: usize,
}

impl Cursor<'_> {
    fn err(&self, at: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { line: self.line, column: self.offset + at + 1, kind }
    }

    fn syntax(&self, at: usize, msg: impl Into<String>) -> ParseError {
        self.err(at, ParseErrorKind::Syntax(msg.into()))
    }
}

/// Splits `key=value` words; returns `(position, key, value)`.
fn key_values<'a>(cur: &Cursor<'a>, rest: &'a str, base: usize) -> Result<Vec<(usize, &'a str, &'a str)>, ParseError> {
    let mut out = Vec::new();
    let mut pos = base;
    for word in rest.split(' ') {
        if !word.is_empty() {
            let (k, v) = word.split_once('=').ok_or_else(|| cur.syntax(pos, format!("expected key=value, got `{word}`")))?;
            out.push((pos, k, v));
        }
        pos += word.len() + 1;
    }
    Ok(out)
}

fn parse_usize(cur: &Cursor<'_>, at: usize, s: &str) -> Result<usize, ParseError> {
    s.parse().map_err(|_| cur.syntax(at, format!("expected a nonnegative integer, got `{s}`")))
}

fn parse_residue(cur: &Cursor<'_>, at: usize, s: &str, field: PrimeField) -> Result<FpElem, ParseError> {
    let v: i128 = s.parse().map_err(|_| cur.syntax(at, format!("expected an integer, got `{s}`")))?;
    let p = field.modulus() as i128;
    Ok(field.elem(v.rem_euclid(p) as u64))
}

fn parse_poly(cur: &Cursor<'_>, at: usize, s: &str, field: PrimeField, n: usize) -> Result<SparsePoly, ParseError> {
    if s.is_empty() {
        return Err(cur.syntax(at, "empty polynomial"));
    }
    let mut terms = Vec::new();
    let mut pos = at;
    for mono in s.split('+') {
        if mono.is_empty() {
            return Err(cur.syntax(pos, "empty monomial"));
        }
        let mut coeff = field.one();
        let mut exps = vec![0u32; n];
        let mut fpos = pos;
        for factor in mono.split('*') {
            if let Some(var) = factor.strip_prefix('x') {
                let (idx, exp) = match var.split_once('^') {
                    Some((i, e)) => (i, e),
                    None => (var, "1"),
                };
                let i = parse_usize(cur, fpos + 1, idx)?;
                let e: u32 = exp.parse().map_err(|_| cur.syntax(fpos, format!("bad exponent in `{factor}`")))?;
                if i == 0 || i > n {
                    return Err(cur.err(fpos, ParseErrorKind::VariableOutOfRange { var: i, n }));
                }
                exps[i - 1] += e;
            } else if factor.is_empty() {
                return Err(cur.syntax(fpos, "empty factor"));
            } else {
                coeff *= parse_residue(cur, fpos, factor, field)?;
            }
            fpos += factor.len() + 1;
        }
        terms.push((ExponentVector::new(exps), coeff));
        pos += mono.len() + 1;
    }
    Ok(SparsePoly::from_terms(field, n, terms))
}

/// Parses and validates a circuit file.
pub fn parse_circuit(text: &str) -> Result<CircuitDoc, ParseError> {
    let mut field = None;
    let mut header: Option<(usize, usize, Option<usize>, Option<usize>, Option<usize>)> = None;
    let mut terms: Vec<(FpElem, SparsePoly)> = Vec::new();
    let mut term_lines = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim_start();
        let cur = Cursor { line, text: trimmed.trim_end(), offset: content.len() - trimmed.len() };
        if cur.text.is_empty() {
            continue;
        }
        let (word, rest) = cur.text.split_once(' ').unwrap_or((cur.text, ""));
        let kv = key_values(&cur, rest, word.len() + 1)?;
        match word {
            "field" => {
                if field.is_some() {
                    return Err(cur.syntax(0, "duplicate field line"));
                }
                let [(at, "p", v)] = kv[..] else {
                    return Err(cur.syntax(0, "expected `field p=<prime>`"));
                };
                let p: u64 = v.parse().map_err(|_| cur.syntax(at, format!("bad modulus `{v}`")))?;
                let f = PrimeField::new(p).map_err(|e| cur.err(at, ParseErrorKind::InvalidField(e.to_string())))?;
                field = Some(f);
            }
            "params" => {
                if field.is_none() {
                    return Err(cur.syntax(0, "params before field"));
                }
                if header.is_some() {
                    return Err(cur.syntax(0, "duplicate params line"));
                }
                let (mut n, mut d, mut r, mut s, mut delta) = (None, None, None, None, None);
                for (at, k, v) in kv {
                    let slot = match k {
                        "n" => &mut n,
                        "d" => &mut d,
                        "r" => &mut r,
                        "s" => &mut s,
                        "delta" => &mut delta,
                        _ => return Err(cur.syntax(at, format!("unknown parameter `{k}`"))),
                    };
                    if slot.is_some() {
                        return Err(cur.syntax(at, format!("repeated parameter `{k}`")));
                    }
                    *slot = Some(parse_usize(&cur, at + k.len() + 1, v)?);
                }
                let (Some(n), Some(d)) = (n, d) else {
                    return Err(cur.syntax(0, "params needs n and d"));
                };
                if n == 0 || d == 0 {
                    return Err(cur.syntax(0, "n and d must be positive"));
                }
                header = Some((n, d, r, s, delta));
            }
            "term" => {
                let (Some(f), Some((n, _, r, s, delta))) = (field, header) else {
                    return Err(cur.syntax(0, "term before field and params"));
                };
                let [(ca, "coeff", cv), (pa, "poly", pv)] = kv[..] else {
                    return Err(cur.syntax(0, "expected `term coeff=<int> poly=<sum>`"));
                };
                let coeff = parse_residue(&cur, ca + 6, cv, f)?;
                if coeff.is_zero() {
                    return Err(cur.err(ca, ParseErrorKind::ZeroCoefficient));
                }
                let base = parse_poly(&cur, pa + 5, pv, f, n)?;
                if base.is_zero() {
                    return Err(cur.err(pa, ParseErrorKind::ZeroBase));
                }
                let degree = base.degree().unwrap_or(0);
                if let Some(delta) = delta.filter(|&dl| degree > dl) {
                    return Err(cur.err(pa, ParseErrorKind::DegreeExceedsBound { degree, delta }));
                }
                if let Some(s) = s.filter(|&s| base.sparsity() > s) {
                    return Err(cur.err(pa, ParseErrorKind::SparsityExceedsBound { sparsity: base.sparsity(), s }));
                }
                if let Some(first) = terms.iter().position(|(_, b)| b.is_associate(&base)) {
                    return Err(cur.err(
                        pa,
                        ParseErrorKind::AssociateBases { first: first + 1, second: terms.len() + 1 },
                    ));
                }
                if let Some(r) = r.filter(|&r| terms.len() + 1 > r) {
                    return Err(cur.err(0, ParseErrorKind::TooManyTerms { terms: terms.len() + 1, r }));
                }
                terms.push((coeff, base));
                term_lines.push(line);
            }
            other => return Err(cur.syntax(0, format!("unknown directive `{other}`"))),
        }
    }
    let eof = |msg: &str| ParseError {
        line: last_line.max(1),
        column: 1,
        kind: ParseErrorKind::Syntax(msg.into()),
    };
    let field = field.ok_or_else(|| eof("missing field line"))?;
    let (n, d, r, s, delta) = header.ok_or_else(|| eof("missing params line"))?;
    Ok(CircuitDoc { field, n, d, r, s, delta, terms })
}

/// Whether two documents describe the same terms once normalized.
pub fn same_terms_up_to_order(a: &CircuitDoc, b: &CircuitDoc) -> bool {
    a.canonical().terms == b.canonical().terms
}
