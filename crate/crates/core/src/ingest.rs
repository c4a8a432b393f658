//! Problem input: the polynomial expression grammar, the JSON problem
//! container, and the built-in catalog of worked examples.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! relation := expr ((">=" | "<=") expr)?
//! expr     := term (("+" | "-") term)*
//! term     := unary (("*" | "/") unary)*      // "/" only by a nonzero constant
//! unary    := ("-" | "+") unary | power
//! power    := atom ("^" integer)?
//! atom     := number | identifier | "(" expr ")"
//! ```
//!
//! Numbers are integers or decimals and are read exactly; `3/4` is the
//! rational three quarters. Juxtaposition (`2x1`, `x1(x2)`) is rejected.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{RatPoly, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken(String),
    UnexpectedEnd,
    Expected(&'static str),
    UnknownIdentifier(String),
    ImplicitMultiplication,
    BadExponent,
    NonConstantDivisor,
    DivisionByZero,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character '{c}'"),
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected token '{t}'"),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input"),
            ParseErrorKind::Expected(what) => write!(f, "expected {what}"),
            ParseErrorKind::UnknownIdentifier(id) => write!(f, "unknown identifier '{id}'"),
            ParseErrorKind::ImplicitMultiplication => {
                write!(f, "implicit multiplication is not allowed; use '*'")
            }
            ParseErrorKind::BadExponent => write!(f, "exponent must be a non-negative integer"),
            ParseErrorKind::NonConstantDivisor => write!(f, "division is only allowed by constants"),
            ParseErrorKind::DivisionByZero => write!(f, "division by zero"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset into the source string.
    pub offset: usize,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid problem file {path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("in {context}: {source}")]
    Parse { context: String, source: ParseError },
    #[error("invalid problem: {0}")]
    Validation(String),
    #[error("'{0}' is neither a readable file nor a catalog id")]
    NotFound(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Ge,
    Le,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(r) => write!(f, "{r}"),
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Plus => write!(f, "+"),
            Tok::Minus => write!(f, "-"),
            Tok::Star => write!(f, "*"),
            Tok::Slash => write!(f, "/"),
            Tok::Caret => write!(f, "^"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::Ge => write!(f, ">="),
            Tok::Le => write!(f, "<="),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let (pos, ch) = bytes[i];
        if ch.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match ch {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '≥' => Some(Tok::Ge),
            '≤' => Some(Tok::Le),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, pos));
            i += 1;
            continue;
        }
        if ch == '>' || ch == '<' {
            if i + 1 < bytes.len() && bytes[i + 1].1 == '=' {
                out.push((if ch == '>' { Tok::Ge } else { Tok::Le }, pos));
                i += 2;
                continue;
            }
            return Err(ParseError { kind: ParseErrorKind::UnexpectedChar(ch), offset: pos });
        }
        if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].1.is_ascii_digit() || bytes[i].1 == '.') {
                i += 1;
            }
            let end = if i < bytes.len() { bytes[i].0 } else { src.len() };
            let text = &src[pos..end];
            let value = parse_decimal(text)
                .ok_or(ParseError { kind: ParseErrorKind::Expected("number"), offset: bytes[start].0 })?;
            out.push((Tok::Num(value), pos));
            continue;
        }
        if ch.is_alphabetic() || ch == '_' {
            while i < bytes.len() && (bytes[i].1.is_alphanumeric() || bytes[i].1 == '_') {
                i += 1;
            }
            let end = if i < bytes.len() { bytes[i].0 } else { src.len() };
            out.push((Tok::Ident(src[pos..end].to_string()), pos));
            continue;
        }
        return Err(ParseError { kind: ParseErrorKind::UnexpectedChar(ch), offset: pos });
    }
    Ok(out)
}

fn parse_decimal(text: &str) -> Option<Rational> {
    let mut parts = text.split('.');
    let int_part = parts.next()?;
    let frac_part = parts.next();
    if parts.next().is_some() || (int_part.is_empty() && frac_part.is_none_or(str::is_empty)) {
        return None;
    }
    let digits = format!("{int_part}{}", frac_part.unwrap_or(""));
    let numer: BigInt = digits.parse().ok()?;
    let scale = frac_part.map_or(0, str::len) as u32;
    Some(Rational::new(numer, num_traits::pow(BigInt::from(10), scale as usize)))
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn err<T>(&self, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError { kind, offset: self.offset() })
    }

    fn expr(&mut self) -> Result<RatPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatPoly, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let at = self.offset();
                    let d = self.unary()?;
                    if !d.is_constant() {
                        return Err(ParseError { kind: ParseErrorKind::NonConstantDivisor, offset: at });
                    }
                    let c = d.constant_term();
                    if c.is_zero() {
                        return Err(ParseError { kind: ParseErrorKind::DivisionByZero, offset: at });
                    }
                    acc = acc.scale(&(Rational::one() / c));
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    return self.err(ParseErrorKind::ImplicitMultiplication);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RatPoly, ParseError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatPoly, ParseError> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            let at = self.offset();
            match self.peek().cloned() {
                Some(Tok::Num(r)) if r.is_integer() => {
                    self.pos += 1;
                    let k: u32 = r
                        .to_integer()
                        .try_into()
                        .map_err(|_| ParseError { kind: ParseErrorKind::BadExponent, offset: at })?;
                    if let Some(Tok::Caret) = self.peek() {
                        return self.err(ParseErrorKind::UnexpectedToken("^".into()));
                    }
                    Ok(base.pow(k))
                }
                None => self.err(ParseErrorKind::UnexpectedEnd),
                _ => Err(ParseError { kind: ParseErrorKind::BadExponent, offset: at }),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<RatPoly, ParseError> {
        let n = self.vars.len();
        match self.peek().cloned() {
            Some(Tok::Num(r)) => {
                self.pos += 1;
                Ok(RatPoly::constant(n, r))
            }
            Some(Tok::Ident(id)) => match self.vars.iter().position(|v| *v == id) {
                Some(i) => {
                    self.pos += 1;
                    Ok(RatPoly::var(n, i))
                }
                None => self.err(ParseErrorKind::UnknownIdentifier(id)),
            },
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => self.err(ParseErrorKind::Expected("')'")),
                }
            }
            Some(t) => self.err(ParseErrorKind::UnexpectedToken(t.to_string())),
            None => self.err(ParseErrorKind::UnexpectedEnd),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(Tok::RParen) => self.err(ParseErrorKind::UnexpectedToken(")".into())),
            Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                self.err(ParseErrorKind::ImplicitMultiplication)
            }
            Some(t) => self.err(ParseErrorKind::UnexpectedToken(t.to_string())),
        }
    }
}

/// Parses a polynomial expression over the given variable names.
pub fn parse_poly(src: &str, varnames: &[String]) -> Result<RatPoly, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, end: src.len(), vars: varnames };
    let out = p.expr()?;
    p.finish()?;
    Ok(out)
}

/// Parses a constraint and normalizes it to the form `g >= 0`.
///
/// `a >= b` becomes `a - b`, `a <= b` becomes `b - a`, and a bare expression
/// is taken to mean `expr >= 0`.
pub fn parse_constraint(src: &str, varnames: &[String]) -> Result<RatPoly, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, end: src.len(), vars: varnames };
    let lhs = p.expr()?;
    let out = match p.peek() {
        Some(Tok::Ge) => {
            p.pos += 1;
            &lhs - &p.expr()?
        }
        Some(Tok::Le) => {
            p.pos += 1;
            &p.expr()? - &lhs
        }
        _ => lhs,
    };
    p.finish()?;
    Ok(out)
}

/// A polynomial optimization problem `inf f(x) s.t. g_i(x) >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct POProblem {
    pub name: String,
    pub varnames: Vec<String>,
    pub f: RatPoly,
    pub gs: Vec<RatPoly>,
    /// Where the problem came from: a file path or `catalog:<id>`.
    pub provenance: String,
    pub options: ProblemOptions,
}

impl POProblem {
    pub fn new(
        name: impl Into<String>,
        varnames: Vec<String>,
        f: RatPoly,
        gs: Vec<RatPoly>,
    ) -> Result<Self, IngestError> {
        let n = varnames.len();
        if n == 0 {
            return Err(IngestError::Validation("no variables declared".into()));
        }
        if gs.is_empty() {
            return Err(IngestError::Validation("at least one constraint is required".into()));
        }
        if f.nvars() != n || gs.iter().any(|g| g.nvars() != n) {
            return Err(IngestError::Validation("polynomials disagree on the variable count".into()));
        }
        let name = name.into();
        if f.gradient().iter().all(RatPoly::is_zero) {
            log::warn!("problem '{name}': objective has identically zero differential");
        }
        Ok(POProblem {
            name,
            varnames,
            f,
            gs,
            provenance: String::new(),
            options: ProblemOptions::default(),
        })
    }

    pub fn nvars(&self) -> usize {
        self.varnames.len()
    }

    pub fn nconstraints(&self) -> usize {
        self.gs.len()
    }

    /// Constraint values `g_i(x)` in floats.
    pub fn gvals(&self, x: &[f64]) -> Vec<f64> {
        self.gs.iter().map(|g| g.evaluate(x).expect("dimension checked at construction")).collect()
    }

    pub fn is_strictly_feasible(&self, x: &[f64]) -> bool {
        self.gvals(x).iter().all(|&v| v > 0.0)
    }

    pub fn to_file(&self) -> ProblemFile {
        ProblemFile {
            name: self.name.clone(),
            variables: self.varnames.clone(),
            objective: self.f.to_string_with(&self.varnames),
            constraints: self.gs.iter().map(|g| g.to_string_with(&self.varnames)).collect(),
            options: self.options.clone(),
        }
    }
}

/// Numeric overrides carried by a problem file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemOptions {
    pub mu0: Option<f64>,
    pub theta: Option<f64>,
    pub steps: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<Vec<f64>>,
    #[serde(rename = "box")]
    pub bbox: Option<Vec<[f64; 2]>>,
}

/// On-disk JSON problem container.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub name: String,
    pub variables: Vec<String>,
    pub objective: String,
    pub constraints: Vec<String>,
    #[serde(default)]
    pub options: ProblemOptions,
}

impl ProblemFile {
    pub fn into_problem(self, provenance: &str) -> Result<POProblem, IngestError> {
        let ctx = |what: String| move |source| IngestError::Parse { context: what, source };
        let f = parse_poly(&self.objective, &self.variables).map_err(ctx("objective".into()))?;
        let gs = self
            .constraints
            .iter()
            .enumerate()
            .map(|(i, c)| parse_constraint(c, &self.variables).map_err(ctx(format!("constraint {}", i + 1))))
            .collect::<Result<Vec<_>, _>>()?;
        let mut prob = POProblem::new(self.name, self.variables, f, gs)?;
        prob.provenance = provenance.to_string();
        prob.options = self.options;
        Ok(prob)
    }
}

/// Loads a problem from a JSON file, or from the catalog when `source` is
/// not an existing path.
pub fn load_problem(source: &str) -> Result<POProblem, IngestError> {
    let path = Path::new(source);
    if path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| IngestError::Io { path: source.to_string(), source: e })?;
        let file: ProblemFile = serde_json::from_str(&text)
            .map_err(|e| IngestError::Json { path: source.to_string(), source: e })?;
        return file.into_problem(source);
    }
    catalog::problem(source).ok_or_else(|| IngestError::NotFound(source.to_string()))
}

/// Worked examples, keyed by stable ids.
pub mod catalog {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("x{i}")).collect()
    }

    fn p(src: &str, n: usize) -> RatPoly {
        parse_poly(src, &names(n)).expect("catalog expressions are valid")
    }

    /// (id, objective, constraints, description)
    const PROBLEMS: &[(&str, &str, &[&str], &str)] = &[
        ("cusp", "x1", &["x1^3 - x2^2"], "unconstrained cusp; central path (3mu, 0)"),
        (
            "no-central-path",
            "x1",
            &["x1^2 + x2^2 - 1", "x1"],
            "critical (non-central) path to (1,0)",
        ),
        ("non-existence", "x1*x2^2", &["x1", "x2"], "barrier has no critical point"),
        (
            "morse-non-compact",
            "x1^2 + x2^2",
            &["x1^2 + x2^2 - 1"],
            "non-isolated barrier critical circle",
        ),
        (
            "figure-eight",
            "x1",
            &["x1^2 - x1^4 - x2^4 - x2^2"],
            "two paths, to (-1,0) and to the singular point (0,0)",
        ),
        (
            "non-analytic",
            "x1",
            &["x1^3 - x2^2", "x2"],
            "path to the cusp point of a two-constraint set",
        ),
        (
            "morse-central",
            "x1^2 - x2^2",
            &["x2"],
            "Morse objective on a half-plane; no critical path",
        ),
    ];

    /// (id, F, P list)
    const KKT_FIXTURES: &[(&str, &str, &[&str])] = &[
        ("remark-no-critical-path", "x1^2 - x2^2", &["x2"]),
        ("morse-singular-co-critical", "x1^2 - x2^2", &["x1*x2"]),
        ("finitely-many", "x1", &["x1^3 - x2^2"]),
        ("non-degenerate", "x1 + x2", &["x1*x2"]),
        ("non-morse-smooth", "x1^3 + x1*x2^2", &["x2 - x1"]),
    ];

    /// Polynomial families for the zeros-at-infinity test.
    const SYSTEMS: &[(&str, &[&str])] = &[
        ("remark-unbounded", &["x1^2 + x2^2 + (x1*x2 - 1)^2"]),
        ("circle", &["x1^2 + x2^2 - 1"]),
        ("hyperbola", &["x1*x2 - 1"]),
    ];

    pub fn problem_ids() -> Vec<&'static str> {
        PROBLEMS.iter().map(|e| e.0).collect()
    }

    pub fn describe(id: &str) -> Option<&'static str> {
        PROBLEMS.iter().find(|e| e.0 == id).map(|e| e.3)
    }

    pub fn problem(id: &str) -> Option<POProblem> {
        let (id, f, gs, _) = PROBLEMS.iter().find(|e| e.0 == id)?;
        let mut prob = POProblem::new(*id, names(2), p(f, 2), gs.iter().map(|g| p(g, 2)).collect())
            .expect("catalog problems are valid");
        prob.provenance = format!("catalog:{id}");
        Some(prob)
    }

    pub fn kkt_ids() -> Vec<&'static str> {
        KKT_FIXTURES.iter().map(|e| e.0).collect()
    }

    /// Objective and constraint family of a critical-point fixture.
    pub fn kkt_fixture(id: &str) -> Option<(RatPoly, Vec<RatPoly>)> {
        let (_, f, ps) = KKT_FIXTURES.iter().find(|e| e.0 == id)?;
        Some((p(f, 2), ps.iter().map(|q| p(q, 2)).collect()))
    }

    pub fn system_ids() -> Vec<&'static str> {
        SYSTEMS.iter().map(|e| e.0).collect()
    }

    pub fn system(id: &str) -> Option<Vec<RatPoly>> {
        let (_, ps) = SYSTEMS.iter().find(|e| e.0 == id)?;
        Some(ps.iter().map(|q| p(q, 2)).collect())
    }

    pub fn default_names(n: usize) -> Vec<String> {
        names(n)
    }
}

/// Parses a whitespace-free list of expressions in `x1..xn`, inferring `n`
/// from the largest index mentioned (at least `min_vars`).
pub fn parse_in_default_vars(srcs: &[&str], min_vars: usize) -> Result<Vec<RatPoly>, ParseError> {
    let mut n = min_vars.max(1);
    for s in srcs {
        for (t, _) in lex(s)? {
            if let Tok::Ident(id) = t {
                if let Some(k) = id.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                    n = n.max(k);
                }
            }
        }
    }
    let names = catalog::default_names(n);
    srcs.iter().map(|s| parse_poly(s, &names)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;
    use crate::poly::rat_int as rational_of;

    fn v2() -> Vec<String> {
        vec!["x1".into(), "x2".into()]
    }

    #[test]
    fn parses_figure_eight() {
        let g = parse_poly("x1^2 - x1^4 - x2^4 - x2^2", &v2()).unwrap();
        assert_eq!(g.to_string_with(&v2()), "-x1^4 - x2^4 + x1^2 - x2^2");
        assert_eq!(g.evaluate(&[rational_of(-1), rational_of(0)]).unwrap(), rational_of(0));
    }

    #[test]
    fn zero_and_numbers() {
        let z = parse_poly("0", &v2()).unwrap();
        assert!(z.is_zero());
        let q = parse_poly("0.25*x1 + 3/4", &v2()).unwrap();
        assert_eq!(q.constant_term(), rat(3, 4));
        assert_eq!(q.terms()[0].0, rat(1, 4));
        let m = parse_poly("-x1^2", &v2()).unwrap();
        assert_eq!(m.terms()[0].0, rational_of(-1));
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        let e = parse_poly("x1*(x2", &v2()).unwrap_err();
        assert_eq!(e.offset, 6);
        assert_eq!(e.kind, ParseErrorKind::Expected("')'"));

        let e = parse_poly("2x1", &v2()).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::ImplicitMultiplication);
        assert_eq!(e.offset, 1);

        let e = parse_poly("x1 + y", &v2()).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownIdentifier("y".into()));
        assert_eq!(e.offset, 5);

        assert_eq!(parse_poly("x1/x2", &v2()).unwrap_err().kind, ParseErrorKind::NonConstantDivisor);
        assert_eq!(parse_poly("x1^x2", &v2()).unwrap_err().kind, ParseErrorKind::BadExponent);
        assert_eq!(parse_poly("x1 +", &v2()).unwrap_err().kind, ParseErrorKind::UnexpectedEnd);
        assert_eq!(parse_poly("x1 # 2", &v2()).unwrap_err().kind, ParseErrorKind::UnexpectedChar('#'));
    }

    #[test]
    fn constraint_normalization() {
        let g = parse_constraint("x1^2 + x2^2 >= 1", &v2()).unwrap();
        assert_eq!(g, parse_poly("x1^2 + x2^2 - 1", &v2()).unwrap());
        let g = parse_constraint("x1 <= 2", &v2()).unwrap();
        assert_eq!(g, parse_poly("2 - x1", &v2()).unwrap());
    }

    #[test]
    fn catalog_entries() {
        let cusp = catalog::problem("cusp").unwrap();
        assert_eq!(cusp.f, parse_poly("x1", &v2()).unwrap());
        assert_eq!(cusp.gs, vec![parse_poly("x1^3 - x2^2", &v2()).unwrap()]);
        let ncp = catalog::problem("no-central-path").unwrap();
        assert_eq!(ncp.gs.len(), 2);
        assert_eq!(ncp.gs[1], parse_poly("x1", &v2()).unwrap());
        assert_eq!(ncp.provenance, "catalog:no-central-path");
        for id in catalog::problem_ids() {
            assert!(catalog::problem(id).is_some(), "{id}");
        }
        let fig8 = catalog::problem("figure-eight").unwrap();
        assert_eq!(fig8.gvals(&[-1.0, 0.0]), vec![0.0]);
    }

    #[test]
    fn zero_constraints_rejected() {
        let file = ProblemFile {
            name: "empty".into(),
            variables: v2(),
            objective: "x1".into(),
            constraints: vec![],
            options: ProblemOptions::default(),
        };
        assert!(matches!(file.into_problem("mem"), Err(IngestError::Validation(_))));
    }

    #[test]
    fn missing_source_is_not_found() {
        assert!(matches!(load_problem("missing.json"), Err(IngestError::NotFound(_))));
    }
}
