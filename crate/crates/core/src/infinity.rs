//! Certificates for common real zeros at infinity of a polynomial family.
//!
//! A zero at infinity is a direction `y != 0` where every leading form
//! vanishes. Leading forms are homogeneous, so it is enough to search the
//! faces `y_k = 1` of the cube around the unit sphere.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{newton_solve, NewtonConfig, PolyFunction};
use crate::poly::{rat_int, FloatPoly, RatPoly};

/// Largest dimension searched by subdivision.
pub const MAX_VARS: usize = 4;

/// Box budget; exceeding it yields `Undecided`.
const MAX_BOXES: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InfinityError {
    #[error("empty polynomial family")]
    EmptyFamily,
    #[error("{0} variables exceed the subdivision limit of {MAX_VARS}")]
    TooManyVariables(usize),
    #[error("polynomials disagree on the variable count")]
    DimensionMismatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InfinityVerdict {
    EmptyAtInfinity,
    /// Unit-norm direction where all leading forms vanish.
    NonemptyAtInfinity { witness: Vec<f64> },
    Undecided,
}

/// Certificate JSON: `{verdict, witness?, depth}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfinityCertificate {
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<f64>>,
    pub depth: usize,
    pub tol: f64,
    /// Every distinct witness found (up to sign).
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub witnesses: Vec<Vec<f64>>,
}

impl InfinityCertificate {
    pub fn verdict(&self) -> InfinityVerdict {
        match (self.verdict.as_str(), &self.witness) {
            ("EmptyAtInfinity", _) => InfinityVerdict::EmptyAtInfinity,
            ("NonemptyAtInfinity", Some(w)) => InfinityVerdict::NonemptyAtInfinity { witness: w.clone() },
            _ => InfinityVerdict::Undecided,
        }
    }

    fn new(verdict: InfinityVerdict, depth: usize, tol: f64, witnesses: Vec<Vec<f64>>) -> Self {
        let (label, witness) = match verdict {
            InfinityVerdict::EmptyAtInfinity => ("EmptyAtInfinity", None),
            InfinityVerdict::NonemptyAtInfinity { witness } => ("NonemptyAtInfinity", Some(witness)),
            InfinityVerdict::Undecided => ("Undecided", None),
        };
        InfinityCertificate { verdict: label.into(), witness, depth, tol, witnesses }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }
    fn mul(self, o: Interval) -> Interval {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        Interval { lo: c.iter().cloned().fold(f64::INFINITY, f64::min), hi: c.iter().cloned().fold(f64::NEG_INFINITY, f64::max) }
    }
    fn powi(self, k: u32) -> Interval {
        if k == 0 {
            return Interval::point(1.0);
        }
        let (a, b) = (self.lo.powi(k as i32), self.hi.powi(k as i32));
        if k % 2 == 1 || self.lo >= 0.0 {
            Interval { lo: a, hi: b }
        } else if self.hi <= 0.0 {
            Interval { lo: b, hi: a }
        } else {
            Interval { lo: 0.0, hi: a.max(b) }
        }
    }
    fn magnitude(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }
}

/// Naive interval enclosure of `p` over the box, widened to absorb rounding.
fn enclose(p: &FloatPoly, bx: &[Interval]) -> Interval {
    let mut lo = 0.0;
    let mut hi = 0.0;
    let mut mag = 0.0;
    for (c, e) in p.terms() {
        let mut t = Interval::point(*c);
        for (iv, &k) in bx.iter().zip(e) {
            if k > 0 {
                t = t.mul(iv.powi(k));
            }
        }
        lo += t.lo;
        hi += t.hi;
        mag += t.magnitude();
    }
    let pad = 8.0 * f64::EPSILON * mag * (p.terms().len() as f64 + 1.0);
    Interval { lo: lo - pad, hi: hi + pad }
}

/// Leading forms restricted to one cube face `y_k = 1`, in the remaining
/// `n - 1` coordinates.
struct Face {
    k: usize,
    forms: Vec<FloatPoly>,
    solver: Option<PolyFunction>,
}

impl Face {
    fn new(leading: &[RatPoly], k: usize) -> Self {
        let n = leading[0].nvars();
        // move y_k to the last slot, then fix it to 1
        let map: Vec<usize> = (0..n).map(|i| if i == k { n - 1 } else if i > k { i - 1 } else { i }).collect();
        let moved: Vec<RatPoly> = leading.iter().map(|p| p.embed(n, &map)).collect();
        let forms = moved
            .iter()
            .map(|p| {
                let q = p.substitute(&[(n - 1, rat_int(1))]);
                RatPoly::from_terms(n - 1, q.terms().iter().map(|(c, e)| (c.clone(), e[..n - 1].to_vec()))).to_f64()
            })
            .collect();
        let solver = (n > 1).then(|| PolyFunction::new(&moved, n - 1, &[1.0]));
        Face { k, forms, solver }
    }

    fn full_point(&self, free: &[f64]) -> Vec<f64> {
        let mut y = free.to_vec();
        y.insert(self.k, 1.0);
        y
    }
}

fn normalized(y: &[f64]) -> Vec<f64> {
    let nrm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    y.iter().map(|v| v / nrm).collect()
}

/// Largest leading-form value at `y`, each form scaled by its largest
/// coefficient.
pub fn leading_residual(leading: &[RatPoly], y: &[f64]) -> f64 {
    leading
        .iter()
        .map(|p| {
            let s = p.max_abs_coeff();
            if s == 0.0 {
                0.0
            } else {
                p.evaluate(y).expect("dimension").abs() / s
            }
        })
        .fold(0.0, f64::max)
}

fn same_direction(a: &[f64], b: &[f64]) -> bool {
    let plus = a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-6);
    let minus = a.iter().zip(b).all(|(x, y)| (x + y).abs() <= 1e-6);
    plus || minus
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub max_depth: usize,
    pub tol: f64,
    /// Keep subdividing after the first witness to collect all of them.
    pub collect_all: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { max_depth: 24, tol: 1e-9, collect_all: false }
    }
}

/// Decides whether the leading forms of `ps` share a real zero on the unit
/// sphere, by interval exclusion on cube-face boxes plus Newton polishing.
pub fn certify_infinity(ps: &[RatPoly], max_depth: usize, tol: f64) -> Result<InfinityCertificate, InfinityError> {
    certify_infinity_with(ps, &CertifyOptions { max_depth, tol, collect_all: false })
}

pub fn certify_infinity_with(ps: &[RatPoly], opts: &CertifyOptions) -> Result<InfinityCertificate, InfinityError> {
    let first = ps.first().ok_or(InfinityError::EmptyFamily)?;
    let n = first.nvars();
    if ps.iter().any(|p| p.nvars() != n) {
        return Err(InfinityError::DimensionMismatch);
    }
    if n > MAX_VARS {
        return Err(InfinityError::TooManyVariables(n));
    }
    let leading: Vec<RatPoly> = ps.iter().map(RatPoly::leading_form).collect();
    if n == 0 || leading.iter().all(RatPoly::is_zero) {
        // every direction is a zero
        let mut w = vec![0.0; n.max(1)];
        w[0] = 1.0;
        return Ok(InfinityCertificate::new(InfinityVerdict::NonemptyAtInfinity { witness: w.clone() }, 0, opts.tol, vec![w]));
    }
    let faces: Vec<Face> = (0..n).map(|k| Face::new(&leading, k)).collect();
    let newton = NewtonConfig { max_iters: 60, ..NewtonConfig::default() };

    let mut level: Vec<(usize, Vec<Interval>)> =
        (0..n).map(|k| (k, vec![Interval { lo: -1.0, hi: 1.0 }; n - 1])).collect();
    let mut witnesses: Vec<Vec<f64>> = Vec::new();
    let mut depth = 0;
    loop {
        // exclusion and polishing, in parallel over the level
        let results: Vec<(bool, Option<Vec<f64>>)> = level
            .par_iter()
            .map(|(k, bx)| {
                let face = &faces[*k];
                let excluded = face.forms.iter().any(|f| {
                    let iv = enclose(f, bx);
                    iv.lo > 0.0 || iv.hi < 0.0
                });
                if excluded {
                    return (true, None);
                }
                let centre: Vec<f64> = bx.iter().map(|iv| 0.5 * (iv.lo + iv.hi)).collect();
                let candidate = match &face.solver {
                    None => Some(face.full_point(&[])),
                    Some(sys) => newton_solve(sys, &centre, &newton)
                        .ok()
                        .filter(|r| r.x.iter().all(|v| v.abs() <= 1.0 + 1e-9))
                        .map(|r| face.full_point(&r.x)),
                };
                let witness = candidate
                    .map(|y| normalized(&y))
                    .filter(|w| leading_residual(&leading, w) <= opts.tol);
                (false, witness)
            })
            .collect();

        let mut next = Vec::new();
        for ((k, bx), (excluded, witness)) in level.into_iter().zip(results) {
            if excluded {
                continue;
            }
            if let Some(w) = witness {
                if !witnesses.iter().any(|v| same_direction(v, &w)) {
                    witnesses.push(w);
                }
            }
            if depth < opts.max_depth && n > 1 {
                let (j, _) = bx
                    .iter()
                    .enumerate()
                    .max_by(|a, b| (a.1.hi - a.1.lo).total_cmp(&(b.1.hi - b.1.lo)))
                    .expect("n > 1");
                let mid = 0.5 * (bx[j].lo + bx[j].hi);
                let mut left = bx.clone();
                let mut right = bx;
                left[j].hi = mid;
                right[j].lo = mid;
                next.push((k, left));
                next.push((k, right));
            } else {
                next.push((k, bx));
            }
        }

        if !witnesses.is_empty() && !opts.collect_all {
            break;
        }
        if next.is_empty() {
            let verdict = match witnesses.first() {
                Some(w) => InfinityVerdict::NonemptyAtInfinity { witness: w.clone() },
                None => InfinityVerdict::EmptyAtInfinity,
            };
            return Ok(InfinityCertificate::new(verdict, depth, opts.tol, witnesses));
        }
        if depth >= opts.max_depth || n == 1 || next.len() > MAX_BOXES {
            break;
        }
        level = next;
        depth += 1;
    }
    let verdict = match witnesses.first() {
        Some(w) => InfinityVerdict::NonemptyAtInfinity { witness: w.clone() },
        None => InfinityVerdict::Undecided,
    };
    Ok(InfinityCertificate::new(verdict, depth, opts.tol, witnesses))
}
