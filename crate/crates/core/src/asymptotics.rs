//! Puiseux exponent estimates along traced paths and the reparametrization
//! `mu = t^rho` that makes them smooth.

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pathtrace::PathSample;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymptoticsError {
    #[error("only {got} usable samples, need {need}")]
    InsufficientSamples { got: usize, need: usize },
    #[error("no finite exponent to reconstruct")]
    NoFiniteExponent,
    #[error("limit has {got} coordinates, samples have {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub min_points: usize,
    pub r2_min: f64,
    /// Samples with `mu` below this are ignored (0 keeps everything).
    pub mu_floor: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { min_points: 12, r2_min: 0.999, mu_floor: 0.0 }
    }
}

/// Log-log regression of `|x_i(mu) - xbar_i|` against `mu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub r: f64,
    pub stderr: f64,
    pub r2: f64,
    /// `(largest mu, smallest mu)` of the window used.
    pub window: (f64, f64),
    pub npoints: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordExponent {
    Finite(LineFit),
    /// The coordinate equals its limit to within the noise floor.
    Exact,
}

impl CoordExponent {
    pub fn finite(&self) -> Option<&LineFit> {
        match self {
            CoordExponent::Finite(f) => Some(f),
            CoordExponent::Exact => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub coords: Vec<CoordExponent>,
    /// Exponent of `||x(mu) - xbar||_inf`; `None` when every coordinate is exact.
    pub overall: Option<LineFit>,
}

fn regression(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    let stderr = if x.len() > 2 { (sse / (n - 2.0) / sxx).sqrt() } else { f64::INFINITY };
    (slope, stderr, r2)
}

/// Fits `log dev = r log mu + c` on the deepest window holding at least
/// `min_points` samples and spanning a decade; slides shallower while the
/// fit misses `r2_min`, and falls back to the deepest window if none passes.
///
/// `mu` is ordered by decreasing value.
fn fit_series(mu: &[f64], dev: &[f64], opts: &FitOptions) -> Result<LineFit, AsymptoticsError> {
    let m = mu.len();
    if m < opts.min_points {
        return Err(AsymptoticsError::InsufficientSamples { got: m, need: opts.min_points });
    }
    let lx: Vec<f64> = mu.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = dev.iter().map(|v| v.ln()).collect();
    let width = |end: usize| {
        let mut start = end.saturating_sub(opts.min_points);
        while start > 0 && lx[start] - lx[end - 1] < std::f64::consts::LN_10 {
            start -= 1;
        }
        start
    };
    let mut first = None;
    let mut end = m;
    while end >= opts.min_points {
        let start = width(end);
        let (r, stderr, r2) = regression(&lx[start..end], &ly[start..end]);
        let fit = LineFit { r, stderr, r2, window: (mu[start], mu[end - 1]), npoints: end - start };
        if r2 >= opts.r2_min {
            return Ok(fit);
        }
        first.get_or_insert(fit);
        end -= 1;
    }
    Ok(first.expect("at least one window"))
}

/// Noise floor of coordinate values near `xbar`.
fn noise_floor(xbar: f64) -> f64 {
    10.0 * f64::EPSILON * xbar.abs() + 1e-300
}

/// Per-coordinate exponents of `x(mu) - xbar` from parallel `mu`/`x` data.
pub fn fit_exponents_raw(
    mu: &[f64],
    xs: &[Vec<f64>],
    xbar: &[f64],
    opts: &FitOptions,
) -> Result<ExponentFit, AsymptoticsError> {
    let n = xbar.len();
    if let Some(x) = xs.iter().find(|x| x.len() != n) {
        return Err(AsymptoticsError::DimensionMismatch { expected: x.len(), got: n });
    }
    let keep: Vec<usize> = (0..mu.len()).filter(|&k| mu[k] > 0.0 && mu[k] >= opts.mu_floor).collect();
    if keep.len() < opts.min_points {
        return Err(AsymptoticsError::InsufficientSamples { got: keep.len(), need: opts.min_points });
    }
    let mut coords = Vec::with_capacity(n);
    for i in 0..n {
        let floor = noise_floor(xbar[i]);
        let (m, d): (Vec<f64>, Vec<f64>) = keep
            .iter()
            .map(|&k| (mu[k], (xs[k][i] - xbar[i]).abs()))
            .filter(|(_, d)| *d > floor)
            .unzip();
        if m.is_empty() {
            coords.push(CoordExponent::Exact);
        } else {
            coords.push(CoordExponent::Finite(fit_series(&m, &d, opts)?));
        }
    }
    let overall = if coords.iter().all(|c| *c == CoordExponent::Exact) {
        None
    } else {
        let floor = xbar.iter().map(|v| noise_floor(*v)).fold(0.0, f64::max);
        let (m, d): (Vec<f64>, Vec<f64>) = keep
            .iter()
            .map(|&k| (mu[k], xs[k].iter().zip(xbar).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)))
            .filter(|(_, d)| *d > floor)
            .unzip();
        Some(fit_series(&m, &d, opts)?)
    };
    Ok(ExponentFit { coords, overall })
}

/// Exponent fit of a trace against the limit `xbar`.
pub fn fit_exponents(samples: &[PathSample], xbar: &[f64], opts: &FitOptions) -> Result<ExponentFit, AsymptoticsError> {
    let mu: Vec<f64> = samples.iter().map(|s| s.mu).collect();
    let xs: Vec<Vec<f64>> = samples.iter().map(|s| s.x.clone()).collect();
    fit_exponents_raw(&mu, &xs, xbar, opts)
}

/// Limit estimate by Aitken extrapolation of the last three samples,
/// coordinate-wise; falls back to the last sample where the differences
/// are not geometrically shrinking.
pub fn estimate_limit(samples: &[PathSample]) -> Option<Vec<f64>> {
    let last = samples.last()?;
    if samples.len() < 3 {
        return Some(last.x.clone());
    }
    let k = samples.len();
    let (a, b, c) = (&samples[k - 3].x, &samples[k - 2].x, &last.x);
    Some(
        (0..c.len())
            .map(|i| {
                let d1 = b[i] - a[i];
                let d2 = c[i] - b[i];
                if d1 == 0.0 {
                    return c[i];
                }
                let q = d2 / d1;
                if q > 0.0 && q < 0.95 {
                    c[i] + d2 * q / (1.0 - q)
                } else {
                    c[i]
                }
            })
            .collect(),
    )
}

/// One rational approximation `p/q` of an exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalApprox {
    /// 1-based coordinate index.
    pub coord: usize,
    pub r: f64,
    pub p: u64,
    pub q: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReparamProposal {
    pub rho: u64,
    pub approximations: Vec<RationalApprox>,
}

/// Continued-fraction convergent of `r` with the largest denominator not
/// exceeding `max_den`.
fn best_convergent(r: f64, max_den: u64) -> (u64, u64) {
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut x = r;
    for _ in 0..64 {
        let a = x.floor();
        if a > u32::MAX as f64 {
            break;
        }
        let a = a as u64;
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = x - a as f64;
        if frac < 1e-12 {
            break;
        }
        x = 1.0 / frac;
    }
    if q1 == 0 {
        (r.round() as u64, 1)
    } else {
        (p1, q1)
    }
}

/// Smallest denominator `q <= max_den` whose nearest fraction lies within
/// `max(2 stderr, 1e-3)` of `r`, or the best convergent otherwise.
fn rational_approx(r: f64, stderr: f64, max_den: u64) -> (u64, u64) {
    let tol = (2.0 * stderr).max(1e-3);
    for q in 1..=max_den {
        let p = (r * q as f64).round();
        if p >= 0.0 && (r - p / q as f64).abs() <= tol {
            return (p as u64, q);
        }
    }
    best_convergent(r, max_den)
}

/// `rho` as the lcm of the denominators of the exponents' rational
/// approximations.
pub fn propose_rho(fit: &ExponentFit, max_den: u64) -> Result<ReparamProposal, AsymptoticsError> {
    let approximations: Vec<RationalApprox> = fit
        .coords
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.finite().map(|f| (i, f)))
        .map(|(i, f)| {
            let (p, q) = rational_approx(f.r.max(0.0), f.stderr, max_den.max(1));
            RationalApprox { coord: i + 1, r: f.r, p, q }
        })
        .collect();
    if approximations.is_empty() {
        return Err(AsymptoticsError::NoFiniteExponent);
    }
    let rho = approximations.iter().fold(1u64, |acc, a| acc.lcm(&a.q));
    Ok(ReparamProposal { rho, approximations })
}

/// Verdict on one derivative order of `t -> x(t^rho)` at `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderDiagnostic {
    pub order: usize,
    pub passed: bool,
    /// Deepest usable divided-difference estimates, per coordinate.
    pub estimates: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessReport {
    pub rho: u64,
    pub orders: Vec<OrderDiagnostic>,
}

impl SmoothnessReport {
    /// Orders that passed, in increasing order.
    pub fn passed_orders(&self) -> Vec<usize> {
        self.orders.iter().filter(|o| o.passed).map(|o| o.order).collect()
    }

    /// Whether every order up to and including `k` passed.
    pub fn passes_through(&self, k: usize) -> bool {
        (1..=k).all(|m| self.orders.iter().any(|o| o.order == m && o.passed))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Estimate {
    Zero,
    Value(f64),
}

/// Divided difference `y[t_0..t_m]` and a bound on its rounding error given
/// per-value error bounds.
fn divided_difference(t: &[f64], y: &[f64], err: &[f64]) -> (f64, f64) {
    let mut value = 0.0;
    let mut noise = 0.0;
    for j in 0..t.len() {
        let w: f64 = (0..t.len()).filter(|&l| l != j).map(|l| t[j] - t[l]).product();
        value += y[j] / w;
        noise += err[j] / w.abs();
    }
    (value, noise)
}

/// How many deepest estimates feed each verdict.
const SMOOTH_WINDOW: usize = 6;

fn judge(estimates: &[(f64, Estimate)]) -> bool {
    let tail: Vec<&(f64, Estimate)> = estimates.iter().rev().take(SMOOTH_WINDOW).collect();
    if tail.is_empty() {
        return true;
    }
    if tail.iter().take(3).all(|(_, e)| *e == Estimate::Zero) {
        return true;
    }
    let vals: Vec<(f64, f64)> = tail
        .iter()
        .filter_map(|(t, e)| match e {
            Estimate::Value(v) => Some((*t, *v)),
            Estimate::Zero => None,
        })
        .collect();
    if vals.len() < 2 {
        return true;
    }
    let (last, prev) = (vals[0].1, vals[1].1);
    if (last - prev).abs() <= 0.01 * last.abs().max(prev.abs()) {
        return true;
    }
    if vals.len() >= 3 {
        let lx: Vec<f64> = vals.iter().map(|(t, _)| t.ln()).collect();
        let ly: Vec<f64> = vals.iter().map(|(_, v)| v.abs().ln()).collect();
        let (beta, _, _) = regression(&lx, &ly);
        // estimates shrinking as t -> 0 converge (to zero)
        return beta > 0.05;
    }
    false
}

/// Finite-difference smoothness test of `y(t) = x(t^rho)` at `t = 0` for
/// orders `1..=max_order`.
///
/// The order-`m` estimate at sample `k` is the divided difference over
/// `(0, t_k, ..., t_{k+m-1})` with `y(0) = xbar`. Estimates within rounding
/// noise of zero count as zero; estimates dominated by noise are dropped.
/// An order passes when the deepest estimates agree to 1% or shrink towards
/// zero.
pub fn check_smooth_after_reparam(
    samples: &[PathSample],
    xbar: &[f64],
    rho: u64,
    max_order: usize,
) -> SmoothnessReport {
    let rho = rho.max(1);
    let t: Vec<f64> = samples.iter().map(|s| s.mu.powf(1.0 / rho as f64)).collect();
    let mut orders = Vec::with_capacity(max_order);
    for m in 1..=max_order {
        let mut passed = true;
        let mut per_coord = Vec::with_capacity(xbar.len());
        for (i, &xb) in xbar.iter().enumerate() {
            let mut ests: Vec<(f64, Estimate)> = Vec::new();
            for k in 0..samples.len().saturating_sub(m - 1) {
                let mut tt = vec![0.0];
                let mut yy = vec![0.0];
                let mut ee = vec![0.0];
                for s in k..k + m {
                    tt.push(t[s]);
                    let y = samples[s].x[i] - xb;
                    yy.push(y);
                    ee.push(4.0 * f64::EPSILON * (samples[s].x[i].abs() + xb.abs()));
                }
                let (v, noise) = divided_difference(&tt, &yy, &ee);
                if v.abs() <= 10.0 * noise {
                    ests.push((t[k], Estimate::Zero));
                } else if noise <= 1e-3 * v.abs() {
                    ests.push((t[k], Estimate::Value(v)));
                }
            }
            if !judge(&ests) {
                passed = false;
            }
            per_coord.push(
                ests.iter()
                    .rev()
                    .take(SMOOTH_WINDOW)
                    .map(|(_, e)| match e {
                        Estimate::Zero => 0.0,
                        Estimate::Value(v) => *v,
                    })
                    .collect(),
            );
        }
        orders.push(OrderDiagnostic { order: m, passed, estimates: per_coord });
    }
    SmoothnessReport { rho, orders }
}

/// JSON entry for one coordinate: `{coord, r, stderr}` or `"exact"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExponentEntry {
    Finite { coord: usize, r: f64, stderr: f64 },
    Exact(ExactMarker),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExactMarker {
    #[serde(rename = "exact")]
    Exact,
}

/// Report JSON `{exponents, overall, rho, smooth_orders_passed}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsReport {
    pub exponents: Vec<ExponentEntry>,
    pub overall: Option<f64>,
    pub rho: Option<u64>,
    pub smooth_orders_passed: Vec<usize>,
}

impl AsymptoticsReport {
    pub fn new(fit: &ExponentFit, rho: Option<&ReparamProposal>, smooth: Option<&SmoothnessReport>) -> Self {
        AsymptoticsReport {
            exponents: fit
                .coords
                .iter()
                .enumerate()
                .map(|(i, c)| match c {
                    CoordExponent::Finite(f) => ExponentEntry::Finite { coord: i + 1, r: f.r, stderr: f.stderr },
                    CoordExponent::Exact => ExponentEntry::Exact(ExactMarker::Exact),
                })
                .collect(),
            overall: fit.overall.as_ref().map(|f| f.r),
            rho: rho.map(|p| p.rho),
            smooth_orders_passed: smooth.map(SmoothnessReport::passed_orders).unwrap_or_default(),
        }
    }
}
