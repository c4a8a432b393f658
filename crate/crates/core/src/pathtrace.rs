//! Continuation of barrier critical paths as `mu` decreases to zero.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::POProblem;
use crate::numerics::{
    equilibrate, lstsq, newton_solve, rank_estimate, scaled_condition, NewtonConfig, NonlinearSystem, NumericsError,
    PolyFunction,
};
use crate::poly::RatPoly;
use crate::systems::{build_cleared_system, build_kkt_system};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TraceError {
    #[error("seed {0:?} is not strictly feasible")]
    InfeasibleSeed(Vec<f64>),
    #[error("seed has {got} coordinates, problem has {expected} variables")]
    SeedDimension { expected: usize, got: usize },
    #[error("invalid schedule: {0}")]
    BadSchedule(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub mu: f64,
    pub x: Vec<f64>,
    pub residual: f64,
    pub jac_condition: f64,
    pub gvals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TraceStatus {
    Converged { limit: Vec<f64> },
    Diverged,
    LostIsolation,
    NoSolution,
    LeftInterior,
    /// Steps ran out, or refinement stalled, before the limit test passed.
    Incomplete,
}

impl TraceStatus {
    pub fn label(&self) -> &'static str {
        match self {
            TraceStatus::Converged { .. } => "converged",
            TraceStatus::Diverged => "diverged",
            TraceStatus::LostIsolation => "lost_isolation",
            TraceStatus::NoSolution => "no_solution",
            TraceStatus::LeftInterior => "left_interior",
            TraceStatus::Incomplete => "incomplete",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceConfig {
    pub mu0: f64,
    pub theta: f64,
    /// Number of samples requested, including the first one.
    pub steps: usize,
    pub newton: NewtonConfig,
    /// Halvings of `mu0` allowed when the first solve fails.
    pub max_mu0_halvings: usize,
    /// Local step refinements (`theta <- sqrt(theta)`) allowed per step.
    pub max_refinements: usize,
    /// The last three samples must agree to this tolerance for convergence.
    pub limit_tol: f64,
    /// ... and the final `mu` must be below this.
    pub mu_limit: f64,
    pub divergence_norm: f64,
    pub rank_threshold: f64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            mu0: 0.1,
            theta: 0.5,
            steps: 40,
            newton: NewtonConfig::default(),
            max_mu0_halvings: 20,
            max_refinements: 20,
            limit_tol: 1e-8,
            mu_limit: 1e-10,
            divergence_norm: 1e8,
            rank_threshold: 1e-8,
        }
    }
}

impl TraceConfig {
    fn validate(&self) -> Result<(), TraceError> {
        if !(self.mu0 > 0.0 && self.mu0.is_finite()) {
            return Err(TraceError::BadSchedule(format!("mu0 must be positive, got {}", self.mu0)));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(TraceError::BadSchedule(format!("theta must lie in (0,1), got {}", self.theta)));
        }
        if self.steps == 0 {
            return Err(TraceError::BadSchedule("at least one step is required".into()));
        }
        self.newton.validate().map_err(TraceError::BadSchedule)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathTrace {
    pub samples: Vec<PathSample>,
    pub status: TraceStatus,
    pub mu0_requested: f64,
    /// Starting `mu` actually used after automatic halving.
    pub mu0_used: f64,
    pub mu0_halvings: usize,
    pub theta: f64,
    pub steps: usize,
    pub refinements: usize,
}

impl PathTrace {
    pub fn limit(&self) -> Option<&[f64]> {
        match &self.status {
            TraceStatus::Converged { limit } => Some(limit),
            _ => None,
        }
    }

    /// CSV export: `mu,x1..xn,residual,jac_condition,g1..gr`.
    pub fn to_csv(&self, nvars: usize, ncons: usize) -> String {
        let mut out = String::new();
        let mut header = vec!["mu".to_string()];
        header.extend((1..=nvars).map(|i| format!("x{i}")));
        header.push("residual".into());
        header.push("jac_condition".into());
        header.extend((1..=ncons).map(|i| format!("g{i}")));
        out.push_str(&header.join(","));
        out.push('\n');
        for s in &self.samples {
            let mut row = vec![s.mu];
            row.extend(&s.x);
            row.push(s.residual);
            row.push(s.jac_condition);
            row.extend(&s.gvals);
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// Reads samples back from the CSV layout written by [`PathTrace::to_csv`].
pub fn samples_from_csv(text: &str) -> Result<Vec<PathSample>, String> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().ok_or("empty CSV")?.split(',').collect();
    let nx = header.iter().filter(|h| h.starts_with('x')).count();
    let ng = header.iter().filter(|h| h.starts_with('g')).count();
    if header.len() != 3 + nx + ng || header[0] != "mu" {
        return Err("unexpected CSV header".into());
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(k, l)| {
            let v: Vec<f64> = l
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| format!("row {}: {e}", k + 1))?;
            if v.len() != header.len() {
                return Err(format!("row {} has {} cells", k + 1, v.len()));
            }
            Ok(PathSample {
                mu: v[0],
                x: v[1..1 + nx].to_vec(),
                residual: v[1 + nx],
                jac_condition: v[2 + nx],
                gvals: v[3 + nx..].to_vec(),
            })
        })
        .collect()
}

/// Float evaluator for the cleared system with a mutable `mu`.
pub struct ClearedEvaluator {
    func: PolyFunction,
}

impl ClearedEvaluator {
    pub fn new(prob: &POProblem) -> Self {
        let sys = build_cleared_system(prob);
        ClearedEvaluator { func: PolyFunction::from_system(&sys.system, &[0.0]) }
    }

    pub fn at(&mut self, mu: f64) -> &PolyFunction {
        self.func.set_params(&[mu]);
        &self.func
    }
}

/// Largest relative violation of the rational barrier conditions at `x`:
/// `|df_j - mu sum dg_ij / g_i|` over `|df_j| + mu sum |dg_ij / g_i|`.
///
/// Cleared-system roots on the boundary (where some `g_i = 0`) give values
/// of order one; genuine barrier critical points give roundoff.
pub fn barrier_consistency(prob: &POProblem, mu: f64, x: &[f64]) -> f64 {
    let gv = prob.gvals(x);
    let mut worst: f64 = 0.0;
    for j in 0..prob.nvars() {
        let df = prob.f.derivative(j).evaluate(x).expect("dimension");
        let mut val = df;
        let mut scale = df.abs();
        for (g, gi) in prob.gs.iter().zip(&gv) {
            let t = mu * g.derivative(j).evaluate(x).expect("dimension") / gi;
            val -= t;
            scale += t.abs();
        }
        if scale > 0.0 {
            worst = worst.max(val.abs() / scale);
        }
    }
    worst
}

const CONSISTENCY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsolationCheck {
    pub isolated: bool,
    pub rank: usize,
    pub jac_condition: f64,
}

/// Whether the cleared-system Jacobian at `(mu, x)` has full numerical rank
/// after row and column equilibration.
pub fn check_isolated(prob: &POProblem, mu: f64, x: &[f64]) -> IsolationCheck {
    let mut ev = ClearedEvaluator::new(prob);
    isolation_of(&ev.at(mu).jacobian(x), 1e-8)
}

fn isolation_of(j: &DMatrix<f64>, threshold: f64) -> IsolationCheck {
    let scaled = equilibrate(j).0;
    let rank = rank_estimate(&scaled, threshold).rank;
    IsolationCheck { isolated: rank == j.ncols(), rank, jac_condition: scaled_condition(j) }
}

fn inf_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn sample_at(prob: &POProblem, func: &PolyFunction, mu: f64, x: Vec<f64>, residual: f64) -> PathSample {
    let jac_condition = scaled_condition(&func.jacobian(&x));
    let gvals = prob.gvals(&x);
    PathSample { mu, x, residual, jac_condition, gvals }
}

/// Traces the barrier critical path through the strictly feasible `x0`.
///
/// The schedule is `mu_k = mu0 theta^k`; each solve starts from the previous
/// sample. A failed solve shortens that step by `theta <- sqrt(theta)`.
pub fn trace_path(prob: &POProblem, x0: &[f64], cfg: &TraceConfig) -> Result<PathTrace, TraceError> {
    cfg.validate()?;
    if x0.len() != prob.nvars() {
        return Err(TraceError::SeedDimension { expected: prob.nvars(), got: x0.len() });
    }
    if !prob.is_strictly_feasible(x0) {
        return Err(TraceError::InfeasibleSeed(x0.to_vec()));
    }
    let mut ev = ClearedEvaluator::new(prob);
    let mut trace = PathTrace {
        samples: Vec::new(),
        status: TraceStatus::NoSolution,
        mu0_requested: cfg.mu0,
        mu0_used: cfg.mu0,
        mu0_halvings: 0,
        theta: cfg.theta,
        steps: cfg.steps,
        refinements: 0,
    };

    // first sample, halving mu0 until an interior solution appears
    let mut first = None;
    for h in 0..=cfg.max_mu0_halvings {
        let mu = cfg.mu0 / 2f64.powi(h as i32);
        let func = ev.at(mu);
        match newton_solve(func, x0, &cfg.newton) {
            Ok(rep)
                if prob.is_strictly_feasible(&rep.x)
                    && barrier_consistency(prob, mu, &rep.x) <= CONSISTENCY_TOL =>
            {
                first = Some((mu, h, rep));
                break;
            }
            Ok(rep) => log::debug!("mu={mu:e}: solution {:?} is not an interior barrier point", rep.x),
            Err(e) => log::debug!("mu={mu:e}: {e}"),
        }
    }
    let Some((mu, h, rep)) = first else {
        return Ok(trace);
    };
    if h > 0 {
        log::info!("starting mu halved {h} times to {mu:e}");
    }
    trace.mu0_used = mu;
    trace.mu0_halvings = h;
    let func = ev.at(mu);
    let iso = isolation_of(&func.jacobian(&rep.x), cfg.rank_threshold);
    trace.samples.push(sample_at(prob, func, mu, rep.x, rep.residual));
    if !iso.isolated {
        trace.status = TraceStatus::LostIsolation;
        return Ok(trace);
    }

    let mut mu = mu;
    while trace.samples.len() < cfg.steps {
        let prev = trace.samples.last().expect("nonempty").x.clone();
        let mut theta = cfg.theta;
        let mut solved = None;
        let mut last_err = None;
        for _ in 0..=cfg.max_refinements {
            let next = mu * theta;
            match newton_solve(ev.at(next), &prev, &cfg.newton) {
                Ok(rep) => {
                    solved = Some((next, rep));
                    break;
                }
                Err(e) => {
                    last_err = Some(e);
                    trace.refinements += 1;
                    theta = theta.sqrt();
                }
            }
        }
        let Some((next, rep)) = solved else {
            let far = match &last_err {
                Some(NumericsError::NoConvergence { x, .. }) | Some(NumericsError::SingularJacobian { x, .. }) => {
                    inf_norm(x) > cfg.divergence_norm
                }
                _ => false,
            };
            trace.status = if far { TraceStatus::Diverged } else { TraceStatus::Incomplete };
            log::info!("step refinement exhausted at mu={mu:e}: {last_err:?}");
            return Ok(trace);
        };
        mu = next;
        if inf_norm(&rep.x) > cfg.divergence_norm {
            trace.status = TraceStatus::Diverged;
            return Ok(trace);
        }
        if !prob.is_strictly_feasible(&rep.x) {
            trace.status = TraceStatus::LeftInterior;
            return Ok(trace);
        }
        let func = ev.at(mu);
        let iso = isolation_of(&func.jacobian(&rep.x), cfg.rank_threshold);
        trace.samples.push(sample_at(prob, func, mu, rep.x, rep.residual));
        if !iso.isolated {
            trace.status = TraceStatus::LostIsolation;
            return Ok(trace);
        }
    }

    trace.status = limit_status(&trace.samples, cfg);
    Ok(trace)
}

fn limit_status(samples: &[PathSample], cfg: &TraceConfig) -> TraceStatus {
    if samples.len() < 3 {
        return TraceStatus::Incomplete;
    }
    let tail = &samples[samples.len() - 3..];
    let close = tail.windows(2).all(|w| {
        w[0].x.iter().zip(&w[1].x).all(|(a, b)| (a - b).abs() <= cfg.limit_tol)
    });
    if close && tail[2].mu < cfg.mu_limit {
        TraceStatus::Converged { limit: tail[2].x.clone() }
    } else {
        TraceStatus::Incomplete
    }
}

/// Traces several seeds in parallel; output order follows the input.
pub fn trace_many(prob: &POProblem, seeds: &[Vec<f64>], cfg: &TraceConfig) -> Vec<Result<PathTrace, TraceError>> {
    seeds.par_iter().map(|s| trace_path(prob, s, cfg)).collect()
}

/// A feasible grid point and the interior barrier critical point that
/// Newton reaches from it at the starting `mu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seed {
    pub point: Vec<f64>,
    /// Cleared-system residual at `point`.
    pub residual: f64,
    pub solution: Vec<f64>,
}

/// Grid search for seeds, one per Newton basin.
///
/// Cell centres of a `grid_per_dim`-per-axis grid over `bbox` are kept when
/// strictly feasible and ranked by cleared residual at `mu0`; each is then
/// solved and seeds whose solutions agree within `1e-6` are merged,
/// keeping the best ranked.
pub fn seed_search(prob: &POProblem, bbox: &[[f64; 2]], grid_per_dim: usize, mu0: f64) -> Vec<Seed> {
    let n = prob.nvars();
    assert_eq!(bbox.len(), n, "box must give one interval per variable");
    assert!(grid_per_dim > 0, "grid must be nonempty");
    let total = grid_per_dim.checked_pow(n as u32).expect("grid too large");
    let mut ev = ClearedEvaluator::new(prob);
    let func = ev.at(mu0).clone();
    let mut candidates: Vec<(Vec<f64>, f64)> = (0..total)
        .filter_map(|mut k| {
            let p: Vec<f64> = bbox
                .iter()
                .map(|[lo, hi]| {
                    let i = k % grid_per_dim;
                    k /= grid_per_dim;
                    lo + (hi - lo) * (i as f64 + 0.5) / grid_per_dim as f64
                })
                .collect();
            prob.is_strictly_feasible(&p).then(|| {
                let r = func.residual(&p).amax();
                (p, r)
            })
        })
        .collect();
    candidates.sort_by(|a, b| a.1.total_cmp(&b.1));

    let cfg = NewtonConfig::default();
    let solved: Vec<Option<Vec<f64>>> = candidates
        .par_iter()
        .map(|(p, _)| {
            newton_solve(&func, p, &cfg).ok().map(|r| r.x).filter(|x| {
                prob.is_strictly_feasible(x) && barrier_consistency(prob, mu0, x) <= CONSISTENCY_TOL
            })
        })
        .collect();

    let mut seeds: Vec<Seed> = Vec::new();
    for ((point, residual), sol) in candidates.into_iter().zip(solved) {
        let Some(solution) = sol else { continue };
        let dup = seeds.iter().any(|s| {
            s.solution.iter().zip(&solution).all(|(a, b)| (a - b).abs() <= 1e-6)
        });
        if !dup {
            seeds.push(Seed { point, residual, solution });
        }
    }
    seeds
}

// ---------------------------------------------------------------------------
// existence of a critical path through the multiplier sign

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExistenceVerdict {
    PathExists,
    NoPositiveRoot,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExistenceCheck {
    pub xi: Vec<f64>,
    pub x: Vec<Vec<f64>>,
    pub u: Vec<f64>,
    /// `xi * u(xi)` along the grid.
    pub xi_u: Vec<f64>,
    pub verdict: ExistenceVerdict,
}

/// Geometric grid `start * ratio^k`, `k < count`.
pub fn geometric_grid(start: f64, ratio: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| start * ratio.powi(k as i32)).collect()
}

/// Follows the KKT branch of `F` on `{P = xi}` through `seed = (x, u)` along
/// the decreasing grid and inspects the sign of `xi * u(xi)`.
pub fn check_existence_via_multiplier(f: &RatPoly, p: &RatPoly, xi_grid: &[f64], seed: &[f64]) -> ExistenceCheck {
    assert!(
        xi_grid.windows(2).all(|w| w[1] < w[0]) && xi_grid.iter().all(|v| *v > 0.0),
        "grid must be positive and strictly decreasing"
    );
    let kkt = build_kkt_system(f, std::slice::from_ref(p));
    let n = kkt.n;
    let mut func = PolyFunction::from_system(&kkt.system, &[0.0]);
    let mut out = ExistenceCheck { xi: vec![], x: vec![], u: vec![], xi_u: vec![], verdict: ExistenceVerdict::Inconclusive };
    let mut cur = seed.to_vec();
    let cfg = NewtonConfig::default();
    for &xi in xi_grid {
        func.set_params(&[xi]);
        match newton_solve(&func, &cur, &cfg) {
            Ok(rep) => cur = rep.x,
            Err(e) => {
                log::info!("KKT branch lost at xi={xi:e}: {e}");
                return out;
            }
        }
        out.xi.push(xi);
        out.x.push(cur[..n].to_vec());
        out.u.push(cur[n]);
        out.xi_u.push(xi * cur[n]);
    }
    out.verdict = multiplier_verdict(&out.xi, &out.xi_u);
    out
}

fn multiplier_verdict(xi: &[f64], xi_u: &[f64]) -> ExistenceVerdict {
    if xi_u.len() < 3 {
        return ExistenceVerdict::Inconclusive;
    }
    if xi_u.iter().all(|v| *v <= 0.0) {
        return ExistenceVerdict::NoPositiveRoot;
    }
    if xi_u.iter().all(|v| *v > 0.0) {
        // xi*u must tend to zero: positive log-log slope on the deeper half
        let h = xi.len() / 2;
        let lx: Vec<f64> = xi[h..].iter().map(|v| v.ln()).collect();
        let ly: Vec<f64> = xi_u[h..].iter().map(|v| v.ln()).collect();
        if let Some(slope) = slope(&lx, &ly) {
            if slope > 0.05 {
                return ExistenceVerdict::PathExists;
            }
        }
    }
    ExistenceVerdict::Inconclusive
}

fn slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    if x.len() < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Multi-start wrapper: seeds `x` from a grid over `bbox` with `u` from the
/// least-squares multiplier, solves at the first grid value, and checks
/// every distinct branch found.
///
/// The verdict is `PathExists` if some branch admits a path,
/// `NoPositiveRoot` if every branch has a non-positive sign profile, and
/// `Inconclusive` otherwise (including when no branch is found).
pub fn check_existence_search(
    f: &RatPoly,
    p: &RatPoly,
    xi_grid: &[f64],
    bbox: &[[f64; 2]],
    grid_per_dim: usize,
) -> (ExistenceVerdict, Vec<ExistenceCheck>) {
    let n = f.nvars();
    assert_eq!(bbox.len(), n, "box must give one interval per variable");
    let kkt = build_kkt_system(f, std::slice::from_ref(p));
    let mut func = PolyFunction::from_system(&kkt.system, &[0.0]);
    func.set_params(&[xi_grid[0]]);
    let total = grid_per_dim.pow(n as u32);
    let grad_f = f.gradient();
    let grad_p = p.gradient();
    let mut starts: Vec<Vec<f64>> = Vec::new();
    for mut k in 0..total {
        let x: Vec<f64> = bbox
            .iter()
            .map(|[lo, hi]| {
                let i = k % grid_per_dim;
                k /= grid_per_dim;
                lo + (hi - lo) * (i as f64 + 0.5) / grid_per_dim as f64
            })
            .collect();
        let a = DMatrix::from_fn(n, 1, |j, _| grad_p[j].evaluate(&x).expect("dimension"));
        let b: Vec<f64> = grad_f.iter().map(|g| g.evaluate(&x).expect("dimension")).collect();
        let u = lstsq(&a, &b).x[0];
        let Ok(rep) = newton_solve(&func, &[x, vec![u]].concat(), &NewtonConfig::default()) else { continue };
        if !starts.iter().any(|s| s.iter().zip(&rep.x).all(|(a, b)| (a - b).abs() <= 1e-6)) {
            starts.push(rep.x);
        }
    }
    let checks: Vec<ExistenceCheck> =
        starts.iter().map(|s| check_existence_via_multiplier(f, p, xi_grid, s)).collect();
    let verdict = if checks.iter().any(|c| c.verdict == ExistenceVerdict::PathExists) {
        ExistenceVerdict::PathExists
    } else if !checks.is_empty() && checks.iter().all(|c| c.verdict == ExistenceVerdict::NoPositiveRoot) {
        ExistenceVerdict::NoPositiveRoot
    } else {
        ExistenceVerdict::Inconclusive
    };
    (verdict, checks)
}
