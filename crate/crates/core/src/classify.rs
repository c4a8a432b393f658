//! Classification of the limit point of a traced path.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::POProblem;
use crate::pathtrace::{PathSample, PathTrace, TraceStatus};
use crate::poly::rat_int;
use crate::strata::{active_rank, critical_on_stratum, locate_stratum, StrataError};
use crate::systems::build_projective_central;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("trace status '{0}' has no limit to classify")]
    NotClassifiable(&'static str),
    #[error("projective normalization did not settle: spread {spread:e} over the last {window} samples")]
    UnstableNormalization { spread: f64, window: usize },
    #[error("too few reliable samples ({0}) for a projective limit")]
    TooFewSamples(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    StratumCritical,
    StratumCriticalPositiveMultipliers,
    /// Active gradients drop rank; the limit is described by a projective
    /// KKT point instead.
    SingularBoundary,
    /// On a regular stratum but not critical there.
    NonCritical,
    Unbounded,
    NotOnBoundary,
}

/// Projective pair `((x0:...:xn), (u0:...:ur))`, each scaled so that its
/// largest-magnitude coordinate is `+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectivePair {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    /// Residual of the projective KKT system at the pair.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    /// Absolute tolerance for `|g_i| <= tol` activity.
    pub locate_tol: f64,
    /// Stationarity residual accepted as critical.
    pub critical_tol: f64,
    /// Multipliers above this count as positive, and projective duals above
    /// it as nonzero.
    pub sign_tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { locate_tol: 1e-6, critical_tol: 1e-6, sign_tol: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub limit: Vec<f64>,
    /// 1-based active constraints.
    pub active: Vec<usize>,
    /// Rank of the active gradients at the limit.
    pub active_rank: usize,
    /// Active gradients are linearly independent at the limit.
    pub regular_point: bool,
    /// One entry per constraint; inactive constraints get 0.
    pub multipliers: Vec<f64>,
    pub multipliers_positive: Vec<bool>,
    pub stationarity_residual: Option<f64>,
    pub classification: Classification,
    pub projective: Option<ProjectivePair>,
    /// `min_i (g_i + u_i) > tol` at the affine limit.
    pub strictly_complementary_affine: Option<bool>,
    /// Every projective multiplier `u_i` exceeds the pair accuracy `1e-6`.
    pub strictly_complementary_projective: Option<bool>,
    /// `||grad f||` at an interior limit.
    pub interior_gradient_norm: Option<f64>,
}

fn normalize_signed(v: &[f64]) -> Vec<f64> {
    let (idx, _) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .expect("nonempty");
    let s = v[idx];
    v.iter().map(|a| a / s).collect()
}

/// Relative accuracy of `g_i(x)` in floats: rounding in the sum of term
/// magnitudes over the computed value.
fn g_reliable(prob: &POProblem, s: &PathSample) -> bool {
    prob.gs.iter().zip(&s.gvals).all(|(g, v)| {
        let mag: f64 = g
            .terms()
            .iter()
            .map(|(c, e)| {
                crate::poly::Coeff::to_f64(c).abs()
                    * e.iter().zip(&s.x).map(|(&k, xi)| xi.abs().powi(k as i32)).product::<f64>()
            })
            .sum();
        4.0 * f64::EPSILON * mag <= RELIABLE_REL * v.abs()
    })
}

/// Residual of the projective KKT system (`mu = 0` central rows) at a pair.
pub fn projective_residual(prob: &POProblem, x: &[f64], u: &[f64]) -> f64 {
    let eqs = build_projective_central(prob).at_param(&rat_int(0));
    let point: Vec<f64> = x.iter().chain(u).cloned().collect();
    eqs.iter().map(|e| e.evaluate(&point).expect("dimension").abs()).fold(0.0, f64::max)
}

const RELIABLE_REL: f64 = 1e-7;
const STABILITY_WINDOW: usize = 5;
const STABILITY_TOL: f64 = 1e-6;

/// Limit of `(1, x(mu))` and `(1, u(mu))` with `u_i = mu / g_i(x(mu))`, each
/// normalized by its largest-magnitude coordinate.
///
/// Uses the deepest samples whose constraint values are computed to relative
/// accuracy `1e-7`; the last five of them must agree to `1e-6`.
pub fn extract_projective_limit(prob: &POProblem, samples: &[PathSample]) -> Result<ProjectivePair, ClassifyError> {
    let reliable: Vec<&PathSample> = samples.iter().filter(|s| g_reliable(prob, s)).collect();
    if reliable.len() < STABILITY_WINDOW {
        return Err(ClassifyError::TooFewSamples(reliable.len()));
    }
    let tail = &reliable[reliable.len() - STABILITY_WINDOW..];
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = tail
        .iter()
        .map(|s| {
            let x: Vec<f64> = std::iter::once(1.0).chain(s.x.iter().cloned()).collect();
            let u: Vec<f64> = std::iter::once(1.0).chain(s.gvals.iter().map(|g| s.mu / g)).collect();
            (normalize_signed(&x), normalize_signed(&u))
        })
        .collect();
    let last = pairs.last().expect("window is nonempty");
    let spread = pairs
        .iter()
        .flat_map(|(x, u)| {
            x.iter().zip(&last.0).chain(u.iter().zip(&last.1)).map(|(a, b)| (a - b).abs())
        })
        .fold(0.0, f64::max);
    if spread > STABILITY_TOL {
        return Err(ClassifyError::UnstableNormalization { spread, window: STABILITY_WINDOW });
    }
    let (x, u) = last.clone();
    let residual = projective_residual(prob, &x, &u);
    Ok(ProjectivePair { x, u, residual })
}

/// Classifies the limit of a converged (or diverged) trace.
pub fn classify_limit(prob: &POProblem, trace: &PathTrace, opts: &ClassifyOptions) -> Result<LimitReport, ClassifyError> {
    let r = prob.nconstraints();
    let limit = match &trace.status {
        TraceStatus::Converged { limit } => limit.clone(),
        TraceStatus::Diverged => {
            let projective = extract_projective_limit(prob, &trace.samples).ok();
            return Ok(LimitReport {
                limit: trace.samples.last().map(|s| s.x.clone()).unwrap_or_default(),
                active: vec![],
                active_rank: 0,
                regular_point: false,
                multipliers: vec![0.0; r],
                multipliers_positive: vec![false; r],
                stationarity_residual: None,
                classification: Classification::Unbounded,
                strictly_complementary_projective: projective.as_ref().map(proj_sc),
                projective,
                strictly_complementary_affine: None,
                interior_gradient_norm: None,
            });
        }
        other => return Err(ClassifyError::NotClassifiable(other.label())),
    };
    let projective = extract_projective_limit(prob, &trace.samples).ok();
    let strictly_complementary_projective = projective.as_ref().map(proj_sc);

    let stratum = match locate_stratum(&prob.gs, &limit, opts.locate_tol) {
        Ok(s) => s,
        Err(StrataError::NotOnBoundary { .. }) => {
            let gn = prob
                .f
                .gradient()
                .iter()
                .map(|p| p.evaluate(&limit).expect("dimension").powi(2))
                .sum::<f64>()
                .sqrt();
            return Ok(LimitReport {
                limit,
                active: vec![],
                active_rank: 0,
                regular_point: true,
                multipliers: vec![0.0; r],
                multipliers_positive: vec![false; r],
                stationarity_residual: Some(gn),
                classification: Classification::NotOnBoundary,
                projective,
                strictly_complementary_affine: None,
                strictly_complementary_projective,
                interior_gradient_norm: Some(gn),
            });
        }
        Err(e) => unreachable!("locate_stratum only reports NotOnBoundary: {e}"),
    };
    let rank = active_rank(&prob.gs, &stratum.active, &limit);
    let mut report = LimitReport {
        limit: limit.clone(),
        active: stratum.active_one_based(),
        active_rank: rank,
        regular_point: rank == stratum.active.len(),
        multipliers: vec![0.0; r],
        multipliers_positive: vec![false; r],
        stationarity_residual: None,
        classification: Classification::SingularBoundary,
        projective,
        strictly_complementary_affine: None,
        strictly_complementary_projective,
        interior_gradient_norm: None,
    };
    match critical_on_stratum(&prob.f, &prob.gs, &stratum, &limit, opts.critical_tol) {
        Ok(c) => {
            for (&i, u) in stratum.active.iter().zip(&c.multipliers) {
                report.multipliers[i] = *u;
                report.multipliers_positive[i] = *u > opts.sign_tol;
            }
            report.stationarity_residual = Some(c.stationarity_residual);
            let all_positive = stratum.active.iter().all(|&i| report.multipliers_positive[i]);
            report.classification = match (c.is_critical, all_positive) {
                (false, _) => Classification::NonCritical,
                (true, true) => Classification::StratumCriticalPositiveMultipliers,
                (true, false) => Classification::StratumCritical,
            };
            let gv = prob.gvals(&limit);
            let sc = gv.iter().zip(&report.multipliers).map(|(g, u)| g + u).fold(f64::INFINITY, f64::min);
            report.strictly_complementary_affine = Some(sc > opts.sign_tol);
        }
        Err(StrataError::RankDeficientActiveSet { .. }) => {}
        Err(e) => unreachable!("critical_on_stratum only reports rank deficiency: {e}"),
    }
    Ok(report)
}

fn proj_sc(p: &ProjectivePair) -> bool {
    p.u[1..].iter().all(|v| v.abs() > STABILITY_TOL)
}
