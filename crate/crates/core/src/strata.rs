//! Stratification of the boundary `S_= = {some g_i = 0}` of a general
//! position family by active index sets.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{lstsq, newton_solve, rank_estimate_abs, NewtonConfig, PolyFunction};
use crate::poly::RatPoly;

/// Largest family handled by subset enumeration.
pub const MAX_CONSTRAINTS: usize = 12;

/// Pivot floor below which an active gradient counts as vanishing.
const GRADIENT_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StrataError {
    #[error("{0} constraints exceed the enumeration limit of {MAX_CONSTRAINTS}")]
    TooManyConstraints(usize),
    #[error("point is not on the boundary: min |g_i| = {min_abs:e} exceeds {tol:e}")]
    NotOnBoundary { min_abs: f64, tol: f64 },
    #[error("active gradients have rank {rank} < {active}; use the projective test")]
    RankDeficientActiveSet { rank: usize, active: usize },
}

/// Points where exactly the constraints in `active` vanish.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Stratum {
    /// 0-based constraint indices, sorted.
    pub active: Vec<usize>,
    /// Expected dimension `n - |I|` (negative when over-constrained).
    pub dim: i64,
    /// Strictly larger index sets whose points are excluded.
    pub exclusions: Vec<Vec<usize>>,
}

impl Stratum {
    pub fn new(active: Vec<usize>, nvars: usize, nconstraints: usize) -> Self {
        let mut active = active;
        active.sort_unstable();
        active.dedup();
        let exclusions = subsets(nconstraints)
            .filter(|s| s.len() > active.len() && active.iter().all(|i| s.contains(i)))
            .collect();
        Stratum { dim: nvars as i64 - active.len() as i64, active, exclusions }
    }

    /// Defining equations `g_i = 0, i in I`.
    pub fn equations(&self, gs: &[RatPoly]) -> Vec<RatPoly> {
        self.active.iter().map(|&i| gs[i].clone()).collect()
    }

    /// `|g_i| <= tol` on the active set and `|g_j| > tol` elsewhere.
    pub fn contains(&self, gs: &[RatPoly], x: &[f64], tol: f64) -> bool {
        gs.iter().enumerate().all(|(i, g)| {
            let v = g.evaluate(x).expect("dimension").abs();
            if self.active.contains(&i) {
                v <= tol
            } else {
                v > tol
            }
        })
    }

    /// 1-based active indices, as reported to users.
    pub fn active_one_based(&self) -> Vec<usize> {
        self.active.iter().map(|i| i + 1).collect()
    }
}

/// Stratum report JSON: `{active, dim, witness_points}` with 1-based indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumReport {
    pub active: Vec<usize>,
    pub dim: i64,
    pub witness_points: Vec<Vec<f64>>,
}

impl StratumReport {
    pub fn new(stratum: &Stratum, witness_points: Vec<Vec<f64>>) -> Self {
        StratumReport { active: stratum.active_one_based(), dim: stratum.dim, witness_points }
    }
}

/// Nonempty subsets of `0..r`, ordered by size then lexicographically.
fn subsets(r: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut all: Vec<Vec<usize>> =
        (1u32..(1u32 << r)).map(|m| (0..r).filter(|i| m & (1 << i) != 0).collect()).collect();
    all.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    all.into_iter()
}

/// One stratum per nonempty active set.
pub fn enumerate_strata(gs: &[RatPoly]) -> Result<Vec<Stratum>, StrataError> {
    let r = gs.len();
    if r > MAX_CONSTRAINTS {
        return Err(StrataError::TooManyConstraints(r));
    }
    let n = gs.first().map_or(0, RatPoly::nvars);
    Ok(subsets(r).map(|s| Stratum::new(s, n, r)).collect())
}

/// Stratum holding `x`: the active set is every `g_i` with `|g_i(x)| <= tol`.
pub fn locate_stratum(gs: &[RatPoly], x: &[f64], tol: f64) -> Result<Stratum, StrataError> {
    let vals: Vec<f64> = gs.iter().map(|g| g.evaluate(x).expect("dimension").abs()).collect();
    let active: Vec<usize> = (0..gs.len()).filter(|&i| vals[i] <= tol).collect();
    if active.is_empty() {
        let min_abs = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        return Err(StrataError::NotOnBoundary { min_abs, tol });
    }
    Ok(Stratum::new(active, x.len(), gs.len()))
}

fn active_jacobian(gs: &[RatPoly], active: &[usize], x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    DMatrix::from_fn(active.len(), n, |r, j| gs[active[r]].derivative(j).evaluate(x).expect("dimension"))
}

/// Numerical rank of the active gradients at `x`, counting gradients below
/// an absolute floor as zero.
pub fn active_rank(gs: &[RatPoly], active: &[usize], x: &[f64]) -> usize {
    rank_estimate_abs(&active_jacobian(gs, active, x), 1e-8, GRADIENT_FLOOR).rank
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumCriticality {
    pub is_critical: bool,
    /// One multiplier per active constraint, in active-set order.
    pub multipliers: Vec<f64>,
    /// `||grad f - J_I^T u||`.
    pub stationarity_residual: f64,
}

/// Tests whether `x` is a critical point of `f` restricted to `stratum`.
///
/// Multipliers solve `J_I^T u = grad f` in least squares; zero-dimensional
/// strata are critical by convention.
pub fn critical_on_stratum(
    f: &RatPoly,
    gs: &[RatPoly],
    stratum: &Stratum,
    x: &[f64],
    tol: f64,
) -> Result<StratumCriticality, StrataError> {
    let j = active_jacobian(gs, &stratum.active, x);
    let rank = rank_estimate_abs(&j, 1e-8, GRADIENT_FLOOR).rank;
    if rank < stratum.active.len() {
        return Err(StrataError::RankDeficientActiveSet { rank, active: stratum.active.len() });
    }
    let grad: Vec<f64> = f.gradient().iter().map(|p| p.evaluate(x).expect("dimension")).collect();
    let sol = lstsq(&j.transpose(), &grad);
    Ok(StratumCriticality {
        is_critical: stratum.dim == 0 || sol.residual <= tol,
        multipliers: sol.x,
        stationarity_residual: sol.residual,
    })
}

fn grid_points(bbox: &[[f64; 2]], per_dim: usize) -> Vec<Vec<f64>> {
    let total = per_dim.pow(bbox.len() as u32);
    (0..total)
        .map(|mut k| {
            bbox.iter()
                .map(|[lo, hi]| {
                    let i = k % per_dim;
                    k /= per_dim;
                    lo + (hi - lo) * (i as f64 + 0.5) / per_dim as f64
                })
                .collect()
        })
        .collect()
}

fn push_distinct(points: &mut Vec<Vec<f64>>, p: Vec<f64>, tol: f64) {
    if !points.iter().any(|q| q.iter().zip(&p).all(|(a, b)| (a - b).abs() <= tol)) {
        points.push(p);
    }
}

/// Zeros of `{g_i = 0, i in I}` reached by Gauss-Newton from grid seeds,
/// together with points where the active gradients drop rank (found from
/// `{g_I = 0, J_I^T l = 0, |l|^2 = 1}`).
pub fn find_zeros(gs: &[RatPoly], active: &[usize], bbox: &[[f64; 2]], per_dim: usize) -> Vec<Vec<f64>> {
    let n = bbox.len();
    let cfg = NewtonConfig::default();
    let eqs: Vec<RatPoly> = active.iter().map(|&i| gs[i].clone()).collect();
    let plain = PolyFunction::new(&eqs, n, &[]);

    let k = active.len();
    let total = n + k;
    let xmap: Vec<usize> = (0..n).collect();
    let mut sing: Vec<RatPoly> = eqs.iter().map(|g| g.embed(total, &xmap)).collect();
    for j in 0..n {
        let row = eqs.iter().enumerate().fold(RatPoly::zero(total), |acc, (l, g)| {
            &acc + &(&RatPoly::var(total, n + l) * &g.derivative(j).embed(total, &xmap))
        });
        sing.push(row);
    }
    let norm = (0..k).fold(RatPoly::constant(total, crate::poly::rat_int(-1)), |acc, l| {
        &acc + &RatPoly::var(total, n + l).pow(2)
    });
    sing.push(norm);
    let singular = PolyFunction::new(&sing, total, &[]);
    let lam0 = vec![1.0 / (k as f64).sqrt(); k];

    let mut out = Vec::new();
    for seed in grid_points(bbox, per_dim) {
        if let Ok(rep) = newton_solve(&plain, &seed, &cfg) {
            push_distinct(&mut out, rep.x, 1e-6);
        }
        let start: Vec<f64> = seed.iter().chain(&lam0).cloned().collect();
        if let Ok(rep) = newton_solve(&singular, &start, &cfg) {
            push_distinct(&mut out, rep.x[..n].to_vec(), 1e-6);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SubsetVerdict {
    /// Full rank at every examined zero.
    Regular { checked: usize },
    /// Rank deficiency at `witness`.
    Deficient { witness: Vec<f64>, rank: usize },
    /// No zero of this subset was available, so nothing was tested.
    Unchecked,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralPositionReport {
    /// `(1-based active set, verdict)` for every nonempty subset.
    pub subsets: Vec<(Vec<usize>, SubsetVerdict)>,
    /// No deficiency found at any examined zero. Undiscovered components are
    /// not covered.
    pub in_general_position: bool,
}

/// General-position verdict at the supplied zeros: for each subset `I`, the
/// active Jacobian must have rank `|I|` at each candidate zero of `g_I`.
/// Candidates that do not vanish on `I` (to `1e-8`) are ignored.
pub fn check_general_position(
    gs: &[RatPoly],
    candidates: &[(Vec<usize>, Vec<Vec<f64>>)],
) -> Result<GeneralPositionReport, StrataError> {
    let strata = enumerate_strata(gs)?;
    let mut subsets = Vec::with_capacity(strata.len());
    for s in &strata {
        let pts: Vec<&Vec<f64>> = candidates
            .iter()
            .filter(|(a, _)| {
                let mut a = a.clone();
                a.sort_unstable();
                a == s.active
            })
            .flat_map(|(_, p)| p)
            .filter(|x| s.active.iter().all(|&i| gs[i].evaluate(x).expect("dimension").abs() <= 1e-8))
            .collect();
        let mut verdict = if pts.is_empty() { SubsetVerdict::Unchecked } else { SubsetVerdict::Regular { checked: pts.len() } };
        for x in pts {
            let rank = active_rank(gs, &s.active, x);
            if rank < s.active.len() {
                verdict = SubsetVerdict::Deficient { witness: x.clone(), rank };
                break;
            }
        }
        subsets.push((s.active_one_based(), verdict));
    }
    let in_general_position = !subsets.iter().any(|(_, v)| matches!(v, SubsetVerdict::Deficient { .. }));
    Ok(GeneralPositionReport { subsets, in_general_position })
}

/// General-position check with candidates from [`find_zeros`] over a box.
pub fn check_general_position_in_box(
    gs: &[RatPoly],
    bbox: &[[f64; 2]],
    per_dim: usize,
) -> Result<GeneralPositionReport, StrataError> {
    let strata = enumerate_strata(gs)?;
    let candidates: Vec<(Vec<usize>, Vec<Vec<f64>>)> =
        strata.iter().map(|s| (s.active.clone(), find_zeros(gs, &s.active, bbox, per_dim))).collect();
    check_general_position(gs, &candidates)
}

/// Witness points of a stratum: zeros of its equations that avoid every
/// other constraint's zero set.
pub fn stratum_witnesses(gs: &[RatPoly], stratum: &Stratum, bbox: &[[f64; 2]], per_dim: usize, tol: f64) -> Vec<Vec<f64>> {
    find_zeros(gs, &stratum.active, bbox, per_dim)
        .into_iter()
        .filter(|x| stratum.contains(gs, x, tol))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::catalog;
    use crate::ingest::parse_in_default_vars;

    fn gs(srcs: &[&str]) -> Vec<RatPoly> {
        parse_in_default_vars(srcs, 2).unwrap()
    }

    #[test]
    fn enumerate_fixtures() {
        let s = enumerate_strata(&gs(&["x1^2 + x2^2 - 1", "x1"])).unwrap();
        let sets: Vec<Vec<usize>> = s.iter().map(|s| s.active.clone()).collect();
        assert_eq!(sets, vec![vec![0], vec![1], vec![0, 1]]);
        assert_eq!(s[0].exclusions, vec![vec![0, 1]]);
        assert_eq!(s[2].dim, 0);

        let one = enumerate_strata(&gs(&["x1"])).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].dim, 1);

        let too_many: Vec<&str> = vec!["x1"; 13];
        assert_eq!(enumerate_strata(&gs(&too_many)), Err(StrataError::TooManyConstraints(13)));
    }

    #[test]
    fn axes_strata() {
        let g = gs(&["x1", "x2"]);
        let strata = enumerate_strata(&g).unwrap();
        let bbox = [[-1.0, 1.0], [-1.0, 1.0]];
        let origin = stratum_witnesses(&g, &strata[2], &bbox, 4, 1e-6);
        assert_eq!(origin.len(), 1);
        assert!(origin[0].iter().all(|v| v.abs() < 1e-12));
        // axis points away from the origin
        for w in stratum_witnesses(&g, &strata[0], &bbox, 4, 1e-6) {
            assert!(w[0].abs() < 1e-12 && w[1].abs() > 1e-6);
        }
    }

    #[test]
    fn circle_and_line_point_stratum() {
        let g = gs(&["x1^2 + x2^2 - 1", "x1"]);
        let strata = enumerate_strata(&g).unwrap();
        let mut w = stratum_witnesses(&g, &strata[2], &[[-2.0, 2.0], [-2.0, 2.0]], 6, 1e-6);
        w.sort_by(|a, b| a[1].total_cmp(&b[1]));
        assert_eq!(w.len(), 2);
        assert!((w[0][1] + 1.0).abs() < 1e-12 && (w[1][1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn locate_fixtures() {
        let prob = catalog::problem("no-central-path").unwrap();
        assert_eq!(locate_stratum(&prob.gs, &[1.0, 0.0], 1e-6).unwrap().active, vec![0]);
        assert_eq!(locate_stratum(&prob.gs, &[0.0, 1.0], 1e-6).unwrap().active, vec![0, 1]);
        assert!(matches!(locate_stratum(&prob.gs, &[2.0, 2.0], 1e-6), Err(StrataError::NotOnBoundary { .. })));
    }

    #[test]
    fn critical_fixtures() {
        let prob = catalog::problem("no-central-path").unwrap();
        let s1 = locate_stratum(&prob.gs, &[1.0, 0.0], 1e-6).unwrap();
        let c = critical_on_stratum(&prob.f, &prob.gs, &s1, &[1.0, 0.0], 1e-8).unwrap();
        assert!(c.is_critical);
        assert!((c.multipliers[0] - 0.5).abs() <= 1e-12);
        assert!(c.stationarity_residual <= 1e-15);

        let s12 = locate_stratum(&prob.gs, &[0.0, 1.0], 1e-6).unwrap();
        assert!(critical_on_stratum(&prob.f, &prob.gs, &s12, &[0.0, 1.0], 1e-8).unwrap().is_critical);

        let x2 = gs(&["x2"]).remove(0);
        let c = critical_on_stratum(&x2, &prob.gs, &s1, &[1.0, 0.0], 1e-8).unwrap();
        assert!(!c.is_critical);
        assert!((c.stationarity_residual - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn singular_point_refused() {
        let prob = catalog::problem("figure-eight").unwrap();
        let s = locate_stratum(&prob.gs, &[0.0, 0.0], 1e-6).unwrap();
        assert!(matches!(
            critical_on_stratum(&prob.f, &prob.gs, &s, &[0.0, 0.0], 1e-8),
            Err(StrataError::RankDeficientActiveSet { rank: 0, active: 1 })
        ));
    }

    #[test]
    fn general_position_fixtures() {
        let bbox = [[-2.0, 2.0], [-2.0, 2.0]];
        let rep = check_general_position_in_box(&gs(&["x1^2 + x2^2 - 1", "x1"]), &bbox, 6).unwrap();
        assert!(rep.in_general_position, "{rep:?}");
        assert!(rep.subsets.iter().all(|(_, v)| matches!(v, SubsetVerdict::Regular { .. })));

        let fig8 = catalog::problem("figure-eight").unwrap();
        let rep = check_general_position_in_box(&fig8.gs, &bbox, 6).unwrap();
        assert!(!rep.in_general_position);
        match &rep.subsets[0].1 {
            SubsetVerdict::Deficient { witness, rank } => {
                assert_eq!(*rank, 0);
                assert!(witness.iter().all(|v| v.abs() < 1e-6));
            }
            other => panic!("{other:?}"),
        }

        let rep = check_general_position_in_box(&gs(&["x1", "x1"]), &bbox, 4).unwrap();
        assert!(!rep.in_general_position);
        assert!(matches!(rep.subsets[2].1, SubsetVerdict::Deficient { rank: 1, .. }));
    }

    #[test]
    fn report_json_is_one_based() {
        let prob = catalog::problem("no-central-path").unwrap();
        let s = locate_stratum(&prob.gs, &[0.0, 1.0], 1e-6).unwrap();
        let rep = StratumReport::new(&s, vec![vec![0.0, 1.0]]);
        let v: serde_json::Value = serde_json::to_value(&rep).unwrap();
        assert_eq!(v["active"], serde_json::json!([1, 2]));
        assert_eq!(v["dim"], 0);
        assert_eq!(v["witness_points"][0], serde_json::json!([0.0, 1.0]));
    }
}
