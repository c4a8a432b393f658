//! Dense linear algebra and root finding: damped Newton (Gauss-Newton when
//! overdetermined), numerical rank, minimum-norm least squares, and exact
//! Sturm-sequence root isolation for univariate rational polynomials.

use nalgebra::{DMatrix, DVector};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{rat_from_f64, FloatPoly, PolySystem, RatPoly, Rational};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Newton did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64, x: Vec<f64> },
    #[error("singular Jacobian: damping exhausted at residual {residual:e}")]
    SingularJacobian { residual: f64, x: Vec<f64> },
    #[error("polynomial is not univariate")]
    NotUnivariate,
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("invalid interval [{0}, {1}]")]
    BadInterval(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonConfig {
    pub tol_residual: f64,
    pub tol_step: f64,
    pub max_iters: usize,
    /// Backtracking factor applied to the step length.
    pub damping: f64,
    pub min_damping: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            tol_residual: 1e-10,
            tol_step: 1e-12,
            max_iters: 100,
            damping: 0.5,
            min_damping: 1e-8,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<(), String> {
        let positive = [self.tol_residual, self.tol_step, self.damping, self.min_damping]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite());
        if !positive || self.max_iters == 0 {
            return Err("Newton tolerances must be positive".into());
        }
        if self.tol_step >= self.tol_residual {
            return Err("tol_step must be below tol_residual".into());
        }
        if self.damping >= 1.0 {
            return Err("damping factor must be below 1".into());
        }
        Ok(())
    }
}

/// A system of equations `F(x) = 0` with an analytic Jacobian.
pub trait NonlinearSystem {
    fn nequations(&self) -> usize;
    fn nunknowns(&self) -> usize;
    fn residual(&self, x: &[f64]) -> DVector<f64>;
    fn jacobian(&self, x: &[f64]) -> DMatrix<f64>;
}

/// Float evaluator for polynomial equations with parameters fixed.
///
/// Jacobian entries are the exact symbolic partials, converted to floats once.
#[derive(Debug, Clone)]
pub struct PolyFunction {
    equations: Vec<FloatPoly>,
    jac: Vec<Vec<FloatPoly>>,
    nunknowns: usize,
    params: Vec<f64>,
}

impl PolyFunction {
    /// `equations` are polynomials in `nunknowns + params.len()` variables.
    pub fn new(equations: &[RatPoly], nunknowns: usize, params: &[f64]) -> Self {
        let jac = equations
            .iter()
            .map(|p| p.gradient_in(nunknowns).iter().map(RatPoly::to_f64).collect())
            .collect();
        PolyFunction {
            equations: equations.iter().map(RatPoly::to_f64).collect(),
            jac,
            nunknowns,
            params: params.to_vec(),
        }
    }

    pub fn from_system(sys: &PolySystem, params: &[f64]) -> Self {
        assert_eq!(params.len(), sys.nparams(), "parameter count mismatch");
        Self::new(&sys.equations, sys.nunknowns(), params)
    }

    /// Replaces the parameter values.
    pub fn set_params(&mut self, params: &[f64]) {
        assert_eq!(params.len(), self.params.len(), "parameter count mismatch");
        self.params.copy_from_slice(params);
    }

    fn full_point(&self, x: &[f64]) -> Vec<f64> {
        let mut v = x.to_vec();
        v.extend_from_slice(&self.params);
        v
    }
}

impl NonlinearSystem for PolyFunction {
    fn nequations(&self) -> usize {
        self.equations.len()
    }
    fn nunknowns(&self) -> usize {
        self.nunknowns
    }
    fn residual(&self, x: &[f64]) -> DVector<f64> {
        let p = self.full_point(x);
        DVector::from_iterator(
            self.equations.len(),
            self.equations.iter().map(|e| e.evaluate(&p).expect("point length matches")),
        )
    }
    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let p = self.full_point(x);
        DMatrix::from_fn(self.equations.len(), self.nunknowns, |i, j| {
            self.jac[i][j].evaluate(&p).expect("point length matches")
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonReport {
    pub x: Vec<f64>,
    /// Infinity norm of `F(x)` at the returned point.
    pub residual: f64,
    pub iterations: usize,
    /// Condition estimate of the equilibrated Jacobian at the returned point.
    pub jac_condition: f64,
    /// Infinity norms of the accepted steps, in order.
    pub step_norms: Vec<f64>,
}

fn pow2_scale(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        1.0
    } else {
        // nearest power of two to 1/v, so scaling is exact
        2f64.powi(-(v.log2().round() as i32))
    }
}

/// Row then column equilibration by powers of two. Returns the scaled
/// matrix with the row and column scale factors.
pub fn equilibrate(m: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>, DVector<f64>) {
    let rows = DVector::from_iterator(m.nrows(), m.row_iter().map(|r| pow2_scale(r.amax())));
    let mut s = m.clone();
    for (i, mut r) in s.row_iter_mut().enumerate() {
        r *= rows[i];
    }
    let cols = DVector::from_iterator(s.ncols(), s.column_iter().map(|c| pow2_scale(c.amax())));
    for (j, mut c) in s.column_iter_mut().enumerate() {
        c *= cols[j];
    }
    (s, rows, cols)
}

fn svd_pinv_solve(a: &DMatrix<f64>, b: &DVector<f64>, rcond: f64) -> (DVector<f64>, usize) {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return (DVector::zeros(n), 0);
    }
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let vt = svd.v_t.as_ref().expect("requested V^T");
    let smax = svd.singular_values.max();
    let cutoff = rcond * smax;
    let mut x = DVector::zeros(n);
    let mut rank = 0;
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            rank += 1;
            let coef = u.column(k).dot(b) / s;
            x += vt.row(k).transpose() * coef;
        }
    }
    (x, rank)
}

/// Ratio of extreme singular values (infinite when singular).
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 1.0;
    }
    let sv = m.clone().singular_values();
    let (mx, mn) = (sv.max(), sv.min());
    if mx == 0.0 {
        f64::INFINITY
    } else if mn == 0.0 || m.nrows() < m.ncols() {
        if m.nrows() < m.ncols() {
            // wide matrices: the smallest of the min(m,n) values is used
            mx / mn.max(f64::MIN_POSITIVE)
        } else {
            f64::INFINITY
        }
    } else {
        mx / mn
    }
}

/// Condition number after row and column equilibration.
pub fn scaled_condition(m: &DMatrix<f64>) -> f64 {
    condition_number(&equilibrate(m).0)
}

/// Newton step `J dx = -F` in minimum-norm least-squares form, computed on
/// the equilibrated Jacobian. Returns the step and
/// the row scales, which also weight the line-search merit function.
fn newton_step(j: &DMatrix<f64>, f: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    let (s, rows, cols) = equilibrate(j);
    let rhs = -f.component_mul(&rows);
    let (y, _) = svd_pinv_solve(&s, &rhs, 1e-14);
    (y.component_mul(&cols), rows)
}

/// Damped Newton iteration (Gauss-Newton for overdetermined systems).
///
/// Converges when the residual is below `tol_residual` and every step
/// component satisfies `|dx_i| <= tol_step * max(|x_i|, tol_step)`, or when
/// the residual is below tolerance and has stopped falling.
pub fn newton_solve<S: NonlinearSystem + ?Sized>(
    sys: &S,
    x0: &[f64],
    cfg: &NewtonConfig,
) -> Result<NewtonReport, NumericsError> {
    let n = sys.nunknowns();
    if x0.len() != n {
        return Err(NumericsError::DimensionMismatch { expected: n, got: x0.len() });
    }
    let mut x = DVector::from_column_slice(x0);
    let mut f = sys.residual(x.as_slice());
    let mut steps = Vec::new();
    let mut stagnant = 0;

    for it in 0..cfg.max_iters {
        let r = f.amax();
        if !r.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(NumericsError::NoConvergence { iterations: it, residual: r, x: x.as_slice().to_vec() });
        }
        let j = sys.jacobian(x.as_slice());
        let (dx, rows) = newton_step(&j, &f);
        let step_inf = dx.amax();
        let small = dx
            .iter()
            .zip(x.iter())
            .all(|(d, xi)| d.abs() <= cfg.tol_step * xi.abs().max(cfg.tol_step));
        // steps this close to the iterate are at the rounding floor
        let nearly = dx.iter().zip(x.iter()).all(|(d, xi)| d.abs() <= 1e-6 * xi.abs().max(cfg.tol_step));

        if r <= cfg.tol_residual && (small || nearly) {
            x += &dx;
            steps.push(step_inf);
            f = sys.residual(x.as_slice());
            // at the rounding floor the residual stops falling
            let r_new = f.amax();
            stagnant = if r_new >= 0.5 * r { stagnant + 1 } else { 0 };
            if small || r_new == 0.0 || stagnant >= 3 {
                return Ok(finish(sys, x, f, it + 1, steps));
            }
            continue;
        }

        if r > cfg.tol_residual && step_inf <= cfg.tol_step * x.amax().max(1.0) {
            return Err(NumericsError::NoConvergence { iterations: it, residual: r, x: x.as_slice().to_vec() });
        }

        let base = f.component_mul(&rows).norm();
        let mut t = 1.0;
        loop {
            let xt = &x + &dx * t;
            let ft = sys.residual(xt.as_slice());
            let nt = ft.component_mul(&rows).norm();
            // the scaled merit can be dominated by rounding noise in rows
            // with tiny gradients, so plain decrease also counts
            let armijo = 1.0 - 1e-4 * t;
            if nt.is_finite() && (nt <= armijo * base || ft.amax() <= armijo * r) {
                x = xt;
                f = ft;
                steps.push(step_inf * t);
                break;
            }
            t *= cfg.damping;
            if t < cfg.min_damping {
                if r <= cfg.tol_residual {
                    return Ok(finish(sys, x, f, it + 1, steps));
                }
                let rank = rank_estimate(&equilibrate(&j).0, 1e-8).rank;
                let xs = x.as_slice().to_vec();
                return if rank < n.min(j.nrows()) {
                    Err(NumericsError::SingularJacobian { residual: r, x: xs })
                } else {
                    Err(NumericsError::NoConvergence { iterations: it, residual: r, x: xs })
                };
            }
        }
    }
    let r = f.amax();
    if r <= cfg.tol_residual {
        return Ok(finish(sys, x, f, cfg.max_iters, steps));
    }
    Err(NumericsError::NoConvergence { iterations: cfg.max_iters, residual: r, x: x.as_slice().to_vec() })
}

fn finish<S: NonlinearSystem + ?Sized>(
    sys: &S,
    x: DVector<f64>,
    f: DVector<f64>,
    iterations: usize,
    step_norms: Vec<f64>,
) -> NewtonReport {
    let j = sys.jacobian(x.as_slice());
    NewtonReport {
        residual: f.amax(),
        jac_condition: scaled_condition(&j),
        x: x.as_slice().to_vec(),
        iterations,
        step_norms,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankEstimate {
    pub rank: usize,
    /// Absolute pivot threshold that was applied.
    pub threshold: f64,
    /// Magnitude of the smallest pivot counted towards the rank (0 when rank is 0).
    pub smallest_retained: f64,
}

/// Numerical rank by column-pivoted QR, with the threshold relative to the
/// largest pivot. Columns are first scaled by powers of two to unit max
/// norm, so scaling a column by a power of two never changes the result.
pub fn rank_estimate(m: &DMatrix<f64>, rel_threshold: f64) -> RankEstimate {
    let mut s = m.clone();
    for mut c in s.column_iter_mut() {
        let k = pow2_scale(c.amax());
        c *= k;
    }
    pivoted_rank(&s, rel_threshold, 0.0)
}

/// Rank with both a relative threshold and an absolute pivot floor, on the
/// unscaled matrix. Used where tiny gradients must count as vanishing.
pub fn rank_estimate_abs(m: &DMatrix<f64>, rel_threshold: f64, abs_floor: f64) -> RankEstimate {
    pivoted_rank(m, rel_threshold, abs_floor)
}

fn pivoted_rank(m: &DMatrix<f64>, rel: f64, abs_floor: f64) -> RankEstimate {
    if m.is_empty() || m.amax() == 0.0 {
        return RankEstimate { rank: 0, threshold: abs_floor, smallest_retained: 0.0 };
    }
    let r = m.clone().col_piv_qr().r();
    let k = r.nrows().min(r.ncols());
    let pivots: Vec<f64> = (0..k).map(|i| r[(i, i)].abs()).collect();
    let largest = pivots.iter().cloned().fold(0.0, f64::max);
    let threshold = (rel * largest).max(abs_floor);
    let kept: Vec<f64> = pivots.iter().cloned().filter(|p| *p > threshold).collect();
    RankEstimate {
        rank: kept.len(),
        threshold,
        smallest_retained: kept.iter().cloned().fold(f64::INFINITY, f64::min).min(largest),
    }
    .fix_empty()
}

impl RankEstimate {
    fn fix_empty(mut self) -> Self {
        if self.rank == 0 {
            self.smallest_retained = 0.0;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstsqSolution {
    pub x: Vec<f64>,
    /// Euclidean norm of `A x - b`.
    pub residual: f64,
    pub rank: usize,
}

/// Minimum-norm minimizer of `||A x - b||`.
pub fn lstsq(a: &DMatrix<f64>, b: &[f64]) -> LstsqSolution {
    assert_eq!(a.nrows(), b.len(), "right-hand side length must equal row count");
    let bv = DVector::from_column_slice(b);
    let (x, rank) = svd_pinv_solve(a, &bv, 1e-12);
    let residual = if a.ncols() == 0 { bv.norm() } else { (a * &x - &bv).norm() };
    LstsqSolution { x: x.as_slice().to_vec(), residual, rank }
}

// ---------------------------------------------------------------------------
// Sturm sequences over Q

/// Dense univariate polynomial with ascending rational coefficients.
#[derive(Debug, Clone, PartialEq)]
struct UniPoly(Vec<Rational>);

impl UniPoly {
    fn trimmed(mut v: Vec<Rational>) -> Self {
        while v.last().is_some_and(Zero::is_zero) {
            v.pop();
        }
        UniPoly(v)
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }
    fn lead(&self) -> &Rational {
        self.0.last().expect("nonzero polynomial")
    }
    fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }
    fn derivative(&self) -> Self {
        Self::trimmed(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(k.into()))
                .collect(),
        )
    }
    fn monic(&self) -> Self {
        let l = self.lead().clone();
        UniPoly(self.0.iter().map(|c| c / &l).collect())
    }
    fn divrem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let mut r = self.0.clone();
        if self.0.len() < d.0.len() {
            return (UniPoly(vec![]), Self::trimmed(r));
        }
        let dl = d.lead().clone();
        let dd = d.degree();
        let mut q = vec![Rational::zero(); self.0.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &dl;
            if !c.is_zero() {
                for (i, dc) in d.0.iter().enumerate() {
                    r[k + i] = &r[k + i] - &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::trimmed(q), Self::trimmed(r))
    }
    fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }
}

fn sign_of(r: &Rational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

struct SturmChain(Vec<UniPoly>);

impl SturmChain {
    fn new(p: &UniPoly) -> Self {
        let mut chain = vec![p.clone(), p.derivative()];
        while !chain.last().unwrap().is_zero() {
            let k = chain.len();
            let (_, r) = chain[k - 2].divrem(&chain[k - 1]);
            chain.push(UniPoly(r.0.iter().map(|c| -c).collect()));
        }
        chain.pop();
        SturmChain(chain)
    }

    fn variations(&self, x: &Rational) -> usize {
        let mut last = 0i8;
        let mut count = 0;
        for p in &self.0 {
            let s = sign_of(&p.eval(x));
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// Distinct roots in the half-open interval `(a, b]`.
    fn count(&self, a: &Rational, b: &Rational) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }
}

/// An isolating interval `[lo, hi]` containing exactly one real root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootInterval {
    pub lo: f64,
    pub hi: f64,
}

impl RootInterval {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Isolates every distinct real root of a univariate rational polynomial in
/// `[lo, hi]`, refining each isolating interval to width at most `1e-12`.
///
/// Arithmetic is exact; roots of multiplicity > 1 are reported once.
pub fn sturm_roots(p: &RatPoly, lo: f64, hi: f64) -> Result<Vec<RootInterval>, NumericsError> {
    const WIDTH: f64 = 1e-12;
    let coeffs = p.univariate_coeffs().ok_or(NumericsError::NotUnivariate)?;
    let up = UniPoly::trimmed(coeffs);
    if up.is_zero() {
        return Err(NumericsError::ZeroPolynomial);
    }
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(NumericsError::BadInterval(lo, hi));
    }
    if up.degree() == 0 {
        return Ok(vec![]);
    }
    let sqfree = {
        let g = up.gcd(&up.derivative());
        up.divrem(&g).0
    };
    let chain = SturmChain::new(&sqfree);
    let a = rat_from_f64(lo).expect("finite");
    let b = rat_from_f64(hi).expect("finite");
    let width = rat_from_f64(WIDTH).expect("finite");
    let two = Rational::from_integer(2.into());

    let mut out: Vec<(Rational, Rational)> = Vec::new();
    if sqfree.eval(&a).is_zero() {
        out.push((a.clone(), a.clone()));
    }
    let mut stack = vec![(a.clone(), b.clone(), chain.count(&a, &b))];
    while let Some((l, h, n)) = stack.pop() {
        match n {
            0 => {}
            1 => {
                out.push(refine(&sqfree, l, h, &width, &two));
            }
            _ => {
                let m = (&l + &h) / &two;
                let left = chain.count(&l, &m);
                stack.push((m.clone(), h, n - left));
                stack.push((l, m, left));
            }
        }
    }
    out.sort_by(|x, y| x.0.cmp(&y.0));
    Ok(out
        .into_iter()
        .map(|(l, h)| RootInterval { lo: crate::poly::Coeff::to_f64(&l), hi: crate::poly::Coeff::to_f64(&h) })
        .collect())
}

/// Bisects `(l, h]`, known to hold exactly one root of the square-free `p`.
fn refine(p: &UniPoly, mut l: Rational, mut h: Rational, width: &Rational, two: &Rational) -> (Rational, Rational) {
    if p.eval(&h).is_zero() {
        return (h.clone(), h);
    }
    let sh = sign_of(&p.eval(&h));
    while &h - &l > *width {
        let m = (&l + &h) / two;
        let sm = sign_of(&p.eval(&m));
        if sm == 0 {
            return (m.clone(), m);
        }
        if sm == sh {
            h = m;
        } else {
            l = m;
        }
    }
    (l, h)
}

/// Least common multiple of positive integers.
pub fn lcm_all(values: &[u64]) -> u64 {
    values.iter().fold(1u64, |acc, &v| if v == 0 { acc } else { acc.lcm(&v) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_poly;
    use crate::poly::rat;

    struct Closure<F: Fn(&[f64]) -> (DVector<f64>, DMatrix<f64>)> {
        n: usize,
        m: usize,
        f: F,
    }
    impl<F: Fn(&[f64]) -> (DVector<f64>, DMatrix<f64>)> NonlinearSystem for Closure<F> {
        fn nequations(&self) -> usize {
            self.m
        }
        fn nunknowns(&self) -> usize {
            self.n
        }
        fn residual(&self, x: &[f64]) -> DVector<f64> {
            (self.f)(x).0
        }
        fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
            (self.f)(x).1
        }
    }

    #[test]
    fn newton_square_root() {
        let sys = Closure {
            n: 1,
            m: 1,
            f: |x: &[f64]| (DVector::from_vec(vec![x[0] * x[0] - 4.0]), DMatrix::from_vec(1, 1, vec![2.0 * x[0]])),
        };
        let rep = newton_solve(&sys, &[3.0], &NewtonConfig::default()).unwrap();
        assert!((rep.x[0] - 2.0).abs() <= 1e-12);
        assert!(rep.residual <= 1e-10);
    }

    #[test]
    fn newton_inconsistent_padded() {
        let sys = Closure {
            n: 2,
            m: 2,
            f: |x: &[f64]| {
                (DVector::from_vec(vec![x[0], x[0] - 1.0]), DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]))
            },
        };
        let err = newton_solve(&sys, &[3.0, 0.0], &NewtonConfig::default()).unwrap_err();
        assert!(matches!(err, NumericsError::NoConvergence { .. }), "{err:?}");
    }

    #[test]
    fn newton_dimension_mismatch() {
        let sys = Closure {
            n: 1,
            m: 1,
            f: |x: &[f64]| (DVector::from_vec(vec![x[0]]), DMatrix::from_vec(1, 1, vec![1.0])),
        };
        assert!(matches!(
            newton_solve(&sys, &[1.0, 2.0], &NewtonConfig::default()),
            Err(NumericsError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn newton_matches_sturm_on_cubic() {
        // x^3 - 3 mu x^2 - x + mu at mu = 1e-4
        let t = vec!["t".to_string()];
        let cubic = parse_poly("t^3 - 3/10000*t^2 - t + 1/10000", &t).unwrap();
        let roots = sturm_roots(&cubic, -2.0, 2.0).unwrap();
        assert_eq!(roots.len(), 3);
        let oracle = roots.iter().map(RootInterval::mid).find(|r| *r > 0.5).unwrap();
        let f = PolyFunction::new(&[cubic], 1, &[]);
        let rep = newton_solve(&f, &[1.0], &NewtonConfig::default()).unwrap();
        assert!((rep.x[0] - oracle).abs() <= 1e-10, "{} vs {}", rep.x[0], oracle);
    }

    #[test]
    fn rank_fixtures() {
        assert_eq!(rank_estimate(&DMatrix::from_row_slice(1, 2, &[0.0, 0.0]), 1e-8).rank, 0);
        // gradient of the figure-eight constraint at the origin
        let fig8 = parse_poly("x1^2 - x1^4 - x2^4 - x2^2", &["x1".into(), "x2".into()]).unwrap();
        let g: Vec<f64> = fig8.gradient().iter().map(|p| p.evaluate(&[0.0, 0.0]).unwrap()).collect();
        assert_eq!(rank_estimate(&DMatrix::from_row_slice(1, 2, &g), 1e-8).rank, 0);
        // J({x1^2 + x2^2 - 1, x1}) at (0, 1)
        let j = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 1.0, 0.0]);
        let est = rank_estimate(&j, 1e-8);
        assert_eq!(est.rank, 2);
        assert!(est.smallest_retained > 0.0);
        let dup = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]);
        assert_eq!(rank_estimate(&dup, 1e-8).rank, 1);
    }

    #[test]
    fn sturm_fixtures() {
        let t = vec!["t".to_string()];
        let p = parse_poly("t^2 + 1", &t).unwrap();
        assert!(sturm_roots(&p, -10.0, 10.0).unwrap().is_empty());
        // 6t^2 + 4 xi t + xi^2 at xi = 1/10
        let p = parse_poly("6*t^2 + 4/10*t + 1/100", &t).unwrap();
        assert!(sturm_roots(&p, -10.0, 10.0).unwrap().is_empty());

        let p = parse_poly("t^3 - 3/100*t^2 - t + 1/100", &t).unwrap();
        let roots = sturm_roots(&p, -2.0, 2.0).unwrap();
        assert_eq!(roots.len(), 3);
        for r in &roots {
            assert!(r.hi - r.lo <= 1e-12);
        }
        assert!((roots[2].mid() - 1.01).abs() < 1e-3);

        // repeated and exact endpoint roots
        let p = parse_poly("(t - 1)^2*(t + 1/2)", &t).unwrap();
        let roots = sturm_roots(&p, -0.5, 1.0).unwrap();
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[0].lo, -0.5);
        assert_eq!(roots[1].lo, 1.0);

        assert_eq!(sturm_roots(&RatPoly::zero(1), 0.0, 1.0), Err(NumericsError::ZeroPolynomial));
        let two = parse_poly("x1*x2", &["x1".into(), "x2".into()]).unwrap();
        assert_eq!(sturm_roots(&two, 0.0, 1.0), Err(NumericsError::NotUnivariate));
        let _ = rat(1, 2);
    }

    #[test]
    fn lstsq_fixtures() {
        // grad f = (1,0), grad g1 = (2,0): solve [2;0] u = [1;0]
        let a = DMatrix::from_row_slice(2, 1, &[2.0, 0.0]);
        let s = lstsq(&a, &[1.0, 0.0]);
        assert!((s.x[0] - 0.5).abs() < 1e-15);
        assert!(s.residual < 1e-15);

        let z = DMatrix::zeros(2, 2);
        let s = lstsq(&z, &[1.0, 2.0]);
        assert_eq!(s.x, vec![0.0, 0.0]);

        let a = DMatrix::from_row_slice(2, 1, &[1.0, 1.0]);
        let s = lstsq(&a, &[0.0, 1.0]);
        assert!((s.x[0] - 0.5).abs() < 1e-15);
        assert!(s.residual > 0.5);
    }
}
