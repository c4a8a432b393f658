//! Exact builders for the algebraic systems attached to a problem.
//!
//! Variable layouts:
//! - barrier / cleared: `(x1..xn; mu)`
//! - KKT: `(x1..xn, u1..us; xi1..xis)`
//! - projective: `(x0..xn, u0..us; c)` or `(…; mu)` for the central system

use num_complex::Complex64;

use crate::ingest::POProblem;
use crate::numerics::{rank_estimate, NonlinearSystem, PolyFunction};
use crate::poly::{PolySystem, RatPoly, Rational};

/// One summand `num / prod_{i in den} g_i` of a barrier condition.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierTerm {
    /// Polynomial in `(x; mu)`.
    pub num: RatPoly,
    /// Indices (0-based) of the constraints in the denominator.
    pub den: Vec<usize>,
}

/// First-order conditions of the log-barrier function, one rational
/// expression per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierSystem {
    pub nvars: usize,
    /// Constraints lifted to `(x; mu)`.
    pub gs: Vec<RatPoly>,
    pub conditions: Vec<Vec<BarrierTerm>>,
}

impl BarrierSystem {
    /// Value of every condition at `x` for barrier parameter `mu`.
    pub fn evaluate(&self, x: &[f64], mu: f64) -> Vec<f64> {
        let mut p = x.to_vec();
        p.push(mu);
        let gv: Vec<f64> = self.gs.iter().map(|g| g.evaluate(&p).expect("lifted")).collect();
        self.conditions
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .map(|t| t.num.evaluate(&p).expect("lifted") / t.den.iter().map(|&i| gv[i]).product::<f64>())
                    .sum()
            })
            .collect()
    }

    /// The conditions multiplied through by `prod g_i`, exactly.
    pub fn cleared_numerators(&self) -> Vec<RatPoly> {
        let all: Vec<usize> = (0..self.gs.len()).collect();
        self.conditions
            .iter()
            .map(|terms| {
                terms.iter().fold(RatPoly::zero(self.nvars + 1), |acc, t| {
                    let rest = all.iter().filter(|i| !t.den.contains(i));
                    let mult = rest.fold(RatPoly::one(self.nvars + 1), |m, &i| &m * &self.gs[i]);
                    &acc + &(&t.num * &mult)
                })
            })
            .collect()
    }

    /// Each condition rendered as `num/(den)` summands.
    pub fn to_strings(&self, varnames: &[String]) -> Vec<String> {
        let mut names = varnames.to_vec();
        names.push("mu".into());
        self.conditions
            .iter()
            .map(|terms| {
                let parts: Vec<String> = terms
                    .iter()
                    .map(|t| {
                        let num = t.num.to_string_with(&names);
                        if t.den.is_empty() {
                            format!("({num})")
                        } else {
                            let den: Vec<String> =
                                t.den.iter().map(|&i| format!("({})", self.gs[i].to_string_with(&names))).collect();
                            format!("({num})/{}", den.join("*"))
                        }
                    })
                    .collect();
                parts.join(" + ")
            })
            .collect()
    }
}

fn lift(p: &RatPoly, extra: usize) -> RatPoly {
    let n = p.nvars();
    p.embed(n + extra, &(0..n).collect::<Vec<_>>())
}

pub fn build_barrier_system(prob: &POProblem) -> BarrierSystem {
    let n = prob.nvars();
    let mu = RatPoly::var(n + 1, n);
    let gs: Vec<RatPoly> = prob.gs.iter().map(|g| lift(g, 1)).collect();
    let conditions = (0..n)
        .map(|j| {
            let mut terms = vec![BarrierTerm { num: lift(&prob.f.derivative(j), 1), den: vec![] }];
            for (i, g) in prob.gs.iter().enumerate() {
                let dg = g.derivative(j);
                if !dg.is_zero() {
                    terms.push(BarrierTerm { num: -&(&mu * &lift(&dg, 1)), den: vec![i] });
                }
            }
            terms
        })
        .collect();
    BarrierSystem { nvars: n, gs, conditions }
}

/// Polynomial critical-point system of the barrier, cleared of denominators.
#[derive(Debug, Clone, PartialEq)]
pub struct ClearedSystem {
    pub system: PolySystem,
}

impl ClearedSystem {
    pub fn nvars(&self) -> usize {
        self.system.nunknowns()
    }

    /// Equations with `mu` fixed to an exact value, in `x` only.
    pub fn at_mu(&self, mu: &Rational) -> Vec<RatPoly> {
        let n = self.nvars();
        self.system
            .specialize(std::slice::from_ref(mu))
            .iter()
            .map(|p| project_out_trailing(p, n))
            .collect()
    }
}

/// Drops trailing variables that no longer occur.
fn project_out_trailing(p: &RatPoly, keep: usize) -> RatPoly {
    debug_assert!(p.uses_only_first(keep));
    RatPoly::from_terms(keep, p.terms().iter().map(|(c, e)| (c.clone(), e[..keep].to_vec())))
}

pub fn build_cleared_system(prob: &POProblem) -> ClearedSystem {
    let n = prob.nvars();
    let r = prob.nconstraints();
    let mu = RatPoly::var(n + 1, n);
    let gs: Vec<RatPoly> = prob.gs.iter().map(|g| lift(g, 1)).collect();
    let prod_except = |skip: Option<usize>| {
        (0..r).filter(|i| Some(*i) != skip).fold(RatPoly::one(n + 1), |m, i| &m * &gs[i])
    };
    let all = prod_except(None);
    let equations = (0..n)
        .map(|j| {
            let mut eq = &lift(&prob.f.derivative(j), 1) * &all;
            for (k, g) in prob.gs.iter().enumerate() {
                let dg = g.derivative(j);
                if !dg.is_zero() {
                    eq = &eq - &(&(&mu * &lift(&dg, 1)) * &prod_except(Some(k)));
                }
            }
            eq
        })
        .collect();
    let system = PolySystem::new(equations, prob.varnames.clone(), vec!["mu".into()]).expect("consistent sizes");
    ClearedSystem { system }
}

/// Lagrange system `dF - sum u_i dP_i = 0, P_i = xi_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct KKTSystem {
    pub n: usize,
    pub s: usize,
    pub system: PolySystem,
}

impl KKTSystem {
    /// Equations at fixed `xi`, as polynomials in `(x, u)`.
    pub fn at_xi(&self, xi: &[Rational]) -> Vec<RatPoly> {
        let k = self.n + self.s;
        self.system.specialize(xi).iter().map(|p| project_out_trailing(p, k)).collect()
    }
}

fn numbered(prefix: &str, from: usize, to: usize) -> Vec<String> {
    (from..=to).map(|i| format!("{prefix}{i}")).collect()
}

pub fn build_kkt_system(f: &RatPoly, ps: &[RatPoly]) -> KKTSystem {
    let n = f.nvars();
    let s = ps.len();
    assert!(ps.iter().all(|p| p.nvars() == n), "all polynomials must share the variable count");
    if s > n {
        log::warn!("KKT system with {s} constraints in {n} variables is overdetermined");
    }
    let total = n + 2 * s;
    let xmap: Vec<usize> = (0..n).collect();
    let up = |p: &RatPoly| p.embed(total, &xmap);
    let mut equations = Vec::with_capacity(n + s);
    for j in 0..n {
        let mut row = up(&f.derivative(j));
        for (i, p) in ps.iter().enumerate() {
            row = &row - &(&RatPoly::var(total, n + i) * &up(&p.derivative(j)));
        }
        equations.push(row);
    }
    for (i, p) in ps.iter().enumerate() {
        equations.push(&up(p) - &RatPoly::var(total, n + s + i));
    }
    let mut names = crate::ingest::catalog::default_names(n);
    names.extend(numbered("u", 1, s));
    let system = PolySystem::new(equations, names, numbered("xi", 1, s)).expect("consistent sizes");
    KKTSystem { n, s, system }
}

/// Bi-homogeneous system in `(x0..xn; u0..us)` with one trailing parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveKKTSystem {
    pub n: usize,
    pub s: usize,
    pub system: PolySystem,
}

impl ProjectiveKKTSystem {
    pub fn xblock(&self) -> Vec<usize> {
        (0..=self.n).collect()
    }

    pub fn ublock(&self) -> Vec<usize> {
        (self.n + 1..=self.n + 1 + self.s).collect()
    }

    /// Equations with the parameter fixed, in `(x0..xn, u0..us)`.
    pub fn at_param(&self, value: &Rational) -> Vec<RatPoly> {
        let k = self.n + self.s + 2;
        self.system
            .specialize(std::slice::from_ref(value))
            .iter()
            .map(|p| project_out_trailing(p, k))
            .collect()
    }

    /// Largest equation modulus at a (possibly complex) point `(x; u)` with
    /// parameter `c`.
    pub fn residual_at(&self, c: f64, x: &[Complex64], u: &[Complex64]) -> f64 {
        let mut point: Vec<Complex64> = x.iter().chain(u).cloned().collect();
        point.push(Complex64::new(c, 0.0));
        self.system
            .equations
            .iter()
            .map(|e| e.evaluate(&point).expect("projective point dimension").norm())
            .fold(0.0, f64::max)
    }

    /// Numerical rank of the Jacobian in `(x; u)` at a real point.
    pub fn jacobian_rank(&self, c: f64, x: &[f64], u: &[f64]) -> usize {
        let func = PolyFunction::from_system(&self.system, &[c]);
        let point: Vec<f64> = x.iter().chain(u).cloned().collect();
        rank_estimate(&func.jacobian(&point), 1e-8).rank
    }

    /// A zero is non-singular when its Jacobian has full row rank `n + s`.
    pub fn is_nonsingular_at(&self, c: f64, x: &[f64], u: &[f64]) -> bool {
        self.jacobian_rank(c, x, u) == self.system.equations.len()
    }
}

/// Stationarity rows `u0 dF_j - sum u_i dP_ij`, bi-homogenized with the
/// u-degree fixed at 1. Input polys live in `n` variables; output rows live
/// in `(x0..xn, u0..us, param)`.
fn projective_stationarity(f: &RatPoly, ps: &[RatPoly]) -> Vec<RatPoly> {
    let n = f.nvars();
    let s = ps.len();
    let total = n + s + 1;
    let xmap: Vec<usize> = (0..n).collect();
    let up = |p: &RatPoly| p.embed(total, &xmap);
    let xblock: Vec<usize> = (0..n).collect();
    let ublock: Vec<usize> = (n..n + s).collect();
    (0..n)
        .map(|j| {
            let mut row = up(&f.derivative(j));
            for (i, p) in ps.iter().enumerate() {
                row = &row - &(&RatPoly::var(total, n + i) * &up(&p.derivative(j)));
            }
            let dx = row.block_degree(&xblock).finite().unwrap_or(0);
            row.bihomogenize_to(&xblock, &ublock, dx, 1).expect("blocks are disjoint")
        })
        .collect()
}

/// Degree of a polynomial, zero for the zero polynomial.
fn deg0(p: &RatPoly) -> u32 {
    p.degree().finite().unwrap_or(0)
}

fn projective_names(n: usize, s: usize) -> Vec<String> {
    let mut names = numbered("x", 0, n);
    names.extend(numbered("u", 0, s));
    names
}

/// Projective KKT system with rows `P_i^H - c x0^{deg P_i}`.
pub fn build_projective_kkt(f: &RatPoly, ps: &[RatPoly]) -> ProjectiveKKTSystem {
    let n = f.nvars();
    let s = ps.len();
    let total = n + s + 3;
    let c = RatPoly::var(total, total - 1);
    let x0 = RatPoly::var(total, 0);
    let mut equations = projective_stationarity(f, ps);
    let xblock: Vec<usize> = (0..n).collect();
    let xmap: Vec<usize> = (0..n).collect();
    for p in ps {
        let d = deg0(p);
        let ph = p.embed(n + 1, &xmap).bihomogenize_to(&xblock, &[], d, 0).expect("blocks are disjoint");
        // ph lives in (x0, x1..xn, u0, param); move it into the full layout
        let mut map: Vec<usize> = (0..=n).collect();
        map.push(n + 1);
        map.push(total - 1);
        let ph = ph.embed(total, &map);
        equations.push(&ph - &(&c * &x0.pow(d)));
    }
    let system = PolySystem::new(equations, projective_names(n, s), vec!["c".into()]).expect("consistent sizes");
    ProjectiveKKTSystem { n, s, system }
}

/// Projective central system: stationarity rows plus
/// `u_i g_i^H - mu u0 x0^{deg g_i}`.
pub fn build_projective_central(prob: &POProblem) -> ProjectiveKKTSystem {
    let n = prob.nvars();
    let r = prob.nconstraints();
    let total = n + r + 3;
    let mut equations = projective_stationarity(&prob.f, &prob.gs);
    let xmap: Vec<usize> = (0..n).collect();
    let xblock: Vec<usize> = (0..n).collect();
    let ublock: Vec<usize> = (n..n + r).collect();
    let inner = n + r + 1;
    let mu = RatPoly::var(inner, n + r);
    for (i, g) in prob.gs.iter().enumerate() {
        let row = &(&RatPoly::var(inner, n + i) * &g.embed(inner, &xmap)) - &mu;
        equations.push(row.bihomogenize_to(&xblock, &ublock, deg0(g), 1).expect("blocks are disjoint"));
    }
    debug_assert!(equations.iter().all(|e| e.nvars() == total));
    let system =
        PolySystem::new(equations, projective_names(n, r), vec!["mu".into()]).expect("consistent sizes");
    ProjectiveKKTSystem { n, s: r, system }
}

/// JSON list of printed equations.
pub fn dump_system(sys: &PolySystem) -> String {
    serde_json::to_string_pretty(&sys.to_strings()).expect("strings serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{catalog, parse_poly};
    use crate::poly::rat;

    fn one() -> Rational {
        rat(1, 1)
    }

    fn names_mu() -> Vec<String> {
        vec!["x1".into(), "x2".into(), "mu".into()]
    }

    fn p(src: &str, names: &[String]) -> RatPoly {
        parse_poly(src, names).unwrap()
    }

    #[test]
    fn cusp_barrier_and_cleared() {
        let prob = catalog::problem("cusp").unwrap();
        let b = build_barrier_system(&prob);
        // 1 - 3 mu x1^2/(x1^3 - x2^2) and 2 mu x2/(x1^3 - x2^2)
        let v = b.evaluate(&[0.5, 0.1], 0.01);
        let g = 0.125 - 0.01;
        assert!((v[0] - (1.0 - 3.0 * 0.01 * 0.25 / g)).abs() < 1e-14);
        assert!((v[1] - 2.0 * 0.01 * 0.1 / g).abs() < 1e-14);

        let c = build_cleared_system(&prob);
        let nm = names_mu();
        assert_eq!(c.system.equations[0], p("x1^3 - x2^2 - 3*mu*x1^2", &nm));
        assert_eq!(c.system.equations[1], p("2*mu*x2", &nm));
        assert_eq!(b.cleared_numerators(), c.system.equations);
    }

    #[test]
    fn constant_constraint_reduces_to_gradient() {
        let names = catalog::default_names(2);
        let prob = POProblem::new("t", names.clone(), p("x1^2 + x2", &names), vec![p("1", &names)]).unwrap();
        let c = build_cleared_system(&prob);
        assert_eq!(c.system.equations[0], p("2*x1", &names_mu()));
        assert_eq!(c.system.equations[1], p("1", &names_mu()));
    }

    #[test]
    fn non_existence_barrier() {
        let prob = catalog::problem("non-existence").unwrap();
        let b = build_barrier_system(&prob);
        // x2^2 - mu/x1 = 0 and 2 x1 x2 - mu/x2 = 0
        let nm = names_mu();
        assert_eq!(b.conditions[0][0].num, p("x2^2", &nm));
        assert_eq!(b.conditions[0][1], BarrierTerm { num: p("-mu", &nm), den: vec![0] });
        assert_eq!(b.conditions[1][1], BarrierTerm { num: p("-mu", &nm), den: vec![1] });
        let c = build_cleared_system(&prob);
        assert_eq!(c.system.equations[0], p("x1*x2^3 - mu*x2", &nm));
        assert_eq!(c.system.equations[1], p("2*x1^2*x2^2 - mu*x1", &nm));
    }

    #[test]
    fn no_central_path_cleared_contains_cubic() {
        let prob = catalog::problem("no-central-path").unwrap();
        let c = build_cleared_system(&prob);
        let nm = names_mu();
        // on x2 = 0 the first equation factors through the cubic
        let e0 = c.system.equations[0].substitute(&[(1, rat(0, 1))]);
        let cubic = p("x1^3 - 3*mu*x1^2 - x1 + mu", &nm);
        assert_eq!(e0, cubic);
        let e1 = &c.system.equations[1];
        assert_eq!(e1, &p("-2*mu*x1*x2", &nm));
    }

    #[test]
    fn figure_eight_second_equation() {
        let prob = catalog::problem("figure-eight").unwrap();
        let c = build_cleared_system(&prob);
        let nm = names_mu();
        assert_eq!(c.system.equations[1], p("mu*(4*x2^3 + 2*x2)", &nm));
    }

    #[test]
    fn kkt_remark() {
        let (f, ps) = catalog::kkt_fixture("remark-no-critical-path").unwrap();
        let k = build_kkt_system(&f, &ps);
        let names: Vec<String> = ["x1", "x2", "u1", "xi1"].iter().map(|s| s.to_string()).collect();
        assert_eq!(k.system.equations, vec![p("2*x1", &names), p("-2*x2 - u1", &names), p("x2 - xi1", &names)]);
        let xi = rat(3, 10);
        let eqs = k.at_xi(std::slice::from_ref(&xi));
        let sol = [0.0, 0.3, -0.6];
        for e in &eqs {
            assert!(e.evaluate(&sol).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn kkt_non_degenerate_solutions() {
        let (f, ps) = catalog::kkt_fixture("non-degenerate").unwrap();
        let k = build_kkt_system(&f, &ps);
        let eqs = k.at_xi(&[one()]);
        for sol in [[1.0, 1.0, 1.0], [-1.0, -1.0, -1.0]] {
            for e in &eqs {
                assert_eq!(e.evaluate(&sol).unwrap(), 0.0);
            }
        }
    }

    fn proj_names(n: usize, s: usize, param: &str) -> Vec<String> {
        let mut v = projective_names(n, s);
        v.push(param.into());
        v
    }

    #[test]
    fn projective_fixtures() {
        let (f, ps) = catalog::kkt_fixture("finitely-many").unwrap();
        let sys = build_projective_kkt(&f, &ps);
        let nm = proj_names(2, 1, "c");
        assert_eq!(
            sys.system.equations,
            vec![p("u0*x0^2 - 3*u1*x1^2", &nm), p("2*u1*x2", &nm), p("x1^3 - x2^2*x0 - c*x0^3", &nm)]
        );
        let (f, ps) = catalog::kkt_fixture("non-degenerate").unwrap();
        let sys = build_projective_kkt(&f, &ps);
        assert_eq!(
            sys.system.equations,
            vec![p("u0*x0 - u1*x2", &nm), p("u0*x0 - u1*x1", &nm), p("x1*x2 - c*x0^2", &nm)]
        );
    }

    #[test]
    fn projective_constant_objective() {
        let names = catalog::default_names(2);
        let sys = build_projective_kkt(&p("5", &names), &[p("x1 - 1", &names)]);
        let nm = proj_names(2, 1, "c");
        assert_eq!(sys.system.equations[0], p("-u1", &nm));
        assert_eq!(sys.system.equations[1], RatPoly::zero(6));
        assert_eq!(sys.system.equations[2], p("x1 - x0 - c*x0", &nm));
    }

    #[test]
    fn projective_central_cusp() {
        let prob = catalog::problem("cusp").unwrap();
        let sys = build_projective_central(&prob);
        let nm = proj_names(2, 1, "mu");
        assert_eq!(
            sys.system.equations,
            vec![
                p("u0*x0^2 - 3*u1*x1^2", &nm),
                p("2*u1*x2", &nm),
                p("u1*(x1^3 - x2^2*x0) - mu*u0*x0^3", &nm)
            ]
        );
        // mu = 0 gives the projective KKT rows with c = 0
        let (f, ps) = catalog::kkt_fixture("finitely-many").unwrap();
        let kkt = build_projective_kkt(&f, &ps).at_param(&rat(0, 1));
        let central = sys.at_param(&rat(0, 1));
        assert_eq!(central[..2], kkt[..2]);
    }

    #[test]
    fn projective_central_linear_constraint() {
        let prob = catalog::problem("morse-central").unwrap();
        let sys = build_projective_central(&prob);
        let nm = proj_names(2, 1, "mu");
        assert_eq!(sys.system.equations[2], p("u1*x2 - mu*u0*x0", &nm));
    }

    #[test]
    fn dump_is_json_list() {
        let prob = catalog::problem("cusp").unwrap();
        let out = dump_system(&build_cleared_system(&prob).system);
        let v: Vec<String> = serde_json::from_str(&out).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[1], "2*x2*mu");
    }
}
