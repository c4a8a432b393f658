//! Sparse multivariate polynomials over exact rationals or floats.
//!
//! Terms are kept in graded lexicographic order (highest total degree first,
//! ties broken lexicographically with `x_0 > x_1 > ...`), with no repeated
//! exponent vectors and no zero coefficients. Two polynomials with the same
//! coefficients are therefore structurally equal.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

/// Polynomial with exact rational coefficients, used by every system builder.
pub type RatPoly = Polynomial<Rational>;
/// Polynomial with float coefficients, used by the solvers.
pub type FloatPoly = Polynomial<f64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("dimension mismatch: polynomial has {expected} variables, point has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("variable blocks overlap at index {0}")]
    OverlappingBlocks(usize),
    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },
}

/// Total degree. The zero polynomial has degree `NegInfinity`, which compares
/// below every finite degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(u32),
}

impl Degree {
    pub fn finite(self) -> Option<u32> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// Coefficient domain of a [`Polynomial`].
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_u32(n: u32) -> Self;
    fn to_f64(&self) -> f64;
    fn is_negative_coeff(&self) -> bool;
    fn abs_coeff(&self) -> Self;
    fn fmt_coeff(&self) -> String;
}

impl Coeff for Rational {
    fn from_u32(n: u32) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_negative_coeff(&self) -> bool {
        self.is_negative()
    }
    fn abs_coeff(&self) -> Self {
        self.abs()
    }
    fn fmt_coeff(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

impl Coeff for f64 {
    fn from_u32(n: u32) -> Self {
        n as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_negative_coeff(&self) -> bool {
        *self < 0.0
    }
    fn abs_coeff(&self) -> Self {
        self.abs()
    }
    fn fmt_coeff(&self) -> String {
        format!("{self:?}")
    }
}

/// Embedding of a coefficient into an evaluation scalar.
pub trait Lift<S> {
    fn lift(&self) -> S;
}

impl Lift<f64> for Rational {
    fn lift(&self) -> f64 {
        Coeff::to_f64(self)
    }
}
impl Lift<Complex64> for Rational {
    fn lift(&self) -> Complex64 {
        Complex64::new(Coeff::to_f64(self), 0.0)
    }
}
impl Lift<Rational> for Rational {
    fn lift(&self) -> Rational {
        self.clone()
    }
}
impl Lift<f64> for f64 {
    fn lift(&self) -> f64 {
        *self
    }
}
impl Lift<Complex64> for f64 {
    fn lift(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
}

/// Ring in which polynomials can be evaluated.
pub trait Scalar: Clone + Zero + One + Add<Output = Self> + Mul<Output = Self> {}
impl<T: Clone + Zero + One + Add<Output = T> + Mul<Output = T>> Scalar for T {}

/// Exact conversion of an integer ratio into a [`Rational`].
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exact rational value of a finite float.
pub fn rat_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

fn grlex_desc(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    db.cmp(&da).then_with(|| b.cmp(a))
}

fn term_degree(exps: &[u32]) -> u32 {
    exps.iter().sum()
}

#[derive(Clone, PartialEq)]
pub struct Polynomial<C> {
    nvars: usize,
    terms: Vec<(C, Vec<u32>)>,
}

impl<C: Coeff> fmt::Debug for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("v{i}")).collect();
        write!(f, "Polynomial[{}]({})", self.nvars, self.to_string_with(&names))
    }
}

impl<C: Coeff> Polynomial<C> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::from_terms(nvars, [(c, vec![0; nvars])])
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    /// The polynomial `x_index`.
    pub fn var(nvars: usize, index: usize) -> Self {
        assert!(index < nvars, "variable {index} out of range for {nvars} variables");
        let mut e = vec![0; nvars];
        e[index] = 1;
        Polynomial { nvars, terms: vec![(C::one(), e)] }
    }

    pub fn monomial(c: C, exps: Vec<u32>) -> Self {
        let nvars = exps.len();
        Self::from_terms(nvars, [(c, exps)])
    }

    /// Builds a canonical polynomial, merging duplicate exponents and dropping
    /// zero coefficients.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (C, Vec<u32>)>,
    {
        let mut acc: BTreeMap<Vec<u32>, C> = BTreeMap::new();
        for (c, e) in terms {
            assert_eq!(e.len(), nvars, "exponent tuple length must equal nvars");
            if c.is_zero() {
                continue;
            }
            match acc.get_mut(&e) {
                Some(v) => *v = v.clone() + c,
                None => {
                    acc.insert(e, c);
                }
            }
        }
        let mut terms: Vec<(C, Vec<u32>)> = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (c, e))
            .collect();
        terms.sort_by(|a, b| grlex_desc(&a.1, &b.1));
        Polynomial { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Terms in canonical (graded lexicographic, descending) order.
    pub fn terms(&self) -> &[(C, Vec<u32>)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(_, e)| e.iter().all(|&k| k == 0))
    }

    pub fn constant_term(&self) -> C {
        self.terms
            .iter()
            .find(|(_, e)| e.iter().all(|&k| k == 0))
            .map(|(c, _)| c.clone())
            .unwrap_or_else(C::zero)
    }

    pub fn degree(&self) -> Degree {
        self.terms
            .first()
            .map(|(_, e)| Degree::Finite(term_degree(e)))
            .unwrap_or(Degree::NegInfinity)
    }

    /// Degree restricted to the variables listed in `block`.
    pub fn block_degree(&self, block: &[usize]) -> Degree {
        self.terms
            .iter()
            .map(|(_, e)| Degree::Finite(block.iter().map(|&i| e[i]).sum()))
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    pub fn degree_in(&self, var: usize) -> Degree {
        self.block_degree(&[var])
    }

    /// Whether every variable index used lies below `limit`.
    pub fn uses_only_first(&self, limit: usize) -> bool {
        self.terms
            .iter()
            .all(|(_, e)| e.iter().skip(limit).all(|&k| k == 0))
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.terms.first() {
            None => true,
            Some((_, e0)) => {
                let d = term_degree(e0);
                self.terms.iter().all(|(_, e)| term_degree(e) == d)
            }
        }
    }

    pub fn is_homogeneous_in(&self, block: &[usize]) -> bool {
        let mut degs = self
            .terms
            .iter()
            .map(|(_, e)| block.iter().map(|&i| e[i]).sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|k| k == d),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms.iter().map(|(k, e)| (k.clone() * c.clone(), e.clone())),
        )
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Formal partial derivative in variable `j`.
    pub fn derivative(&self, j: usize) -> Self {
        assert!(j < self.nvars, "variable {j} out of range");
        Self::from_terms(
            self.nvars,
            self.terms.iter().filter(|(_, e)| e[j] > 0).map(|(c, e)| {
                let mut e2 = e.clone();
                e2[j] -= 1;
                (c.clone() * C::from_u32(e[j]), e2)
            }),
        )
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.nvars).map(|j| self.derivative(j)).collect()
    }

    /// Partial derivatives in the first `n` variables only.
    pub fn gradient_in(&self, n: usize) -> Vec<Self> {
        (0..n).map(|j| self.derivative(j)).collect()
    }

    /// Evaluates by summing terms in canonical order.
    pub fn evaluate<S>(&self, x: &[S]) -> Result<S, PolyError>
    where
        S: Scalar,
        C: Lift<S>,
    {
        if x.len() != self.nvars {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, got: x.len() });
        }
        let mut acc = S::zero();
        for (c, e) in &self.terms {
            let mut t: S = c.lift();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t = t * num_traits::pow(xi.clone(), k as usize);
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Top-degree homogeneous component.
    pub fn leading_form(&self) -> Self {
        match self.degree() {
            Degree::NegInfinity => self.clone(),
            Degree::Finite(d) => Polynomial {
                nvars: self.nvars,
                terms: self
                    .terms
                    .iter()
                    .filter(|(_, e)| term_degree(e) == d)
                    .cloned()
                    .collect(),
            },
        }
    }

    /// Inserts a new variable at position `newvar_index` and multiplies every
    /// term by that variable to the power `deg(p) - termdeg`.
    pub fn homogenize(&self, newvar_index: usize) -> Self {
        assert!(newvar_index <= self.nvars, "homogenizing index out of range");
        let d = self.degree().finite().unwrap_or(0);
        Self::from_terms(
            self.nvars + 1,
            self.terms.iter().map(|(c, e)| {
                let mut e2 = e.clone();
                e2.insert(newvar_index, d - term_degree(e));
                (c.clone(), e2)
            }),
        )
    }

    /// Bi-homogenization at each block's own maximal degree.
    ///
    /// The result lives in `(y_0, xblock..., v_0, ublock...)` where `y_0` and
    /// `v_0` are the new homogenizing variables. Variables outside both blocks
    /// are appended after the u-block in their original order and are treated
    /// as parameters (they do not count towards either block degree).
    pub fn bihomogenize(&self, xblock: &[usize], ublock: &[usize]) -> Result<Self, PolyError> {
        let dx = self.block_degree(xblock).finite().unwrap_or(0);
        let du = self.block_degree(ublock).finite().unwrap_or(0);
        self.bihomogenize_to(xblock, ublock, dx, du)
    }

    /// Bi-homogenization at prescribed block degrees (each at least the
    /// polynomial's own block degree).
    pub fn bihomogenize_to(
        &self,
        xblock: &[usize],
        ublock: &[usize],
        dx: u32,
        du: u32,
    ) -> Result<Self, PolyError> {
        let mut owner = vec![0u8; self.nvars];
        for (tag, block) in [(1u8, xblock), (2u8, ublock)] {
            for &i in block {
                if i >= self.nvars {
                    return Err(PolyError::IndexOutOfRange { index: i, nvars: self.nvars });
                }
                if owner[i] != 0 {
                    return Err(PolyError::OverlappingBlocks(i));
                }
                owner[i] = tag;
            }
        }
        let rest: Vec<usize> = (0..self.nvars).filter(|&i| owner[i] == 0).collect();
        let out_n = xblock.len() + ublock.len() + 2 + rest.len();
        let terms = self.terms.iter().map(|(c, e)| {
            let tx: u32 = xblock.iter().map(|&i| e[i]).sum();
            let tu: u32 = ublock.iter().map(|&i| e[i]).sum();
            assert!(tx <= dx && tu <= du, "prescribed block degree below polynomial degree");
            let mut e2 = Vec::with_capacity(out_n);
            e2.push(dx - tx);
            e2.extend(xblock.iter().map(|&i| e[i]));
            e2.push(du - tu);
            e2.extend(ublock.iter().map(|&i| e[i]));
            e2.extend(rest.iter().map(|&i| e[i]));
            (c.clone(), e2)
        });
        Ok(Self::from_terms(out_n, terms))
    }

    /// Re-indexes variables into a space of `new_nvars` variables, sending
    /// old variable `i` to `map[i]`.
    pub fn embed(&self, new_nvars: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.nvars, "embedding map must cover every variable");
        Self::from_terms(
            new_nvars,
            self.terms.iter().map(|(c, e)| {
                let mut e2 = vec![0; new_nvars];
                for (i, &k) in e.iter().enumerate() {
                    e2[map[i]] += k;
                }
                (c.clone(), e2)
            }),
        )
    }

    /// Substitutes constants for some variables, keeping the variable count
    /// (the substituted variables simply no longer occur).
    pub fn substitute(&self, assignments: &[(usize, C)]) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms.iter().map(|(c, e)| {
                let mut c2 = c.clone();
                let mut e2 = e.clone();
                for (i, v) in assignments {
                    if e2[*i] > 0 {
                        c2 = c2 * num_traits::pow(v.clone(), e2[*i] as usize);
                        e2[*i] = 0;
                    }
                }
                (c2, e2)
            }),
        )
    }

    /// Largest absolute coefficient, as a float.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .iter()
            .map(|(c, _)| c.to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> FloatPoly {
        Polynomial::from_terms(self.nvars, self.terms.iter().map(|(c, e)| (c.to_f64(), e.clone())))
    }

    /// Dense coefficient vector (index = power) of a univariate polynomial.
    pub fn univariate_coeffs(&self) -> Option<Vec<C>> {
        if self.nvars != 1 {
            return None;
        }
        let d = self.degree().finite().unwrap_or(0) as usize;
        let mut out = vec![C::zero(); d + 1];
        for (c, e) in &self.terms {
            out[e[0] as usize] = c.clone();
        }
        Some(out)
    }

    pub fn to_string_with(&self, names: &[impl AsRef<str>]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (c, e)) in self.terms.iter().enumerate() {
            let neg = c.is_negative_coeff();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs_coeff();
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| {
                    let name = names
                        .get(i)
                        .map(|n| n.as_ref().to_string())
                        .unwrap_or_else(|| format!("v{i}"));
                    if p == 1 {
                        name
                    } else {
                        format!("{name}^{p}")
                    }
                })
                .collect();
            if mono.is_empty() {
                s.push_str(&a.fmt_coeff());
            } else {
                if !a.is_one() {
                    s.push_str(&a.fmt_coeff());
                    s.push('*');
                }
                s.push_str(&mono.join("*"));
            }
        }
        s
    }
}

impl RatPoly {
    pub fn from_i64_terms(nvars: usize, terms: &[(i64, &[u32])]) -> Self {
        Self::from_terms(nvars, terms.iter().map(|(c, e)| (rat_int(*c), e.to_vec())))
    }
}

impl<'a, C: Coeff> Add<&'a Polynomial<C>> for &'a Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: &'a Polynomial<C>) -> Polynomial<C> {
        assert_eq!(self.nvars, rhs.nvars, "adding polynomials in different variable counts");
        Polynomial::from_terms(self.nvars, self.terms.iter().chain(&rhs.terms).cloned())
    }
}

impl<'a, C: Coeff> Sub<&'a Polynomial<C>> for &'a Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: &'a Polynomial<C>) -> Polynomial<C> {
        assert_eq!(self.nvars, rhs.nvars, "subtracting polynomials in different variable counts");
        Polynomial::from_terms(
            self.nvars,
            self.terms
                .iter()
                .cloned()
                .chain(rhs.terms.iter().map(|(c, e)| (-c.clone(), e.clone()))),
        )
    }
}

impl<'a, C: Coeff> Mul<&'a Polynomial<C>> for &'a Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: &'a Polynomial<C>) -> Polynomial<C> {
        assert_eq!(self.nvars, rhs.nvars, "multiplying polynomials in different variable counts");
        let mut out = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (a, ea) in &self.terms {
            for (b, eb) in &rhs.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.push((a.clone() * b.clone(), e));
            }
        }
        Polynomial::from_terms(self.nvars, out)
    }
}

impl<C: Coeff> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(c, e)| (-c.clone(), e.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<C: Coeff> $tr<Polynomial<C>> for Polynomial<C> {
            type Output = Polynomial<C>;
            fn $m(self, rhs: Polynomial<C>) -> Polynomial<C> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<C: Coeff> Neg for Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        -&self
    }
}

/// A list of equations over named unknowns followed by named parameters.
///
/// Every equation has `varnames.len() + paramnames.len()` variables; the
/// parameters occupy the trailing indices.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySystem {
    pub equations: Vec<RatPoly>,
    pub varnames: Vec<String>,
    pub paramnames: Vec<String>,
}

impl PolySystem {
    pub fn new(
        equations: Vec<RatPoly>,
        varnames: Vec<String>,
        paramnames: Vec<String>,
    ) -> Result<Self, PolyError> {
        let total = varnames.len() + paramnames.len();
        if let Some(bad) = equations.iter().find(|p| p.nvars() != total) {
            return Err(PolyError::DimensionMismatch { expected: total, got: bad.nvars() });
        }
        Ok(PolySystem { equations, varnames, paramnames })
    }

    pub fn nunknowns(&self) -> usize {
        self.varnames.len()
    }

    pub fn nparams(&self) -> usize {
        self.paramnames.len()
    }

    pub fn names(&self) -> Vec<String> {
        self.varnames.iter().chain(&self.paramnames).cloned().collect()
    }

    /// Equations printed in the parser's grammar.
    pub fn to_strings(&self) -> Vec<String> {
        let names = self.names();
        self.equations.iter().map(|p| p.to_string_with(&names)).collect()
    }

    /// Equations with the parameters replaced by exact values.
    pub fn specialize(&self, params: &[Rational]) -> Vec<RatPoly> {
        assert_eq!(params.len(), self.nparams(), "parameter count mismatch");
        let n = self.nunknowns();
        let assign: Vec<(usize, Rational)> =
            params.iter().enumerate().map(|(k, v)| (n + k, v.clone())).collect();
        self.equations.iter().map(|p| p.substitute(&assign)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> RatPoly {
        RatPoly::var(n, i)
    }

    fn c(n: usize, v: i64) -> RatPoly {
        RatPoly::constant(n, rat_int(v))
    }

    #[test]
    fn canonical_form_merges_and_drops_zeros() {
        let p = RatPoly::from_i64_terms(2, &[(2, &[1, 0]), (-2, &[1, 0]), (3, &[0, 2]), (1, &[3, 0])]);
        assert_eq!(p.terms().len(), 2);
        assert_eq!(p.terms()[0].1, vec![3, 0]);
        assert_eq!(p.degree(), Degree::Finite(3));
        assert_eq!(RatPoly::zero(2).degree(), Degree::NegInfinity);
        assert!(Degree::NegInfinity < Degree::Finite(0));
    }

    #[test]
    fn evaluate_fixtures() {
        let cusp = &x(2, 0).pow(3) - &x(2, 1).pow(2);
        assert_eq!(cusp.evaluate(&[rat_int(1), rat_int(1)]).unwrap(), rat_int(0));

        let q = &(&x(2, 0).pow(2) + &x(2, 1).pow(2)) + &(&(&x(2, 0) * &x(2, 1)) - &c(2, 1)).pow(2);
        assert_eq!(q.evaluate(&[0.0, 0.0]).unwrap(), 1.0);

        // x1*x2 - c*x0^2 with c as a fourth variable.
        let p = &(&x(4, 1) * &x(4, 2)) - &(&x(4, 3) * &x(4, 0).pow(2));
        assert_eq!(p.evaluate(&[1.0, 2.0, 3.0, 6.0]).unwrap(), 0.0);

        assert_eq!(
            cusp.evaluate(&[1.0]),
            Err(PolyError::DimensionMismatch { expected: 2, got: 1 })
        );
    }

    #[test]
    fn complex_evaluation() {
        let p = &x(1, 0).pow(2) + &c(1, 1);
        let v = p.evaluate(&[Complex64::new(0.0, 1.0)]).unwrap();
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn gradient_fixtures() {
        let g = (&x(2, 0) * &x(2, 1)).gradient();
        assert_eq!(g, vec![x(2, 1), x(2, 0)]);

        let cusp = &x(2, 0).pow(3) - &x(2, 1).pow(2);
        let g = cusp.gradient();
        assert_eq!(g[0], x(2, 0).pow(2).scale(&rat_int(3)));
        assert_eq!(g[1], x(2, 1).scale(&rat_int(-2)));

        assert!(c(3, 7).gradient().iter().all(|p| p.is_zero()));
    }

    #[test]
    fn homogenize_fixtures() {
        let cusp = &x(2, 0).pow(3) - &x(2, 1).pow(2);
        let h = cusp.homogenize(0);
        let expect = &x(3, 1).pow(3) - &(&x(3, 2).pow(2) * &x(3, 0));
        assert_eq!(h, expect);

        let hyp = &(&x(2, 0) * &x(2, 1)) - &c(2, 1);
        let expect = &(&x(3, 1) * &x(3, 2)) - &x(3, 0).pow(2);
        assert_eq!(hyp.homogenize(0), expect);

        let hom = &x(2, 0).pow(2) + &(&x(2, 0) * &x(2, 1));
        let h = hom.homogenize(0);
        assert!(h.degree_in(0) == Degree::Finite(0));
        assert_eq!(h, hom.embed(3, &[1, 2]));
    }

    #[test]
    fn bihomogenize_fixtures() {
        // variables (x1, x2, u)
        let row1 = &c(3, 1) - &(&x(3, 2) * &x(3, 0).pow(2)).scale(&rat_int(3));
        let h = row1.bihomogenize(&[0, 1], &[2]).unwrap();
        // (x0, x1, x2, u0, u1)
        let expect = &(&x(5, 3) * &x(5, 0).pow(2)) - &(&x(5, 4) * &x(5, 1).pow(2)).scale(&rat_int(3));
        assert_eq!(h, expect);

        let row2 = (&x(3, 2) * &x(3, 1)).scale(&rat_int(2));
        let h = row2.bihomogenize(&[0, 1], &[2]).unwrap();
        assert_eq!(h, (&x(5, 4) * &x(5, 2)).scale(&rat_int(2)));

        // x-block degree 0 everywhere: only the u0 power appears.
        let p = &x(3, 2).pow(2) + &c(3, 5);
        let h = p.bihomogenize(&[0, 1], &[2]).unwrap();
        let expect = &x(5, 4).pow(2) + &x(5, 3).pow(2).scale(&rat_int(5));
        assert_eq!(h, expect);

        assert_eq!(
            row1.bihomogenize(&[0, 1], &[1, 2]),
            Err(PolyError::OverlappingBlocks(1))
        );
    }

    #[test]
    fn display_is_canonical() {
        let p = &(&x(2, 0).pow(3) - &x(2, 1).pow(2)) + &c(2, -1);
        assert_eq!(p.to_string_with(&["x1", "x2"]), "x1^3 - x2^2 - 1");
        let q = RatPoly::from_terms(1, [(rat(3, 4), vec![2]), (rat(-1, 2), vec![0])]);
        assert_eq!(q.to_string_with(&["t"]), "3/4*t^2 - 1/2");
        assert_eq!(RatPoly::zero(1).to_string_with(&["t"]), "0");
    }

    #[test]
    fn leading_form_and_substitute() {
        let p = &(&x(2, 0).pow(2) + &x(2, 1).pow(2)) - &c(2, 1);
        assert_eq!(p.leading_form(), &x(2, 0).pow(2) + &x(2, 1).pow(2));
        let s = p.substitute(&[(0, rat_int(2))]);
        assert_eq!(s, &x(2, 1).pow(2) + &c(2, 3));
    }
}
