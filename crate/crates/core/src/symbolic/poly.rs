//! Sparse multivariate polynomials with exact rational coefficients on the
//! phase space `(t, x, tau, xi)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::phase::{num_vars, rat_to_f64, PhasePoint, Rational, Var};
use crate::error::{Error, Result};

/// Exponent vector of a monomial, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial symbol in `2(d + 1)` phase-space variables.
///
/// Terms with zero coefficient are never stored, so structural equality is
/// polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolySymbol {
    dim: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl PolySymbol {
    pub fn zero(dim: usize) -> Self {
        assert!(dim > 0, "spatial dimension must be positive");
        PolySymbol {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        let mut p = Self::zero(dim);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(num_vars(dim)), c);
        }
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    pub fn var(dim: usize, v: Var) -> Self {
        let v = v.check(dim).expect("variable outside the phase space");
        let mut e = vec![0; num_vars(dim)];
        e[v.index(dim)] = 1;
        let mut p = Self::zero(dim);
        p.terms.insert(Monomial(e), Rational::one());
        p
    }

    pub fn t(dim: usize) -> Self {
        Self::var(dim, Var::T)
    }

    pub fn tau(dim: usize) -> Self {
        Self::var(dim, Var::Tau)
    }

    pub fn x(dim: usize, i: usize) -> Self {
        Self::var(dim, Var::X(i))
    }

    pub fn xi(dim: usize, i: usize) -> Self {
        Self::var(dim, Var::Xi(i))
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging
    /// repeated monomials.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        if dim == 0 {
            return Err(Error::InvalidArgument("spatial dimension must be positive".into()));
        }
        let n = num_vars(dim);
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            if e.len() != n {
                return Err(Error::BadExponentLength {
                    expected: n,
                    found: e.len(),
                });
            }
            p.add_term(Monomial(e), c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nvars(&self) -> usize {
        num_vars(self.dim)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order: descending total degree, then descending
    /// lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.terms.iter().rev().map(|(m, c)| (m.exponents(), c))
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn ensure_same_dim(&self, other: &PolySymbol) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &PolySymbol) -> Result<PolySymbol> {
        self.ensure_same_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &PolySymbol) -> Result<PolySymbol> {
        self.ensure_same_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &PolySymbol) -> Result<PolySymbol> {
        self.ensure_same_dim(other)?;
        let mut out = PolySymbol::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> PolySymbol {
        if c.is_zero() {
            return PolySymbol::zero(self.dim);
        }
        PolySymbol {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> PolySymbol {
        let mut acc = PolySymbol::one(self.dim);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to the variable at layout index `k`.
    pub fn derivative_index(&self, k: usize) -> PolySymbol {
        let mut out = PolySymbol::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.0[k];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[k] -= 1;
            out.add_term(dm, c * Rational::from_integer(e.into()));
        }
        out
    }

    pub fn derivative(&self, v: Var) -> PolySymbol {
        self.derivative_index(v.index(self.dim))
    }

    pub fn eval(&self, at: &PhasePoint) -> Result<Rational> {
        if at.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: at.dim(),
            });
        }
        Ok(self.eval_coords(&at.coords()))
    }

    /// Exact evaluation at coordinates in layout order.
    pub fn eval_coords(&self, coords: &[Rational]) -> Rational {
        debug_assert_eq!(coords.len(), self.nvars());
        let mut sum = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (k, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term *= num_traits::pow(coords[k].clone(), e as usize);
                }
            }
            sum += term;
        }
        sum
    }

    /// Variables (layout indices) that occur with positive exponent.
    pub fn support(&self) -> Vec<usize> {
        let mut used = vec![false; self.nvars()];
        for m in self.terms.keys() {
            for (k, &e) in m.0.iter().enumerate() {
                used[k] |= e > 0;
            }
        }
        used.iter()
            .enumerate()
            .filter_map(|(k, &u)| u.then_some(k))
            .collect()
    }

    pub fn depends_on(&self, v: Var) -> bool {
        let k = v.index(self.dim);
        self.terms.keys().any(|m| m.0[k] > 0)
    }

    /// Total degree of a monomial in the momentum variables `xi` (tau excluded).
    pub fn xi_degree_of(&self, exps: &[u32]) -> u32 {
        exps[self.dim + 2..].iter().sum()
    }

    /// Substitutes polynomials for a subset of variables.
    pub fn substitute(&self, subs: &BTreeMap<Var, PolySymbol>) -> Result<PolySymbol> {
        for p in subs.values() {
            self.ensure_same_dim(p)?;
        }
        let n = self.nvars();
        let mut out = PolySymbol::zero(self.dim);
        for (m, c) in &self.terms {
            let mut kept = vec![0; n];
            let mut factor = PolySymbol::constant(self.dim, c.clone());
            for (k, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match subs.get(&Var::from_index(k, self.dim)) {
                    Some(p) => factor = &factor * &p.pow(e),
                    None => kept[k] = e,
                }
            }
            let mono = PolySymbol {
                dim: self.dim,
                terms: BTreeMap::from([(Monomial(kept), Rational::one())]),
            };
            out = &out + &(&factor * &mono);
        }
        Ok(out)
    }

    /// Re-embeds the polynomial in a larger phase space, keeping `t, x_1..x_d,
    /// tau, xi_1..xi_d` in place.
    pub fn embed(&self, dim: usize) -> Result<PolySymbol> {
        if dim < self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: dim,
            });
        }
        let mut out = PolySymbol::zero(dim);
        for (m, c) in &self.terms {
            let mut e = vec![0; num_vars(dim)];
            for (k, &x) in m.0.iter().enumerate() {
                e[Var::from_index(k, self.dim).index(dim)] = x;
            }
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    pub fn max_abs_coeff(&self) -> Rational {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly::new(self)
    }
}

impl Add for &PolySymbol {
    type Output = PolySymbol;
    fn add(self, rhs: &PolySymbol) -> PolySymbol {
        self.checked_add(rhs).expect("polynomial dimension mismatch")
    }
}

impl Sub for &PolySymbol {
    type Output = PolySymbol;
    fn sub(self, rhs: &PolySymbol) -> PolySymbol {
        self.checked_sub(rhs).expect("polynomial dimension mismatch")
    }
}

impl Mul for &PolySymbol {
    type Output = PolySymbol;
    fn mul(self, rhs: &PolySymbol) -> PolySymbol {
        self.checked_mul(rhs).expect("polynomial dimension mismatch")
    }
}

impl Neg for &PolySymbol {
    type Output = PolySymbol;
    fn neg(self) -> PolySymbol {
        self.scale(&-Rational::one())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for PolySymbol {
            type Output = PolySymbol;
            fn $m(self, rhs: PolySymbol) -> PolySymbol {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&PolySymbol> for PolySymbol {
            type Output = PolySymbol;
            fn $m(self, rhs: &PolySymbol) -> PolySymbol {
                (&self).$m(rhs)
            }
        }
        impl $tr<PolySymbol> for &PolySymbol {
            type Output = PolySymbol;
            fn $m(self, rhs: PolySymbol) -> PolySymbol {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for PolySymbol {
    type Output = PolySymbol;
    fn neg(self) -> PolySymbol {
        -&self
    }
}

impl fmt::Display for PolySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(k, &x)| {
                    let v = Var::from_index(k, self.dim);
                    if x == 1 {
                        v.to_string()
                    } else {
                        format!("{v}^{x}")
                    }
                })
                .collect();
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{mag}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Minimal ring interface for evaluating compiled polynomials over `f64` and
/// over forward-mode derivative carriers.
pub trait Ring: Clone {
    fn from_f64(v: f64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
}

impl Ring for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

/// Floating-point evaluation form of a [`PolySymbol`].
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    nvars: usize,
    terms: Vec<(f64, Vec<(usize, u32)>)>,
}

impl CompiledPoly {
    fn new(p: &PolySymbol) -> Self {
        let terms = p
            .terms()
            .map(|(e, c)| {
                let factors = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x > 0)
                    .map(|(k, &x)| (k, x))
                    .collect();
                (rat_to_f64(c), factors)
            })
            .collect();
        CompiledPoly {
            nvars: p.nvars(),
            terms,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn eval(&self, coords: &[f64]) -> f64 {
        debug_assert_eq!(coords.len(), self.nvars);
        let mut sum = 0.0;
        for (c, factors) in &self.terms {
            let mut term = *c;
            for &(k, e) in factors {
                term *= coords[k].powi(e as i32);
            }
            sum += term;
        }
        sum
    }

    pub fn eval_ring<R: Ring>(&self, coords: &[R]) -> R {
        let mut sum = R::from_f64(0.0);
        for (c, factors) in &self.terms {
            let mut term = R::from_f64(*c);
            for &(k, e) in factors {
                for _ in 0..e {
                    term = term.mul(&coords[k]);
                }
            }
            sum = sum.add(&term);
        }
        sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::phase::{int, rat};

    #[test]
    fn zero_coefficients_are_dropped() {
        let d = 2;
        let x1 = PolySymbol::x(d, 1);
        let p = &x1 - &x1;
        assert!(p.is_zero());
        let q = PolySymbol::from_terms(d, vec![(vec![0; 6], int(0))]).unwrap();
        assert!(q.is_empty());
    }

    #[test]
    fn expansion_of_fixture_b2() {
        let d = 2;
        let t = PolySymbol::t(d);
        let x1 = PolySymbol::x(d, 1);
        let xi1 = PolySymbol::xi(d, 1);
        let xi2 = PolySymbol::xi(d, 2);
        let half = PolySymbol::constant(d, rat(1, 2));
        let a = (&t - &x1).pow(2) * xi2.pow(2)
            + &half * &xi1.pow(2)
            + &half * &(x1.pow(3) * xi2.pow(2));
        // t^2 xi2^2 - 2 t x1 xi2^2 + x1^2 xi2^2 + 1/2 xi1^2 + 1/2 x1^3 xi2^2
        assert_eq!(a.len(), 5);
        assert_eq!(a.total_degree(), Some(5));
    }

    #[test]
    fn canonical_order_is_graded_descending() {
        let d = 1;
        let p = PolySymbol::t(d) + PolySymbol::x(d, 1).pow(3) + PolySymbol::one(d)
            + PolySymbol::t(d).pow(3);
        let degrees: Vec<u32> = p.terms().map(|(e, _)| e.iter().sum()).collect();
        assert_eq!(degrees, vec![3, 3, 1, 0]);
        // t^3 before x1^3 under descending lex
        assert_eq!(p.terms().next().unwrap().0, &[3, 0, 0, 0]);
    }

    #[test]
    fn derivative_and_eval() {
        let d = 2;
        let p = PolySymbol::x(d, 1).pow(2) * PolySymbol::xi(d, 2);
        let dp = p.derivative(Var::X(1));
        let at = PhasePoint::new(int(0), vec![int(3), int(0)], int(0), vec![int(0), rat(1, 2)])
            .unwrap();
        assert_eq!(dp.eval(&at).unwrap(), int(3));
        assert_eq!(p.eval(&at).unwrap(), rat(9, 2));
        assert_eq!(p.compile().eval(&at.to_f64()), 4.5);
    }

    #[test]
    fn substitution_and_embedding() {
        let d = 2;
        let p = PolySymbol::x(d, 1).pow(2) + PolySymbol::t(d);
        let subs = BTreeMap::from([(Var::X(1), &PolySymbol::t(d) + &PolySymbol::one(d))]);
        let q = p.substitute(&subs).unwrap();
        let expect = PolySymbol::t(d).pow(2) + PolySymbol::t(d).scale(&int(3)) + PolySymbol::one(d);
        assert_eq!(q, expect);

        let e = PolySymbol::xi(1, 1).embed(3).unwrap();
        assert_eq!(e, PolySymbol::xi(3, 1));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let err = PolySymbol::t(1).checked_add(&PolySymbol::t(2)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 1, found: 2 });
        assert!(PolySymbol::from_terms(1, vec![(vec![1, 0], int(1))]).is_err());
    }

    #[test]
    fn display_is_readable() {
        let d = 2;
        let p = PolySymbol::tau(d).pow(2).scale(&int(-1)) + PolySymbol::xi(d, 1).scale(&rat(1, 2));
        assert_eq!(p.to_string(), "-tau^2 + 1/2*xi1");
    }
}
