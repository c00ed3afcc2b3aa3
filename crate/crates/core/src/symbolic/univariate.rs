//! Dense univariate polynomials over the rationals.

use std::fmt;

use num_traits::{One, Signed, Zero};

use super::phase::{rat_to_f64, Rational};

/// Coefficients stored lowest degree first; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        UniPoly::new(vec![Rational::one()])
    }

    /// `x - r`
    pub fn linear(root: Rational) -> Self {
        UniPoly::new(vec![-root, Rational::one()])
    }

    /// `x^n`
    pub fn monomial(n: usize) -> Self {
        let mut c = vec![Rational::zero(); n + 1];
        c[n] = Rational::one();
        UniPoly::new(c)
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        UniPoly::new(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UniPoly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UniPoly::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut c = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        UniPoly::new(c)
    }

    pub fn scale(&self, s: &Rational) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn pow(&self, n: u32) -> UniPoly {
        (0..n).fold(UniPoly::one(), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer((k as i64).into()))
                .collect(),
        )
    }

    pub fn monic(&self) -> UniPoly {
        if self.is_zero() {
            return UniPoly::zero();
        }
        let lc = self.leading();
        self.scale(&(Rational::one() / lc))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lc = divisor.leading();
        let mut rem = self.coeffs.clone();
        let mut quo = vec![Rational::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1 - dd;
            let f = rem.last().unwrap() / &lc;
            for (j, c) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &f * c;
            }
            quo[k] = f;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (UniPoly::new(quo), UniPoly::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Multiplicity of zero as a root, and the cofactor with nonzero constant term.
    pub fn split_zero_root(&self) -> (usize, UniPoly) {
        let k = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        (k, UniPoly::new(self.coeffs[k.min(self.coeffs.len())..].to_vec()))
    }

    /// Yun's square-free decomposition: returns `(f_i, i)` with
    /// `self = lc * prod f_i^i`, each `f_i` monic, square-free and pairwise coprime.
    pub fn square_free(&self) -> Vec<(UniPoly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a = f.gcd(&df);
        let mut b = f.div_rem(&a).0;
        let mut c = df.div_rem(&a).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            let g = b.gcd(&d);
            if g.degree().unwrap_or(0) > 0 {
                out.push((g.clone(), i));
            }
            b = b.div_rem(&g).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_rem(&g).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(rat_to_f64).collect()
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + rat_to_f64(c))
    }

    /// Substitutes `x -> x^2`.
    pub fn compose_square(&self) -> UniPoly {
        let mut c = vec![Rational::zero(); 2 * self.coeffs.len()];
        for (k, v) in self.coeffs.iter().enumerate() {
            c[2 * k] = v.clone();
        }
        UniPoly::new(c)
    }

    /// If only even powers occur, returns `P` with `self(x) = P(x^2)`.
    pub fn even_part_as_square(&self) -> Option<UniPoly> {
        if self.coeffs.iter().skip(1).step_by(2).any(|c| !c.is_zero()) {
            return None;
        }
        Some(UniPoly::new(self.coeffs.iter().step_by(2).cloned().collect()))
    }

    /// Sturm sequence `f, f', -rem(f, f'), ...`.
    pub fn sturm_sequence(&self) -> Vec<UniPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            seq.push(r.scale(&-Rational::one()));
        }
        seq.pop();
        seq
    }

    /// Number of distinct real roots in `(0, +inf)`. Requires `self(0) != 0`.
    pub fn count_positive_roots(&self) -> usize {
        assert!(!self.coeff(0).is_zero(), "zero is a root; split it off first");
        let seq = self.sturm_sequence();
        let at_zero: Vec<Rational> = seq.iter().map(|s| s.coeff(0)).collect();
        let at_inf: Vec<Rational> = seq.iter().map(UniPoly::leading).collect();
        sign_variations(&at_zero).saturating_sub(sign_variations(&at_inf))
    }

    /// Number of distinct real roots in `(-inf, 0)`. Requires `self(0) != 0`.
    pub fn count_negative_roots(&self) -> usize {
        let mirrored = UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { -c.clone() } else { c.clone() })
                .collect(),
        );
        mirrored.count_positive_roots()
    }

    /// Number of sign changes in the coefficient sequence (Descartes bound).
    pub fn sign_changes(&self) -> usize {
        let signs: Vec<bool> = self
            .coeffs
            .iter()
            .filter(|c| !c.is_zero())
            .map(Signed::is_positive)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

fn sign_variations(values: &[Rational]) -> usize {
    let signs: Vec<bool> = values
        .iter()
        .filter(|c| !c.is_zero())
        .map(Signed::is_positive)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("({c})*l"),
                _ => format!("({c})*l^{k}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::phase::{int, rat};

    #[test]
    fn division_identity() {
        let a = UniPoly::from_i64(&[1, 0, -3, 2, 5]);
        let b = UniPoly::from_i64(&[2, 1, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn gcd_of_shared_factor() {
        let f = UniPoly::linear(int(1)).mul(&UniPoly::linear(rat(1, 2)));
        let g = UniPoly::linear(int(1)).mul(&UniPoly::linear(int(-3)));
        assert_eq!(f.gcd(&g), UniPoly::linear(int(1)));
    }

    #[test]
    fn square_free_decomposition() {
        // (x - 1)^3 (x + 2)^2 x
        let f = UniPoly::linear(int(1))
            .pow(3)
            .mul(&UniPoly::linear(int(-2)).pow(2))
            .mul(&UniPoly::monomial(1));
        let sf = f.square_free();
        let rebuilt = sf
            .iter()
            .fold(UniPoly::one(), |acc, (g, k)| acc.mul(&g.pow(*k as u32)));
        assert_eq!(rebuilt, f.monic());
        let mults: Vec<usize> = sf.iter().map(|(_, k)| *k).collect();
        assert_eq!(mults, vec![1, 2, 3]);
    }

    #[test]
    fn sturm_counts() {
        // (x - 1)(x - 1/3)(x + 2)(x^2 + 1)
        let f = UniPoly::linear(int(1))
            .mul(&UniPoly::linear(rat(1, 3)))
            .mul(&UniPoly::linear(int(-2)))
            .mul(&UniPoly::from_i64(&[1, 0, 1]));
        assert_eq!(f.count_positive_roots(), 2);
        assert_eq!(f.count_negative_roots(), 1);
        assert_eq!(UniPoly::from_i64(&[1, 0, 1]).count_positive_roots(), 0);
    }

    #[test]
    fn even_structure() {
        let p = UniPoly::from_i64(&[-1, 0, 1]);
        assert_eq!(p.even_part_as_square().unwrap(), UniPoly::from_i64(&[-1, 1]));
        assert!(UniPoly::from_i64(&[0, 1]).even_part_as_square().is_none());
        assert_eq!(UniPoly::from_i64(&[-1, 1]).compose_square(), p);
        let (k, rest) = UniPoly::from_i64(&[0, 0, 2, 1]).split_zero_root();
        assert_eq!((k, rest), (2, UniPoly::from_i64(&[2, 1])));
    }
}
