//! Scalars that carry exact first and second derivatives through polynomial
//! evaluation, quotients and smooth univariate maps.

use nalgebra::{DMatrix, DVector};

use crate::symbolic::poly::Ring;

pub trait Scalar: Ring {
    fn value(&self) -> f64;
    fn sub(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    /// `g(self)` given `g`, `g'`, `g''` at `self.value()`.
    fn apply(&self, g: f64, dg: f64, d2g: f64) -> Self;
}

impl Scalar for f64 {
    fn value(&self) -> f64 {
        *self
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn apply(&self, g: f64, _: f64, _: f64) -> Self {
        g
    }
}

/// Value, gradient and Hessian with respect to `n` seeded variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
}

impl Jet2 {
    pub fn constant(v: f64, n: usize) -> Self {
        Jet2 {
            v,
            g: vec![0.0; n],
            h: vec![0.0; n * n],
        }
    }

    pub fn variable(v: f64, k: usize, n: usize) -> Self {
        let mut j = Jet2::constant(v, n);
        j.g[k] = 1.0;
        j
    }

    pub fn n(&self) -> usize {
        self.g.len()
    }

    pub fn gradient(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.g)
    }

    pub fn hessian(&self) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_row_slice(n, n, &self.h)
    }

    fn chain(&self, g: f64, dg: f64, d2g: f64) -> Jet2 {
        let n = self.n();
        let mut out = Jet2 {
            v: g,
            g: self.g.iter().map(|x| dg * x).collect(),
            h: vec![0.0; n * n],
        };
        for i in 0..n {
            for j in 0..n {
                out.h[i * n + j] = dg * self.h[i * n + j] + d2g * self.g[i] * self.g[j];
            }
        }
        out
    }
}

impl Ring for Jet2 {
    /// A constant with no derivative slots; `add` and `mul` treat it as a
    /// plain scalar against seeded operands.
    fn from_f64(v: f64) -> Self {
        Jet2 { v, g: vec![], h: vec![] }
    }
    fn add(&self, other: &Self) -> Self {
        match (self.g.is_empty(), other.g.is_empty()) {
            (true, true) => Jet2 { v: self.v + other.v, g: vec![], h: vec![] },
            (true, false) => Jet2 { v: self.v + other.v, ..other.clone() },
            (false, true) => Jet2 { v: self.v + other.v, ..self.clone() },
            (false, false) => Jet2 {
                v: self.v + other.v,
                g: self.g.iter().zip(&other.g).map(|(a, b)| a + b).collect(),
                h: self.h.iter().zip(&other.h).map(|(a, b)| a + b).collect(),
            },
        }
    }
    fn mul(&self, other: &Self) -> Self {
        match (self.g.is_empty(), other.g.is_empty()) {
            (true, true) => Jet2 { v: self.v * other.v, g: vec![], h: vec![] },
            (true, false) => scale(other, self.v),
            (false, true) => scale(self, other.v),
            (false, false) => {
                let n = self.n();
                let mut h = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        h[i * n + j] = self.v * other.h[i * n + j]
                            + other.v * self.h[i * n + j]
                            + self.g[i] * other.g[j]
                            + other.g[i] * self.g[j];
                    }
                }
                Jet2 {
                    v: self.v * other.v,
                    g: self.g.iter().zip(&other.g).map(|(a, b)| self.v * b + other.v * a).collect(),
                    h,
                }
            }
        }
    }
}

fn scale(j: &Jet2, s: f64) -> Jet2 {
    Jet2 {
        v: j.v * s,
        g: j.g.iter().map(|x| x * s).collect(),
        h: j.h.iter().map(|x| x * s).collect(),
    }
}

impl Scalar for Jet2 {
    fn value(&self) -> f64 {
        self.v
    }
    fn sub(&self, other: &Self) -> Self {
        Ring::add(self, &scale(other, -1.0))
    }
    fn div(&self, other: &Self) -> Self {
        let u = other.v;
        let recip = if other.g.is_empty() {
            Jet2 { v: 1.0 / u, g: vec![], h: vec![] }
        } else {
            other.chain(1.0 / u, -1.0 / (u * u), 2.0 / (u * u * u))
        };
        Ring::mul(self, &recip)
    }
    fn apply(&self, g: f64, dg: f64, d2g: f64) -> Self {
        if self.g.is_empty() {
            Jet2 { v: g, g: vec![], h: vec![] }
        } else {
            self.chain(g, dg, d2g)
        }
    }
}
