//! Phase-space layout and points.
//!
//! Coordinates are always ordered `(t, x_1..x_d, tau, xi_1..xi_d)`, so a space
//! with spatial dimension `d` has `2(d + 1)` variables. The "position" half is
//! `(t, x)` and the "momentum" half is `(tau, xi)`; index `k` in the position
//! half is conjugate to index `k + d + 1`.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// A phase-space variable. Spatial indices are 1-based, matching `x1`, `xi1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    T,
    X(usize),
    Tau,
    Xi(usize),
}

impl Var {
    pub fn index(self, dim: usize) -> usize {
        match self {
            Var::T => 0,
            Var::X(i) => i,
            Var::Tau => dim + 1,
            Var::Xi(i) => dim + 1 + i,
        }
    }

    pub fn from_index(index: usize, dim: usize) -> Var {
        let half = dim + 1;
        match index {
            0 => Var::T,
            i if i < half => Var::X(i),
            i if i == half => Var::Tau,
            i => Var::Xi(i - half),
        }
    }

    /// The canonically conjugate variable (`t <-> tau`, `x_i <-> xi_i`).
    pub fn conjugate(self) -> Var {
        match self {
            Var::T => Var::Tau,
            Var::Tau => Var::T,
            Var::X(i) => Var::Xi(i),
            Var::Xi(i) => Var::X(i),
        }
    }

    pub fn is_momentum(self) -> bool {
        matches!(self, Var::Tau | Var::Xi(_))
    }

    pub fn check(self, dim: usize) -> Result<Var> {
        match self {
            Var::X(i) | Var::Xi(i) if i == 0 || i > dim => {
                Err(Error::UnknownVariable(format!("{self} (d = {dim})")))
            }
            v => Ok(v),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::T => write!(f, "t"),
            Var::X(i) => write!(f, "x{i}"),
            Var::Tau => write!(f, "tau"),
            Var::Xi(i) => write!(f, "xi{i}"),
        }
    }
}

impl FromStr for Var {
    type Err = Error;

    fn from_str(s: &str) -> Result<Var> {
        let indexed = |rest: &str| -> Result<usize> {
            match rest.parse::<usize>() {
                Ok(i) if i > 0 && !rest.starts_with('0') => Ok(i),
                _ => Err(Error::UnknownVariable(s.to_string())),
            }
        };
        match s {
            "t" => Ok(Var::T),
            "tau" => Ok(Var::Tau),
            _ if s.starts_with("xi") => indexed(&s[2..]).map(Var::Xi),
            _ if s.starts_with('x') => indexed(&s[1..]).map(Var::X),
            _ => Err(Error::UnknownVariable(s.to_string())),
        }
    }
}

pub fn num_vars(dim: usize) -> usize {
    2 * (dim + 1)
}

/// A point `(t, x, tau, xi)` with exact coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhasePoint {
    pub t: Rational,
    pub x: Vec<Rational>,
    pub tau: Rational,
    pub xi: Vec<Rational>,
}

impl PhasePoint {
    pub fn new(t: Rational, x: Vec<Rational>, tau: Rational, xi: Vec<Rational>) -> Result<Self> {
        if x.len() != xi.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: xi.len(),
            });
        }
        if x.is_empty() {
            return Err(Error::InvalidArgument("spatial dimension must be positive".into()));
        }
        Ok(PhasePoint { t, x, tau, xi })
    }

    pub fn origin(dim: usize) -> Self {
        PhasePoint {
            t: Rational::zero(),
            x: vec![Rational::zero(); dim],
            tau: Rational::zero(),
            xi: vec![Rational::zero(); dim],
        }
    }

    /// The normalized double characteristic `(0, 0, 0, e_d)`.
    pub fn base(dim: usize) -> Self {
        let mut p = Self::origin(dim);
        p.xi[dim - 1] = Rational::one();
        p
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn coords(&self) -> Vec<Rational> {
        let mut out = Vec::with_capacity(num_vars(self.dim()));
        out.push(self.t.clone());
        out.extend(self.x.iter().cloned());
        out.push(self.tau.clone());
        out.extend(self.xi.iter().cloned());
        out
    }

    pub fn from_coords(coords: &[Rational]) -> Result<Self> {
        if coords.len() < 4 || !coords.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "{} coordinates do not form a phase point",
                coords.len()
            )));
        }
        let half = coords.len() / 2;
        Ok(PhasePoint {
            t: coords[0].clone(),
            x: coords[1..half].to_vec(),
            tau: coords[half].clone(),
            xi: coords[half + 1..].to_vec(),
        })
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords().iter().map(rat_to_f64).collect()
    }

    /// The projection `(t, x, xi)` with `tau` dropped, written as in the
    /// `rho'` notation for the base point of `a`.
    pub fn spatial(&self) -> (Rational, Vec<Rational>, Vec<Rational>) {
        (self.t.clone(), self.x.clone(), self.xi.clone())
    }
}

impl fmt::Display for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Rational]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ");
        write!(
            f,
            "(t = {}, x = [{}], tau = {}, xi = [{}])",
            self.t,
            join(&self.x),
            self.tau,
            join(&self.xi)
        )
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator beyond f64 range individually
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Exact rational from a finite f64 (every finite double is a dyadic rational).
pub fn rat_from_f64(v: f64) -> Option<Rational> {
    Rational::from_float(v)
}

/// Parses `"n"` or `"n/d"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidArgument(format!("`{s}` is not an exact rational"));
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: num_bigint::BigInt = n.parse().map_err(|_| bad())?;
    let d: num_bigint::BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}
