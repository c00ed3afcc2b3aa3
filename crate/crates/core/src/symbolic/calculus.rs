//! Poisson brackets, Hamilton fields and homogeneity in `xi`.
//!
//! Sign convention: `{f, g} = f_tau g_t - f_t g_tau + sum_j (f_xi_j g_x_j - f_x_j g_xi_j)`,
//! so that `{xi_1, x_1} = +1` and the Hamilton field of `f` is
//! `H_f = (f_tau, f_xi, -f_t, -f_x)`. With this choice `{f, g} = H_f g`.
//! Many texts use the opposite sign; every bracket in this crate uses this one.

use num_traits::Zero;

use super::phase::{PhasePoint, Rational, Var};
use super::poly::PolySymbol;
use crate::error::{Error, Result};

pub fn poisson_bracket(f: &PolySymbol, g: &PolySymbol) -> Result<PolySymbol> {
    f.ensure_same_dim(g)?;
    let d = f.dim();
    let mut out = PolySymbol::zero(d);
    for k in 0..=d {
        let q = Var::from_index(k, d);
        let p = q.conjugate();
        let fp = f.derivative(p);
        let gq = g.derivative(q);
        if !fp.is_zero() && !gq.is_zero() {
            out = &out + &(&fp * &gq);
        }
        let fq = f.derivative(q);
        let gp = g.derivative(p);
        if !fq.is_zero() && !gp.is_zero() {
            out = &out - &(&fq * &gp);
        }
    }
    Ok(out)
}

/// `H_f` at a point, in layout order `(t, x, tau, xi)`.
pub fn hamilton_field(f: &PolySymbol, at: &PhasePoint) -> Result<Vec<Rational>> {
    if at.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: at.dim(),
        });
    }
    let d = f.dim();
    let coords = at.coords();
    let n = 2 * (d + 1);
    let mut field = vec![Rational::zero(); n];
    for (k, slot) in field.iter_mut().enumerate() {
        let v = Var::from_index(k, d);
        let partial = f.derivative(v.conjugate()).eval_coords(&coords);
        *slot = if v.is_momentum() { -partial } else { partial };
    }
    Ok(field)
}

/// Euler-identity defect `sum_j xi_j df/dxi_j - m f`; zero iff every term of
/// `f` has total `xi`-degree `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Homogeneity {
    pub homogeneous: bool,
    pub residual: PolySymbol,
}

pub fn homogeneity_check(f: &PolySymbol, degree: i64) -> Homogeneity {
    let d = f.dim();
    let terms = f.terms().filter_map(|(e, c)| {
        let defect = i64::from(f.xi_degree_of(e)) - degree;
        (defect != 0).then(|| (e.to_vec(), c * Rational::from_integer(defect.into())))
    });
    let residual = PolySymbol::from_terms(d, terms).expect("exponents come from f");
    Homogeneity {
        homogeneous: residual.is_zero(),
        residual,
    }
}
