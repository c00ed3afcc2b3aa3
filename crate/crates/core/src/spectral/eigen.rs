//! Eigenvalues of small Hamilton maps.
//!
//! The characteristic polynomial is computed exactly. For a Hamilton map it is
//! even, `det(l - F) = P(l^2)`, so the spectrum is `+-sqrt(mu)` over the roots
//! `mu` of `P`. Zero roots and multiplicities are split off exactly (square-free
//! decomposition), the number of positive and negative real `mu` is fixed by
//! Sturm sequences, and only the simple roots of each square-free factor are
//! located numerically (companion matrix, then Newton polishing). Every
//! distinct eigenvalue is then checked against `F` by the smallest singular
//! value of `F - l I`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

use super::hamilton::HamiltonMap;
use crate::error::{Error, Result};
use crate::symbolic::univariate::UniPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumClass {
    RealPairPresent,
    PureImaginaryOnly,
    ZeroOnly,
    /// Eigenvalues off both axes (`+-a +- ib`, `a, b != 0`) and no real pair.
    ComplexQuadruple,
}

impl SpectrumClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectrumClass::RealPairPresent => "real-pair-present",
            SpectrumClass::PureImaginaryOnly => "pure-imaginary-only",
            SpectrumClass::ZeroOnly => "zero-only",
            SpectrumClass::ComplexQuadruple => "complex-quadruple-present",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Eigenvalue {
    pub value: Complex64,
    pub multiplicity: usize,
    /// Smallest singular value of `F - value I`.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<Eigenvalue>,
    pub class: SpectrumClass,
    pub tol: f64,
    /// Some eigenvalue has `tol < |Re l| <= 10 tol`, or an exactly real pair
    /// is too small to clear `tol`.
    pub marginal: bool,
    /// Number of distinct positive roots of `P`, counted exactly.
    pub exact_real_pairs: usize,
    pub charpoly: UniPoly,
}

impl Spectrum {
    pub fn default_tol(f: &HamiltonMap) -> f64 {
        1e-9 * (1.0 + f.norm())
    }

    pub fn is_real_nonzero(&self, l: &Complex64) -> bool {
        l.im.abs() <= self.tol && l.re.abs() > self.tol
    }

    /// Largest real nonzero eigenvalue under the tolerance rule.
    pub fn real_witness(&self) -> Option<Complex64> {
        self.eigenvalues
            .iter()
            .map(|e| e.value)
            .filter(|l| self.is_real_nonzero(l) && l.re > 0.0)
            .max_by(|a, b| a.re.total_cmp(&b.re))
    }

    pub fn total_multiplicity(&self) -> usize {
        self.eigenvalues.iter().map(|e| e.multiplicity).sum()
    }

    /// Expanded eigenvalue list, each repeated by multiplicity.
    pub fn values(&self) -> Vec<Complex64> {
        self.eigenvalues
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.value, e.multiplicity))
            .collect()
    }

    pub fn max_abs_real_part(&self) -> f64 {
        self.eigenvalues.iter().map(|e| e.value.re.abs()).fold(0.0, f64::max)
    }
}

const MAX_SIZE: usize = 64;

pub fn spectrum(f: &HamiltonMap, tol: f64) -> Result<Spectrum> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if f.size() > MAX_SIZE {
        return Err(Error::InvalidArgument(format!(
            "Hamilton map of size {} exceeds the supported {MAX_SIZE}",
            f.size()
        )));
    }
    let charpoly = f.exact().charpoly();
    let (zero_mult, rest) = charpoly.split_zero_root();

    let mut values: Vec<(Complex64, usize)> = Vec::new();
    if zero_mult > 0 {
        values.push((Complex64::zero(), zero_mult));
    }
    let mut exact_real_pairs = 0;
    match rest.even_part_as_square() {
        Some(p) => {
            for (factor, mult) in p.square_free() {
                let positive = factor.count_positive_roots();
                let negative = factor.count_negative_roots();
                exact_real_pairs += positive;
                for mu in real_structured_roots(&factor, positive + negative)? {
                    let s = mu.sqrt();
                    values.push((s, mult));
                    values.push((-s, mult));
                }
            }
        }
        None => {
            // Not a Hamilton matrix; roots of the characteristic polynomial directly.
            for (factor, mult) in rest.square_free() {
                let real = factor.count_positive_roots() + factor.count_negative_roots();
                for l in real_structured_roots(&factor, real)? {
                    values.push((l, mult));
                }
            }
        }
    }

    let norm = f.norm();
    let shift_base = f.matrix().map(|v| Complex64::new(v, 0.0));
    let mut eigenvalues = Vec::with_capacity(values.len());
    for (value, multiplicity) in values {
        let residual = smallest_singular_value(&shift_base, value);
        if residual > tol * norm.max(f64::MIN_POSITIVE) + 1e3 * f64::EPSILON * norm {
            return Err(Error::NoConvergence(format!(
                "eigenvalue {value} has residual {residual:.3e} against |F| = {norm:.3e}"
            )));
        }
        eigenvalues.push(Eigenvalue {
            value,
            multiplicity,
            residual,
        });
    }
    eigenvalues.sort_by(|a, b| {
        b.value
            .re
            .total_cmp(&a.value.re)
            .then(b.value.im.total_cmp(&a.value.im))
    });

    let real_nonzero = |l: &Complex64| l.im.abs() <= tol && l.re.abs() > tol;
    let class = if eigenvalues.iter().any(|e| real_nonzero(&e.value)) {
        SpectrumClass::RealPairPresent
    } else if eigenvalues.iter().any(|e| e.value.re.abs() > tol) {
        SpectrumClass::ComplexQuadruple
    } else if eigenvalues.iter().any(|e| e.value.norm() > tol) {
        SpectrumClass::PureImaginaryOnly
    } else {
        SpectrumClass::ZeroOnly
    };
    let marginal = eigenvalues.iter().any(|e| {
        let re = e.value.re.abs();
        re != 0.0 && re <= 10.0 * tol
    });

    debug_assert_eq!(
        eigenvalues.iter().map(|e| e.multiplicity).sum::<usize>(),
        f.size()
    );
    Ok(Spectrum {
        eigenvalues,
        class,
        tol,
        marginal,
        exact_real_pairs,
        charpoly,
    })
}

/// Roots of a square-free real polynomial with nonzero constant term, of which
/// exactly `real_count` are real. Real roots are returned with zero imaginary
/// part and complex roots in exact conjugate pairs.
fn real_structured_roots(factor: &UniPoly, real_count: usize) -> Result<Vec<Complex64>> {
    let deg = factor.degree().unwrap_or(0);
    if deg == 0 {
        return Ok(vec![]);
    }
    let coeffs = factor.monic().to_f64();
    let mut roots = if deg == 1 {
        vec![Complex64::new(-coeffs[0], 0.0)]
    } else {
        companion_roots(&coeffs)?
    };
    for r in roots.iter_mut() {
        *r = polish(&coeffs, *r);
    }
    roots.sort_by(|a, b| a.im.abs().total_cmp(&b.im.abs()));
    let (real, complex) = roots.split_at(real_count.min(roots.len()));
    let mut out: Vec<Complex64> = real.iter().map(|r| Complex64::new(r.re, 0.0)).collect();
    let upper: Vec<Complex64> = complex.iter().filter(|r| r.im > 0.0).copied().collect();
    if real.len() != real_count || 2 * upper.len() != complex.len() {
        return Err(Error::NoConvergence(format!(
            "root structure of {factor} does not match its exact real-root count {real_count}"
        )));
    }
    for r in upper {
        out.push(r);
        out.push(r.conj());
    }
    Ok(out)
}

/// Eigenvalues of the companion matrix of a monic polynomial (coefficients
/// lowest degree first).
fn companion_roots(monic: &[f64]) -> Result<Vec<Complex64>> {
    let n = monic.len() - 1;
    let mut c = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        c[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        c[(i, n - 1)] = -monic[i];
    }
    let schur = nalgebra::linalg::Schur::try_new(c, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::NoConvergence("Schur iteration budget exhausted".into()))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

fn polish(monic: &[f64], mut z: Complex64) -> Complex64 {
    let eval = |z: Complex64| {
        let mut p = Complex64::zero();
        let mut dp = Complex64::zero();
        for &c in monic.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };
    let (mut p, _) = eval(z);
    for _ in 0..50 {
        let (_, dp) = eval(z);
        if dp.norm() == 0.0 {
            break;
        }
        let next = z - p / dp;
        let (pn, _) = eval(next);
        if pn.norm() >= p.norm() {
            break;
        }
        z = next;
        p = pn;
    }
    z
}

fn smallest_singular_value(f: &DMatrix<Complex64>, shift: Complex64) -> f64 {
    let n = f.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut m = f.clone();
    for i in 0..n {
        m[(i, i)] -= shift;
    }
    m.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RatMatrix;
    use crate::spectral::hamilton::hamilton_map;
    use crate::symbolic::jet::QuadraticJet;
    use crate::symbolic::phase::rat;
    use crate::symbolic::poly::PolySymbol;

    fn spec_of(q: PolySymbol) -> Spectrum {
        let f = hamilton_map(&QuadraticJet::from_quadratic(&q).unwrap());
        spectrum(&f, Spectrum::default_tol(&f)).unwrap()
    }

    #[test]
    fn hyperbolic_model_has_unit_real_pair() {
        let d = 1;
        let s = spec_of(PolySymbol::t(d).pow(2) - PolySymbol::tau(d).pow(2));
        assert_eq!(s.class, SpectrumClass::RealPairPresent);
        assert_eq!(s.real_witness().unwrap(), Complex64::new(1.0, 0.0));
        // x1, xi1 absent: double zero
        assert_eq!(s.total_multiplicity(), 4);
    }

    #[test]
    fn oscillator_is_pure_imaginary() {
        let d = 1;
        let s = spec_of(PolySymbol::x(d, 1).pow(2) + PolySymbol::xi(d, 1).pow(2));
        assert_eq!(s.class, SpectrumClass::PureImaginaryOnly);
        // F = [[0, 1], [-1, 0]] on (x1, xi1): l^2 + 1 = 0
        let imag: Vec<f64> = s.values().iter().filter(|l| l.im != 0.0).map(|l| l.im).collect();
        assert_eq!(imag.len(), 2);
        for v in imag {
            assert!((v.abs() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_matrix() {
        let f = HamiltonMap::from_exact(RatMatrix::zeros(4, 4));
        let s = spectrum(&f, 1e-9).unwrap();
        assert_eq!(s.class, SpectrumClass::ZeroOnly);
        assert_eq!(s.eigenvalues.len(), 1);
        assert_eq!(s.eigenvalues[0].multiplicity, 4);
    }

    #[test]
    fn chain_model_closed_form() {
        // -tau^2 + (t - x1)^2 + r xi1^2: eigenvalues 0, 0, +-sqrt(1 - r)
        let d = 1;
        for (r, expect) in [(rat(1, 2), 0.5f64.sqrt()), (rat(1, 4), 0.75f64.sqrt())] {
            let q = (PolySymbol::t(d) - PolySymbol::x(d, 1)).pow(2)
                + PolySymbol::xi(d, 1).pow(2).scale(&r)
                - PolySymbol::tau(d).pow(2);
            let s = spec_of(q);
            let w = s.real_witness().unwrap();
            assert!((w.re - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn complex_quadruple_is_not_real_pair() {
        // Q = x1 xi2 - x2 xi1 + (x1^2 + x2^2): rotation plus shear gives
        // eigenvalues off both axes for suitable weights.
        let d = 2;
        let q = PolySymbol::x(d, 1) * PolySymbol::xi(d, 2)
            - PolySymbol::x(d, 2) * PolySymbol::xi(d, 1)
            + PolySymbol::x(d, 1).pow(2).scale(&rat(-1, 1))
            + PolySymbol::xi(d, 1).pow(2).scale(&rat(1, 4));
        let s = spec_of(q);
        assert_eq!(s.total_multiplicity(), 6);
        // closure under l -> -l and conjugation
        let vals = s.values();
        for l in &vals {
            assert!(vals.iter().any(|m| (m + l).norm() < 1e-9));
            assert!(vals.iter().any(|m| (m - l.conj()).norm() < 1e-9));
        }
    }

    #[test]
    fn rejects_bad_tolerance() {
        let f = HamiltonMap::from_exact(RatMatrix::zeros(2, 2));
        assert!(spectrum(&f, 0.0).is_err());
        assert!(spectrum(&f, f64::NAN).is_err());
    }
}
