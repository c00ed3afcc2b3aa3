use num_complex::Complex64;
use num_traits::{Signed, Zero};

use super::eigen::{spectrum, Spectrum};
use super::hamilton::{hamilton_map, HamiltonMap};
use crate::error::{Error, Result};
use crate::symbolic::jet::{quadratic_jet, Partition, QuadraticJet};
use crate::symbolic::phase::{rat_to_f64, PhasePoint, Rational, Var};
use crate::symbolic::poly::PolySymbol;
use crate::symbolic::univariate::UniPoly;

#[derive(Clone, Debug)]
pub struct Classification {
    pub effective: bool,
    /// Largest positive real eigenvalue when effective.
    pub witness: Option<Complex64>,
    pub spectrum: Spectrum,
    pub jet: QuadraticJet,
    pub hamilton: HamiltonMap,
}

impl Classification {
    pub fn marginal(&self) -> bool {
        self.spectrum.marginal
    }
}

/// Whether the Hamilton map of `p` at the singular point `at` has a real
/// nonzero eigenvalue. `tol = None` selects `1e-9 (1 + |F|)`.
pub fn classify_effective_hyperbolicity(
    p: &PolySymbol,
    at: &PhasePoint,
    tol: Option<f64>,
) -> Result<Classification> {
    let jet = quadratic_jet(p, at)?;
    classify_jet(jet, tol)
}

pub fn classify_jet(jet: QuadraticJet, tol: Option<f64>) -> Result<Classification> {
    let hamilton = hamilton_map(&jet);
    let tol = tol.unwrap_or_else(|| Spectrum::default_tol(&hamilton));
    let spectrum = spectrum(&hamilton, tol)?;
    let witness = spectrum.real_witness();
    Ok(Classification {
        effective: witness.is_some(),
        witness,
        spectrum,
        jet,
        hamilton,
    })
}

#[derive(Clone, Debug)]
pub struct BlockFactorization {
    pub lhs: UniPoly,
    pub rhs: UniPoly,
    pub block_a: UniPoly,
    pub block_b: UniPoly,
    pub max_coeff_dev: f64,
}

/// Compares `det(l - F)` with `det(l - F_A) det(l - F_B)` for a jet whose
/// quadratic form splits along its partition.
pub fn block_char_factorization(jet: &QuadraticJet) -> Result<BlockFactorization> {
    let partition = jet
        .partition()
        .ok_or_else(|| Error::InvalidArgument("jet carries no block partition".into()))?;
    let d = jet.dim();
    let a = partition.block_a(d);
    let b = partition.block_b(d);
    let m = jet.matrix();
    for &i in &a {
        for &j in &b {
            if !m[(i, j)].is_zero() {
                return Err(Error::CrossTermsPresent(format!(
                    "entry ({}, {}) = {}",
                    Var::from_index(i, d),
                    Var::from_index(j, d),
                    m[(i, j)]
                )));
            }
        }
    }
    let f = hamilton_map(jet);
    let lhs = f.exact().charpoly();
    let block_a = f.exact().select(&a).charpoly();
    let block_b = f.exact().select(&b).charpoly();
    let rhs = block_a.mul(&block_b);
    let n = lhs.coeffs().len().max(rhs.coeffs().len());
    let max_coeff_dev = (0..n)
        .map(|k| (rat_to_f64(&lhs.coeff(k)) - rat_to_f64(&rhs.coeff(k))).abs())
        .fold(0.0, f64::max);
    Ok(BlockFactorization {
        lhs,
        rhs,
        block_a,
        block_b,
        max_coeff_dev,
    })
}

fn check_chain_data(qbar: &[Rational], rbar: &[Rational]) -> Result<()> {
    if qbar.is_empty() || qbar.len() != rbar.len() {
        return Err(Error::InvalidArgument(format!(
            "need equally many q and r values (got {} and {})",
            qbar.len(),
            rbar.len()
        )));
    }
    if let Some(v) = qbar.iter().chain(rbar).find(|v| !v.is_positive()) {
        return Err(Error::NonPositiveInput(v.to_string()));
    }
    Ok(())
}

/// `-(prod 4 q_j)(prod r_j)(sum 1/r_j - 1)`.
pub fn psi_zero(qbar: &[Rational], rbar: &[Rational]) -> Result<Rational> {
    check_chain_data(qbar, rbar)?;
    let four = Rational::from_integer(4.into());
    let prod_q: Rational = qbar.iter().map(|q| q * &four).product();
    let prod_r: Rational = rbar.iter().cloned().product();
    let inv_sum: Rational = rbar.iter().map(|r| r.recip()).sum();
    Ok(-(prod_q * prod_r * (inv_sum - Rational::from_integer(1.into()))))
}

/// The chain model `-tau^2 + sum q_i (x_{i-1} - x_i)^2 + sum r_i xi_i^2`,
/// `x_0 = t`, as a jet in dimension `d = p`.
pub fn chain_model_jet(qbar: &[Rational], rbar: &[Rational]) -> Result<QuadraticJet> {
    check_chain_data(qbar, rbar)?;
    let d = qbar.len();
    let pos = |i: usize| {
        if i == 0 {
            PolySymbol::t(d)
        } else {
            PolySymbol::x(d, i)
        }
    };
    let mut q = -PolySymbol::tau(d).pow(2);
    for i in 1..=d {
        q = q + (pos(i - 1) - pos(i)).pow(2).scale(&qbar[i - 1]);
        q = q + PolySymbol::xi(d, i).pow(2).scale(&rbar[i - 1]);
    }
    let jet = QuadraticJet::from_quadratic(&q)?;
    let all = (0..=d).collect();
    Ok(jet.with_partition(Partition::new(d, all)?))
}

#[derive(Clone, Debug)]
pub struct PsiSignCheck {
    pub psi_zero: Rational,
    pub sign_psi: i32,
    pub has_real_eig: bool,
    pub agree: bool,
}

pub fn psi_zero_sign_equivalence(
    qbar: &[Rational],
    rbar: &[Rational],
    tol: f64,
) -> Result<PsiSignCheck> {
    if qbar.len() > 8 {
        return Err(Error::InvalidArgument("chain length above 8".into()));
    }
    let psi = psi_zero(qbar, rbar)?;
    let jet = chain_model_jet(qbar, rbar)?;
    let f = hamilton_map(&jet);
    let s = spectrum(&f, tol)?;
    let has_real_eig = s.real_witness().is_some();
    let sign_psi = if psi.is_zero() {
        0
    } else if psi.is_negative() {
        -1
    } else {
        1
    };
    Ok(PsiSignCheck {
        psi_zero: psi,
        sign_psi,
        has_real_eig,
        agree: (sign_psi < 0) == has_real_eig,
    })
}
