//! Time functions `f = t - phi` for the two normal-form branches, the
//! optimal weights behind the form 2 construction, and the pointwise
//! condition `p_rho(-H_f) < 0`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::normal_form::{build_normal_form, NormalFormSpec, Variant};
use crate::symbolic::calculus::{hamilton_field, homogeneity_check, poisson_bracket};
use crate::symbolic::jet::QuadraticJet;
use crate::symbolic::phase::{rat, rat_to_f64, PhasePoint, Rational};
use crate::symbolic::poly::PolySymbol;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Form1Lift,
    Form2Weights,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Form1Lift => "form1-lift",
            Branch::Form2Weights => "form2-weights",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonWeights {
    pub eps: Vec<Rational>,
    /// `sum eps_i^2 r_i`, equal to `1 / sum (1/r_i)` for these weights.
    pub rho_weight: Rational,
    pub kappa: Rational,
}

/// The minimizer of `sum eps_i^2 r_i` under `sum eps_i = 1`:
/// `eps_i = (1/r_i) / sum_j (1/r_j)`.
pub fn epsilon_weights(rbar: &[Rational], slack: &Rational) -> Result<EpsilonWeights> {
    if rbar.is_empty() {
        return Err(Error::InvalidArgument("no r values".into()));
    }
    if let Some(v) = rbar.iter().chain(std::iter::once(slack)).find(|v| !v.is_positive()) {
        return Err(Error::NonPositiveInput(v.to_string()));
    }
    let inv_sum: Rational = rbar.iter().map(|r| r.recip()).sum();
    if inv_sum <= Rational::one() {
        return Err(Error::BbisViolated {
            sum: inv_sum.to_string(),
        });
    }
    let eps: Vec<Rational> = rbar.iter().map(|r| r.recip() / &inv_sum).collect();
    let rho_weight: Rational = eps.iter().zip(rbar).map(|(e, r)| e * e * r).sum();
    debug_assert_eq!(rho_weight, inv_sum.recip());
    let kappa = &rho_weight + slack / Rational::from_integer(2.into());
    if kappa >= Rational::one() {
        return Err(Error::SlackTooLarge {
            kappa: kappa.to_string(),
        });
    }
    Ok(EpsilonWeights {
        eps,
        rho_weight,
        kappa,
    })
}

/// `alpha_j = sum_{i >= j} eps_i`, so that
/// `t - sum eps_i x_i = sum alpha_j (x_{j-1} - x_j)` with `x_0 = t`.
pub fn alpha_coefficients(eps: &[Rational]) -> Result<Vec<Rational>> {
    let sum: Rational = eps.iter().cloned().sum();
    if eps.is_empty() || sum != Rational::one() {
        return Err(Error::WeightsNotNormalized {
            sum: sum.to_string(),
        });
    }
    let mut alpha = vec![Rational::zero(); eps.len()];
    let mut acc = Rational::zero();
    for j in (0..eps.len()).rev() {
        acc += &eps[j];
        alpha[j] = acc.clone();
    }
    assert!(alpha_identity_holds(eps, &alpha), "telescoping identity failed");
    Ok(alpha)
}

/// Checks `t - sum eps_i x_i = sum alpha_j (x_{j-1} - x_j)` as polynomials.
pub fn alpha_identity_holds(eps: &[Rational], alpha: &[Rational]) -> bool {
    let p = eps.len();
    if p == 0 || alpha.len() != p {
        return false;
    }
    let pos = |i: usize| if i == 0 { PolySymbol::t(p) } else { PolySymbol::x(p, i) };
    let mut lhs = PolySymbol::t(p);
    let mut rhs = PolySymbol::zero(p);
    for j in 1..=p {
        lhs = lhs - pos(j).scale(&eps[j - 1]);
        rhs = rhs + (pos(j - 1) - pos(j)).scale(&alpha[j - 1]);
    }
    lhs == rhs
}

/// `sum (eps_i + delta v_i)^2 r_i - sum eps_i^2 r_i` for `v` projected to
/// `sum v_i = 0` and normalized; nonnegative at the optimal weights.
pub fn minimality_gap(rbar: &[Rational], eps: &[Rational], v: &[f64], delta: f64) -> f64 {
    let n = eps.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let mut u: Vec<f64> = v.iter().map(|x| x - mean).collect();
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return 0.0;
    }
    u.iter_mut().for_each(|x| *x /= norm);
    // (e + du)^2 r - e^2 r = 2 d e u r + d^2 u^2 r, summed; the linear part
    // vanishes exactly at the optimum, so evaluate it apart.
    let lin: f64 = eps.iter().zip(&u).zip(rbar).map(|((e, x), r)| 2.0 * rat_to_f64(&(e * r)) * x).sum();
    let quad: f64 = u.iter().zip(rbar).map(|(x, r)| x * x * rat_to_f64(r)).sum();
    delta * lin + delta * delta * quad
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimeFunctionCert {
    pub phi: PolySymbol,
    pub branch: Branch,
    pub slack: Rational,
    pub kappa_target: Rational,
    /// Form 2 only.
    pub eps: Vec<Rational>,
    pub rho_weight: Option<Rational>,
    pub alpha: Vec<Rational>,
    /// `{phi, {phi, a}}` at the base point.
    pub h_phi_sq_a: Rational,
    pub notes: Vec<String>,
}

impl TimeFunctionCert {
    pub fn time_function(&self) -> PolySymbol {
        PolySymbol::t(self.phi.dim()) - &self.phi
    }
}

pub fn default_slack() -> Rational {
    rat(1, 100)
}

pub fn construct_time_function(spec: &NormalFormSpec, slack: &Rational) -> Result<TimeFunctionCert> {
    if !slack.is_positive() {
        return Err(Error::NonPositiveInput(slack.to_string()));
    }
    let d = spec.dim();
    let a = build_normal_form(spec)?;
    let base = spec.base();
    let half = Rational::from_integer(2.into());
    let mut notes = Vec::new();
    let (phi, branch, kappa_target, eps, rho_weight, alpha) = match spec.variant() {
        Variant::Form1 => {
            let kappa = slack / &half;
            if kappa >= Rational::one() {
                return Err(Error::SlackTooLarge {
                    kappa: kappa.to_string(),
                });
            }
            notes.push("phi lifted from phi_p; kappa target is slack/2".to_string());
            let phi = spec.phi().expect("form 1").clone();
            (phi, Branch::Form1Lift, kappa, vec![], None, vec![])
        }
        Variant::Form2 => {
            let w = epsilon_weights(&spec.r_bar(), slack)?;
            let alpha = alpha_coefficients(&w.eps)?;
            let mut phi = PolySymbol::zero(d);
            for (i, e) in w.eps.iter().enumerate() {
                phi = phi + PolySymbol::x(d, i + 1).scale(e);
            }
            notes.push("phi = sum eps_i x_i with eps_i proportional to 1/r_i".to_string());
            (phi, Branch::Form2Weights, w.kappa, w.eps, Some(w.rho_weight), alpha)
        }
    };
    assert!(homogeneity_check(&phi, 0).homogeneous, "phi must be xi-homogeneous of degree 0");
    let inner = poisson_bracket(&phi, &a)?;
    let h_phi_sq_a = poisson_bracket(&phi, &inner)?.eval(&base)?;
    if let Some(rho) = &rho_weight {
        if h_phi_sq_a != rho * &half {
            notes.push(format!(
                "H_phi^2 a(base) = {h_phi_sq_a} differs from 2 rho_weight = {}",
                rho * &half
            ));
        }
    }
    Ok(TimeFunctionCert {
        phi,
        branch,
        slack: slack.clone(),
        kappa_target,
        eps,
        rho_weight,
        alpha,
        h_phi_sq_a,
        notes,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimeFunctionCondition {
    pub value: Rational,
    pub is_time_function: bool,
}

impl TimeFunctionCondition {
    pub fn value_f64(&self) -> f64 {
        rat_to_f64(&self.value)
    }
}

/// `p_rho(-H_f(rho))` where `p_rho` is the quadratic jet of `p` at `rho`.
pub fn time_function_condition(
    jet: &QuadraticJet,
    f: &PolySymbol,
    at: &PhasePoint,
) -> Result<TimeFunctionCondition> {
    if jet.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: jet.dim(),
            found: f.dim(),
        });
    }
    let v: Vec<Rational> = hamilton_field(f, at)?.into_iter().map(|c| -c).collect();
    let value = jet.eval(&v);
    let is_time_function = value.is_negative();
    Ok(TimeFunctionCondition {
        value,
        is_time_function,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::phase::int;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn weights_examples() {
        let w = epsilon_weights(&[rat(1, 2), int(3)], &rat(1, 100)).unwrap();
        assert_eq!(w.eps, vec![rat(6, 7), rat(1, 7)]);
        assert_eq!(w.rho_weight, rat(3, 7));
        assert_eq!(w.kappa, rat(3, 7) + rat(1, 200));
        let w = epsilon_weights(&[rat(1, 2)], &rat(1, 100)).unwrap();
        assert_eq!((w.eps, w.rho_weight), (vec![int(1)], rat(1, 2)));
        assert!(matches!(
            epsilon_weights(&[int(2), int(2)], &rat(1, 100)),
            Err(Error::BbisViolated { .. })
        ));
        assert!(matches!(
            epsilon_weights(&[rat(1, 2)], &int(1)),
            Err(Error::SlackTooLarge { .. })
        ));
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_coefficients(&[rat(6, 7), rat(1, 7)]).unwrap(), vec![int(1), rat(1, 7)]);
        assert_eq!(alpha_coefficients(&[int(1)]).unwrap(), vec![int(1)]);
        assert_eq!(alpha_coefficients(&[rat(1, 2), rat(1, 2)]).unwrap(), vec![int(1), rat(1, 2)]);
        assert!(matches!(
            alpha_coefficients(&[rat(1, 2), rat(1, 3)]),
            Err(Error::WeightsNotNormalized { .. })
        ));
        assert!(!alpha_identity_holds(&[rat(1, 2), rat(1, 2)], &[int(1), rat(1, 3)]));
    }

    #[test]
    fn weights_are_first_order_minimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut done = 0;
        while done < 100 {
            let p = rng.gen_range(1..=4);
            let rbar: Vec<Rational> =
                (0..p).map(|_| rat(rng.gen_range(10..300), 100)).collect();
            let Ok(w) = epsilon_weights(&rbar, &rat(1, 100)) else { continue };
            let sum: Rational = w.eps.iter().cloned().sum();
            assert_eq!(sum, Rational::one());
            let inv: Rational = rbar.iter().map(|r| r.recip()).sum();
            assert_eq!(w.rho_weight, inv.recip());
            assert!(w.kappa < Rational::one());
            let v: Vec<f64> = (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect();
            assert!(minimality_gap(&rbar, &w.eps, &v, 1e-3) >= 0.0);
            let alpha = alpha_coefficients(&w.eps).unwrap();
            assert!(alpha_identity_holds(&w.eps, &alpha));
            done += 1;
        }
    }

    fn b1() -> NormalFormSpec {
        let d = 2;
        let x1 = PolySymbol::x(d, 1);
        NormalFormSpec::form1(d, 0, vec![PolySymbol::xi(d, 2).pow(2)], vec![], x1.clone(), x1.pow(3))
            .unwrap()
    }

    fn b2(r1: Rational) -> NormalFormSpec {
        let d = 2;
        let xi2sq = PolySymbol::xi(d, 2).pow(2);
        let g = PolySymbol::x(d, 1).pow(3) * &xi2sq;
        NormalFormSpec::form2(d, 1, vec![xi2sq], vec![PolySymbol::constant(d, r1)], g).unwrap()
    }

    #[test]
    fn fixture_certificates() {
        let c = construct_time_function(&b1(), &rat(1, 100)).unwrap();
        assert_eq!((c.branch, c.phi.clone()), (Branch::Form1Lift, PolySymbol::x(2, 1)));
        assert_eq!(c.kappa_target, rat(1, 200));
        assert_eq!(c.h_phi_sq_a, int(0));

        let c = construct_time_function(&b2(rat(1, 2)), &rat(1, 100)).unwrap();
        assert_eq!((c.branch, c.phi.clone()), (Branch::Form2Weights, PolySymbol::x(2, 1)));
        assert_eq!(c.rho_weight, Some(rat(1, 2)));
        assert_eq!(c.kappa_target, rat(101, 200));
        assert_eq!(c.h_phi_sq_a, int(1));
        assert!(c.notes.iter().all(|n| !n.contains("differs")));

        assert!(matches!(
            construct_time_function(&b2(int(2)), &rat(1, 100)),
            Err(Error::BbisViolated { .. })
        ));
    }

    #[test]
    fn second_bracket_is_twice_rho_for_longer_chains() {
        let d = 3;
        let xi3sq = PolySymbol::xi(d, 3).pow(2);
        let spec = NormalFormSpec::form2(
            d,
            2,
            vec![xi3sq.clone(), xi3sq.scale(&int(3))],
            vec![PolySymbol::constant(d, rat(1, 2)), PolySymbol::constant(d, int(3))],
            PolySymbol::x(d, 3).pow(2) * &xi3sq,
        )
        .unwrap();
        let c = construct_time_function(&spec, &rat(1, 100)).unwrap();
        assert_eq!(c.eps, vec![rat(6, 7), rat(1, 7)]);
        assert_eq!(c.h_phi_sq_a, rat(6, 7));
        assert_eq!(c.alpha, vec![int(1), rat(1, 7)]);
    }

    fn jet_of(q: PolySymbol) -> QuadraticJet {
        QuadraticJet::from_quadratic(&q).unwrap()
    }

    #[test]
    fn condition_examples() {
        let d = 2;
        let t = PolySymbol::t(d);
        let x1 = PolySymbol::x(d, 1);
        let tau2 = PolySymbol::tau(d).pow(2);
        let at = PhasePoint::base(d);
        let jet = jet_of((&t - &x1).pow(2) + PolySymbol::xi(d, 1).pow(2).scale(&rat(1, 2)) - &tau2);
        let c = time_function_condition(&jet, &(&t - &x1), &at).unwrap();
        assert_eq!(c.value, rat(-1, 2));
        assert!(c.is_time_function);
        let c = time_function_condition(&jet, &t, &at).unwrap();
        assert_eq!(c.value, int(-1));
        assert!(c.is_time_function);
        let jet = jet_of(PolySymbol::xi(d, 1).pow(2) - &tau2);
        let c = time_function_condition(&jet, &(&t - &x1), &at).unwrap();
        assert_eq!(c.value, int(0));
        assert!(!c.is_time_function);
        assert!(matches!(
            time_function_condition(&jet, &PolySymbol::t(3), &at),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
