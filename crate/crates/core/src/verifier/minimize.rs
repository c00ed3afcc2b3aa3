use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::normal_form::ExtendedQ;

#[derive(Clone, Debug, PartialEq)]
pub struct QMinimum {
    pub m: f64,
    pub w_bar: Vec<f64>,
    /// `lambda_max / lambda_min` of the `w`-Hessian at `w_bar`.
    pub hessian_cond: f64,
    pub grad_norm: f64,
    pub iterations: usize,
}

const MAX_ITER: usize = 200;

fn sym_eig_range(h: &DMatrix<f64>) -> (f64, f64) {
    let e = h.clone().symmetric_eigenvalues();
    (e.min(), e.max())
}

/// Minimizes `Q(., theta)` by damped Newton from `start` (the `theta = 0`
/// minimizer when `None`), accepting only steps that do not increase `Q`.
pub fn minimize_q(eq: &ExtendedQ, theta: &[f64], start: Option<&[f64]>) -> Result<QMinimum> {
    let n = eq.w_dim();
    if n == 0 {
        let m = eq.value(&[], theta);
        return Ok(QMinimum {
            m,
            w_bar: vec![],
            hessian_cond: 1.0,
            grad_norm: 0.0,
            iterations: 0,
        });
    }
    let mut w: Vec<f64> = match start {
        Some(s) => s.to_vec(),
        None => eq.constant_part().minimizer.iter().cloned().collect(),
    };
    let mut stalled = false;
    for it in 0..=MAX_ITER {
        let (v, g, h) = eq.w_derivatives(&w, theta);
        let gn = g.norm();
        if gn <= 1e-10 * (1.0 + v.abs()) || (stalled && gn <= 1e-8 * (1.0 + v.abs())) {
            let (lo, hi) = sym_eig_range(&h);
            if !(lo > 1e-14 * hi.abs().max(1.0)) {
                return Err(Error::HessianDegenerate(lo));
            }
            return Ok(QMinimum {
                m: v,
                w_bar: w,
                hessian_cond: hi / lo,
                grad_norm: gn,
                iterations: it,
            });
        }
        if it == MAX_ITER || stalled {
            break;
        }
        let step = newton_direction(&h, &g);
        let slope = g.dot(&step);
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = w.iter().zip(step.iter()).map(|(a, s)| a + alpha * s).collect();
            let tv = eq.value(&trial, theta);
            if tv <= v + 1e-4 * alpha * slope || (tv <= v && alpha < 1e-3) {
                w = trial;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        // no decrease possible at working precision
        stalled = !accepted;
    }
    Err(Error::NoConvergence(format!(
        "minimize_q: gradient did not reach tolerance at theta = {theta:?}"
    )))
}

/// Newton step, shifted toward steepest descent if the Hessian is not
/// positive definite.
fn newton_direction(h: &DMatrix<f64>, g: &DVector<f64>) -> DVector<f64> {
    let n = h.nrows();
    let mut shift = 0.0;
    let base = h.norm().max(1e-12);
    for _ in 0..60 {
        let hs = h + DMatrix::identity(n, n) * shift;
        if let Some(ch) = hs.cholesky() {
            return -ch.solve(g);
        }
        shift = if shift == 0.0 { 1e-8 * base } else { shift * 10.0 };
    }
    -g.clone()
}

/// Minimizes along a set of `theta` values in order of increasing `|theta|`,
/// warm-starting each from the previous minimizer. Results are returned in
/// input order.
pub fn minimize_path(eq: &ExtendedQ, thetas: &[Vec<f64>]) -> Result<Vec<QMinimum>> {
    let mut order: Vec<usize> = (0..thetas.len()).collect();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    order.sort_by(|&a, &b| norm(&thetas[a]).total_cmp(&norm(&thetas[b])).then(a.cmp(&b)));
    let mut out: Vec<Option<QMinimum>> = vec![None; thetas.len()];
    let mut prev: Option<Vec<f64>> = None;
    for i in order {
        let m = minimize_q(eq, &thetas[i], prev.as_deref())?;
        prev = Some(m.w_bar.clone());
        out[i] = Some(m);
    }
    Ok(out.into_iter().map(|m| m.expect("every index visited")).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopeCheck {
    /// `d_theta Q(w_bar, theta)`.
    pub analytic: Vec<f64>,
    /// Central differences of `m(theta)`.
    pub finite_diff: Vec<f64>,
    pub rel_err: f64,
}

/// Compares the envelope gradient `d m / d theta = d_theta Q(w_bar, theta)`
/// with central differences of `m` at step `h`.
pub fn envelope_check(eq: &ExtendedQ, theta: &[f64], h: f64) -> Result<EnvelopeCheck> {
    let base = minimize_q(eq, theta, None)?;
    let analytic: Vec<f64> = eq.theta_gradient(&base.w_bar, theta).iter().cloned().collect();
    let mut fd = Vec::with_capacity(theta.len());
    for k in 0..theta.len() {
        let (mut a, mut b) = (theta.to_vec(), theta.to_vec());
        a[k] += h;
        b[k] -= h;
        let ma = minimize_q(eq, &a, Some(&base.w_bar))?.m;
        let mb = minimize_q(eq, &b, Some(&base.w_bar))?.m;
        fd.push((ma - mb) / (2.0 * h));
    }
    let diff = analytic.iter().zip(&fd).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let norm = analytic.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(EnvelopeCheck {
        rel_err: diff / norm.max(1e-8),
        analytic,
        finite_diff: fd,
    })
}
