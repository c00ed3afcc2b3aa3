use crate::error::{Error, Result};
use crate::symbolic::univariate::UniPoly;

#[derive(Clone, Debug, PartialEq)]
pub struct GlaeserReport {
    pub pass: bool,
    /// `max f'(s)^2 / (2 M f(s))` over the core grid, `M = sup |f''|` on the
    /// enlarged interval.
    pub worst_ratio: f64,
    pub worst_point: f64,
    pub sup_second: f64,
}

/// Samples `f'^2 <= 2 sup|f''| f` on `[lo, hi]` with `points` nodes; the
/// supremum and the sign condition use `[lo - margin, hi + margin]`.
pub fn glaeser_check(f: &UniPoly, lo: f64, hi: f64, margin: f64, points: usize) -> Result<GlaeserReport> {
    if !(lo < hi) || margin < 0.0 || points < 2 {
        return Err(Error::InvalidArgument(format!(
            "need lo < hi, margin >= 0, points >= 2 (got [{lo}, {hi}], {margin}, {points})"
        )));
    }
    let fc = f.to_f64();
    let d1 = f.derivative();
    let d2 = d1.derivative();
    let ev = |c: &[f64], s: f64| c.iter().rev().fold(0.0, |acc, k| acc * s + k);
    let (c1, c2) = (d1.to_f64(), d2.to_f64());
    let (elo, ehi) = (lo - margin, hi + margin);
    let fine = 4 * points;
    let mut sup_second: f64 = 0.0;
    for k in 0..=fine {
        let s = elo + (ehi - elo) * k as f64 / fine as f64;
        let v = ev(&fc, s);
        if v < -1e-14 {
            return Err(Error::NegativeInput { at: s, value: v });
        }
        sup_second = sup_second.max(ev(&c2, s).abs());
    }
    let mut worst_ratio: f64 = 0.0;
    let mut worst_point = lo;
    for k in 0..points {
        let s = lo + (hi - lo) * k as f64 / (points - 1) as f64;
        let (fv, dv) = (ev(&fc, s), ev(&c1, s));
        let lhs = dv * dv;
        let rhs = 2.0 * sup_second * fv;
        let ratio = if lhs == 0.0 {
            0.0
        } else if rhs <= 0.0 {
            f64::INFINITY
        } else {
            lhs / rhs
        };
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst_point = s;
        }
    }
    Ok(GlaeserReport {
        pass: worst_ratio <= 1.0 + 1e-12,
        worst_ratio,
        worst_point,
        sup_second,
    })
}
