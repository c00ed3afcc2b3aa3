use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::symbolic::phase::Var;

/// Sampling neighborhood of the base point `(0, 0, e_d)` for `t >= 0`.
///
/// Every sampled quantity is homogeneous of degree 0 or has a sign that is
/// invariant along rays in `xi`, so `xi_d` is held at 1 and the cone is
/// sampled through `xi_1..xi_{d-1}` in `[-xi_half, xi_half]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub t_max: f64,
    pub x_half: f64,
    pub xi_half: f64,
    pub t_points: usize,
    pub x_points: usize,
    pub xi_points: usize,
    /// `None` selects `1e-10 * scale^2`.
    pub eta_den: Option<f64>,
}

impl Default for Region {
    fn default() -> Self {
        Region::new(0.1, 0.1, 0.1, 33)
    }
}

impl Region {
    pub fn new(t_max: f64, x_half: f64, xi_half: f64, points: usize) -> Self {
        Region {
            t_max,
            x_half,
            xi_half,
            t_points: points,
            x_points: points,
            xi_points: points,
            eta_den: None,
        }
    }

    pub fn with_points(mut self, points: usize) -> Self {
        self.t_points = points;
        self.x_points = points;
        self.xi_points = points;
        self
    }

    /// Same region, every axis count `n -> 2n - 1` (a nested refinement).
    pub fn refined(&self) -> Self {
        Region {
            t_points: 2 * self.t_points - 1,
            x_points: 2 * self.x_points - 1,
            xi_points: 2 * self.xi_points - 1,
            ..self.clone()
        }
    }

    /// All half-widths scaled by `f`.
    pub fn shrunk(&self, f: f64) -> Self {
        Region {
            t_max: self.t_max * f,
            x_half: self.x_half * f,
            xi_half: self.xi_half * f,
            eta_den: None,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let widths = [self.t_max, self.x_half, self.xi_half];
        if widths.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidRegion(format!(
                "widths must be positive (t_max = {}, x_half = {}, xi_half = {})",
                self.t_max, self.x_half, self.xi_half
            )));
        }
        if self.t_points.min(self.x_points).min(self.xi_points) < 3 {
            return Err(Error::InvalidRegion("grid counts must be at least 3".into()));
        }
        if let Some(e) = self.eta_den {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::InvalidRegion(format!("eta_den = {e} must be positive")));
            }
        }
        Ok(())
    }

    pub fn scale(&self) -> f64 {
        self.t_max.max(self.x_half)
    }

    pub fn eta(&self) -> f64 {
        self.eta_den.unwrap_or(1e-10 * self.scale() * self.scale())
    }

    /// Tensor grid on `t in [0, t_max]`, or on `t in [-t_max, 0]` when
    /// `mirrored` (with `t_k = -t_max k / (n - 1)`).
    pub fn grid(&self, dim: usize, mirrored: bool) -> Grid {
        let mut axes = Vec::with_capacity(2 * dim);
        let t: Vec<f64> = (0..self.t_points)
            .map(|k| {
                let s = self.t_max * k as f64 / (self.t_points - 1) as f64;
                if mirrored && k > 0 {
                    -s
                } else {
                    s
                }
            })
            .collect();
        axes.push(Axis::new(Var::T, t));
        for i in 1..=dim {
            axes.push(Axis::new(Var::X(i), symmetric(self.x_half, self.x_points)));
        }
        for i in 1..dim {
            axes.push(Axis::new(Var::Xi(i), symmetric(self.xi_half, self.xi_points)));
        }
        let mut fixed = vec![0.0; 2 * (dim + 1)];
        fixed[Var::Xi(dim).index(dim)] = 1.0;
        Grid { dim, axes, fixed }
    }
}

fn symmetric(h: f64, n: usize) -> Vec<f64> {
    let mid = (n - 1) as f64 / 2.0;
    (0..n)
        .map(|k| {
            let v = h * (k as f64 - mid) / mid;
            // keep the center exactly on zero for odd counts
            if 2 * k + 1 == n {
                0.0
            } else {
                v
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub var: Var,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(var: Var, values: Vec<f64>) -> Self {
        Axis { var, values }
    }
}

/// Uniform tensor grid over selected phase coordinates; the rest stay at
/// `fixed`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub dim: usize,
    pub axes: Vec<Axis>,
    pub fixed: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridMeta {
    pub axes: Vec<(String, f64, f64, usize)>,
    pub points: usize,
}

impl Grid {
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn meta(&self) -> GridMeta {
        GridMeta {
            axes: self
                .axes
                .iter()
                .map(|a| {
                    let lo = a.values.iter().cloned().fold(f64::INFINITY, f64::min);
                    let hi = a.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    (a.var.to_string(), lo, hi, a.values.len())
                })
                .collect(),
            points: self.len(),
        }
    }

    /// Writes point `idx` into `buf` (last axis varies fastest).
    pub fn point_into(&self, mut idx: usize, buf: &mut [f64]) {
        buf.copy_from_slice(&self.fixed);
        for a in self.axes.iter().rev() {
            let n = a.values.len();
            buf[a.var.index(self.dim)] = a.values[idx % n];
            idx /= n;
        }
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        let mut buf = vec![0.0; self.fixed.len()];
        self.point_into(idx, &mut buf);
        buf
    }

    /// Min and max of `f` over the grid, skipping points where `f` returns
    /// `None`. The result is independent of the worker count: extremes are
    /// selected by value, ties by the lower index.
    pub fn extremes<F>(&self, f: F) -> Extremes
    where
        F: Fn(&[f64]) -> Option<f64> + Sync,
    {
        let n = self.len();
        let width = self.fixed.len();
        (0..n)
            .into_par_iter()
            .fold(
                || (Extremes::empty(), vec![0.0; width]),
                |(mut acc, mut buf), i| {
                    self.point_into(i, &mut buf);
                    match f(&buf) {
                        Some(v) => acc.push(i, v),
                        None => acc.excluded += 1,
                    }
                    (acc, buf)
                },
            )
            .map(|(acc, _)| acc)
            .reduce(Extremes::empty, Extremes::merge)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extremes {
    pub min: Option<(f64, usize)>,
    pub max: Option<(f64, usize)>,
    pub evaluated: usize,
    pub excluded: usize,
}

fn pick(a: Option<(f64, usize)>, b: Option<(f64, usize)>, want: Ordering) -> Option<(f64, usize)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => match x.0.total_cmp(&y.0) {
            o if o == want => Some(x),
            Ordering::Equal => Some(if x.1 <= y.1 { x } else { y }),
            _ => Some(y),
        },
    }
}

impl Extremes {
    pub fn empty() -> Self {
        Extremes {
            min: None,
            max: None,
            evaluated: 0,
            excluded: 0,
        }
    }

    fn push(&mut self, i: usize, v: f64) {
        self.evaluated += 1;
        self.min = pick(self.min, Some((v, i)), Ordering::Less);
        self.max = pick(self.max, Some((v, i)), Ordering::Greater);
    }

    fn merge(a: Extremes, b: Extremes) -> Extremes {
        Extremes {
            min: pick(a.min, b.min, Ordering::Less),
            max: pick(a.max, b.max, Ordering::Greater),
            evaluated: a.evaluated + b.evaluated,
            excluded: a.excluded + b.excluded,
        }
    }

    pub fn max_abs(&self) -> f64 {
        let m = |x: Option<(f64, usize)>| x.map_or(0.0, |v| v.0.abs());
        m(self.min).max(m(self.max))
    }
}
