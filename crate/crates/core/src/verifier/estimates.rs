use super::grid::{Extremes, Grid, GridMeta, Region};
use crate::error::{Error, Result};
use crate::symbolic::calculus::poisson_bracket;
use crate::symbolic::phase::Var;
use crate::symbolic::poly::PolySymbol;

#[derive(Clone, Debug, PartialEq)]
pub struct SideResult {
    pub min_value: f64,
    pub witness: Vec<f64>,
    pub grid: GridMeta,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NonnegReport {
    pub pass: bool,
    pub min_value: f64,
    pub witness: Vec<f64>,
    /// Threshold scale: largest `|a|` seen on the `t >= 0` grid, at least 1.
    pub scale: f64,
    pub grid: GridMeta,
    /// The same check on `t <= 0`; a negative minimum there shows `a` is
    /// only one-sidedly nonnegative.
    pub mirrored: SideResult,
}

impl NonnegReport {
    pub fn negative_for_negative_t(&self) -> bool {
        self.mirrored.min_value < -1e-12 * self.scale
    }
}

fn side(grid: &Grid, ext: &Extremes) -> (f64, Vec<f64>) {
    let (v, i) = ext.min.expect("grid is nonempty");
    (v, grid.point(i))
}

pub fn verify_nonnegativity(a: &PolySymbol, region: &Region) -> Result<NonnegReport> {
    region.validate()?;
    let d = a.dim();
    let ac = a.compile();
    let grid = region.grid(d, false);
    let ext = grid.extremes(|c| Some(ac.eval(c)));
    let scale = ext.max_abs().max(1.0);
    let (min_value, witness) = side(&grid, &ext);
    let mgrid = region.grid(d, true);
    let mext = mgrid.extremes(|c| Some(ac.eval(c)));
    let (mmin, mwit) = side(&mgrid, &mext);
    Ok(NonnegReport {
        pass: min_value >= -1e-12 * scale,
        min_value,
        witness,
        scale,
        grid: grid.meta(),
        mirrored: SideResult {
            min_value: mmin,
            witness: mwit,
            grid: mgrid.meta(),
        },
    })
}

/// An infimum or supremum of a ratio over the grid, with exclusions.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioEstimate {
    pub value: f64,
    pub witness: Vec<f64>,
    pub evaluated: usize,
    pub excluded: usize,
    pub eta_den: f64,
    pub grid: GridMeta,
}

fn xi_norm_sq(c: &[f64], d: usize) -> f64 {
    (1..=d).map(|i| c[Var::Xi(i).index(d)].powi(2)).sum()
}

/// `inf a / (min{t^2, (t - phi)^2} |xi|^2)` over grid points whose
/// denominator is at least `eta_den`.
pub fn estimate_c(a: &PolySymbol, phi: &PolySymbol, region: &Region) -> Result<RatioEstimate> {
    region.validate()?;
    a.ensure_same_dim(phi)?;
    let d = a.dim();
    let (ac, pc) = (a.compile(), phi.compile());
    let eta = region.eta();
    let grid = region.grid(d, false);
    let ext = grid.extremes(|c| {
        let t = c[0];
        let den = (t * t).min((t - pc.eval(c)).powi(2)) * xi_norm_sq(c, d);
        (den >= eta).then(|| ac.eval(c) / den)
    });
    finish(&grid, ext, eta, ext.min)
}

/// `sup {phi, a}^2 / (4 a)` over grid points with `a >= eta_den`.
pub fn estimate_kappa(a: &PolySymbol, phi: &PolySymbol, region: &Region) -> Result<RatioEstimate> {
    region.validate()?;
    a.ensure_same_dim(phi)?;
    let d = a.dim();
    let br = poisson_bracket(phi, a)?.compile();
    let ac = a.compile();
    let eta = region.eta();
    let grid = region.grid(d, false);
    let ext = grid.extremes(|c| {
        let av = ac.eval(c);
        (av >= eta).then(|| br.eval(c).powi(2) / (4.0 * av))
    });
    finish(&grid, ext, eta, ext.max)
}

fn finish(grid: &Grid, ext: Extremes, eta: f64, pick: Option<(f64, usize)>) -> Result<RatioEstimate> {
    let (value, i) = pick.ok_or(Error::AllPointsDegenerate { eta })?;
    Ok(RatioEstimate {
        value,
        witness: grid.point(i),
        evaluated: ext.evaluated,
        excluded: ext.excluded,
        eta_den: eta,
        grid: grid.meta(),
    })
}
