//! Grid-based certification of the lower bound, the bracket bound and the
//! structural inequalities behind them. All estimates are empirical: they
//! are extremes over finite grids, not proven bounds.

pub mod estimates;
pub mod glaeser;
pub mod grid;
pub mod minimize;
pub mod structural;

pub use estimates::{
    estimate_c, estimate_kappa, verify_nonnegativity, NonnegReport, RatioEstimate, SideResult,
};
pub use glaeser::{glaeser_check, GlaeserReport};
pub use grid::{Axis, Extremes, Grid, GridMeta, Region};
pub use minimize::{envelope_check, minimize_path, minimize_q, EnvelopeCheck, QMinimum};
pub use structural::{
    check_structural, BranchConstant, MarginCheck, StructuralOptions, StructuralReport,
};

use crate::error::Result;
use crate::symbolic::poly::PolySymbol;

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateReport {
    pub nonneg: NonnegReport,
    pub c_est: RatioEstimate,
    pub kappa_est: RatioEstimate,
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        self.nonneg.pass && self.c_est.value > 0.0 && self.kappa_est.value < 1.0
    }
}

/// Nonnegativity, `c_est` and `kappa_est` for `a` and `phi` on `region`.
pub fn certify(a: &PolySymbol, phi: &PolySymbol, region: &Region) -> Result<CertificateReport> {
    Ok(CertificateReport {
        nonneg: verify_nonnegativity(a, region)?,
        c_est: estimate_c(a, phi, region)?,
        kappa_est: estimate_kappa(a, phi, region)?,
    })
}
