use nalgebra::DMatrix;

use crate::linalg::RatMatrix;
use crate::symbolic::jet::QuadraticJet;

/// The Hamilton map of a quadratic form `Q(v) = v^T M v`.
///
/// With positions `X = (t, x)` and momenta `Xi = (tau, xi)` this is
/// `F = 1/2 [[Q_XiX, Q_XiXi], [-Q_XX, -Q_XXi]] = J M`, where row `i`, column
/// `j` of the upper-left block is `d^2 Q / dXi_i dX_j`. It is the linear part
/// of the Hamilton field `H_Q` at the origin, divided by two.
#[derive(Clone, Debug)]
pub struct HamiltonMap {
    exact: RatMatrix,
    matrix: DMatrix<f64>,
}

impl HamiltonMap {
    /// Wraps an arbitrary exact square matrix (used for testing the eigen solver).
    pub fn from_exact(exact: RatMatrix) -> Self {
        assert!(exact.is_square(), "Hamilton map must be square");
        let matrix = exact.to_f64();
        HamiltonMap { exact, matrix }
    }

    pub fn exact(&self) -> &RatMatrix {
        &self.exact
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn size(&self) -> usize {
        self.exact.rows()
    }

    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }
}

pub fn hamilton_map(jet: &QuadraticJet) -> HamiltonMap {
    let m = jet.matrix();
    let n = m.rows();
    let half = n / 2;
    let exact = RatMatrix::from_fn(n, n, |i, j| {
        if i < half {
            m[(i + half, j)].clone()
        } else {
            -m[(i - half, j)].clone()
        }
    });
    HamiltonMap::from_exact(exact)
}
