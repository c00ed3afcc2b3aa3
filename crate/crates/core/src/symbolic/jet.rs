//! Second-order Taylor data of a symbol at a double characteristic.

use num_traits::{One, Zero};

use super::phase::{num_vars, PhasePoint, Rational, Var};
use super::poly::PolySymbol;
use crate::error::{Error, Result};
use crate::linalg::RatMatrix;

/// A block split of the phase space into a symplectically closed set `A` and
/// its complement `B`. Stored as position indices (`0` = t, `i` = x_i); each
/// block automatically contains the conjugate momenta.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    positions: Vec<usize>,
}

impl Partition {
    pub fn new(dim: usize, mut positions: Vec<usize>) -> Result<Self> {
        positions.sort_unstable();
        positions.dedup();
        if positions.iter().any(|&k| k > dim) {
            return Err(Error::InvalidArgument(format!(
                "partition index out of range for d = {dim}"
            )));
        }
        Ok(Partition { positions })
    }

    /// Layout indices of block `A` (positions first, then their momenta).
    pub fn block_a(&self, dim: usize) -> Vec<usize> {
        let mut idx = self.positions.clone();
        idx.extend(self.positions.iter().map(|k| k + dim + 1));
        idx
    }

    pub fn block_b(&self, dim: usize) -> Vec<usize> {
        let rest: Vec<usize> = (0..=dim).filter(|k| !self.positions.contains(k)).collect();
        let mut idx = rest.clone();
        idx.extend(rest.iter().map(|k| k + dim + 1));
        idx
    }
}

/// Quadratic form `Q(v) = v^T M v` on the `2(d + 1)` phase variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticJet {
    dim: usize,
    matrix: RatMatrix,
    partition: Option<Partition>,
}

impl QuadraticJet {
    pub fn new(dim: usize, matrix: RatMatrix) -> Result<Self> {
        let n = num_vars(dim);
        if matrix.rows() != n || !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.rows(),
            });
        }
        if !matrix.is_symmetric() {
            return Err(Error::InvalidArgument("quadratic jet matrix must be symmetric".into()));
        }
        Ok(QuadraticJet {
            dim,
            matrix,
            partition: None,
        })
    }

    /// Reads the quadratic form off a homogeneous quadratic polynomial.
    pub fn from_quadratic(q: &PolySymbol) -> Result<Self> {
        if q.terms().any(|(e, _)| e.iter().sum::<u32>() != 2) {
            return Err(Error::InvalidArgument(format!("`{q}` is not a quadratic form")));
        }
        let n = q.nvars();
        let half = Rational::new(1.into(), 2.into());
        let mut m = RatMatrix::zeros(n, n);
        for (e, c) in q.terms() {
            let idx: Vec<usize> = e
                .iter()
                .enumerate()
                .flat_map(|(k, &x)| std::iter::repeat_n(k, x as usize))
                .collect();
            let (i, j) = (idx[0], idx[1]);
            if i == j {
                m[(i, i)] += c;
            } else {
                m[(i, j)] += c * &half;
                m[(j, i)] += c * &half;
            }
        }
        Self::new(q.dim(), m)
    }

    pub fn with_partition(mut self, partition: Partition) -> Self {
        self.partition = Some(partition);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn partition(&self) -> Option<&Partition> {
        self.partition.as_ref()
    }

    pub fn eval(&self, v: &[Rational]) -> Rational {
        self.matrix.quadratic_form(v)
    }

    pub fn to_poly(&self) -> PolySymbol {
        let n = num_vars(self.dim);
        let mut terms = Vec::new();
        for i in 0..n {
            for j in i..n {
                let c = &self.matrix[(i, j)];
                if c.is_zero() {
                    continue;
                }
                let mut e = vec![0; n];
                e[i] += 1;
                e[j] += 1;
                let c = if i == j { c.clone() } else { c * Rational::from_integer(2.into()) };
                terms.push((e, c));
            }
        }
        PolySymbol::from_terms(self.dim, terms).expect("layout-sized exponents")
    }

    /// Whether the tau-diagonal entry is -1, i.e. the jet has the shape `-tau^2 + Q`.
    pub fn has_hyperbolic_shape(&self) -> bool {
        let k = Var::Tau.index(self.dim);
        self.matrix[(k, k)] == -Rational::one()
            && (0..num_vars(self.dim)).all(|j| j == k || self.matrix[(k, j)].is_zero())
    }
}

/// Value and gradient of a symbol at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularityCheck {
    pub value: Rational,
    pub gradient: Vec<Rational>,
}

impl SingularityCheck {
    pub fn is_singular(&self) -> bool {
        self.value.is_zero() && self.gradient.iter().all(Zero::is_zero)
    }

    fn first_failure(&self, dim: usize) -> Option<Error> {
        if !self.value.is_zero() {
            return Some(Error::NotSingular {
                derivative: "p".into(),
                value: self.value.to_string(),
            });
        }
        self.gradient.iter().enumerate().find(|(_, g)| !g.is_zero()).map(|(k, g)| {
            Error::NotSingular {
                derivative: format!("dp/d{}", Var::from_index(k, dim)),
                value: g.to_string(),
            }
        })
    }
}

pub fn singularity_check(p: &PolySymbol, at: &PhasePoint) -> Result<SingularityCheck> {
    let value = p.eval(at)?;
    let coords = at.coords();
    let gradient = (0..p.nvars())
        .map(|k| p.derivative_index(k).eval_coords(&coords))
        .collect();
    Ok(SingularityCheck { value, gradient })
}

/// The exact quadratic part of `p` at a singular point: `M = Hess p / 2`.
pub fn quadratic_jet(p: &PolySymbol, at: &PhasePoint) -> Result<QuadraticJet> {
    let check = singularity_check(p, at)?;
    if let Some(err) = check.first_failure(p.dim()) {
        return Err(err);
    }
    let n = p.nvars();
    let coords = at.coords();
    let half = Rational::new(1.into(), 2.into());
    let firsts: Vec<PolySymbol> = (0..n).map(|k| p.derivative_index(k)).collect();
    let mut m = RatMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = firsts[i].derivative_index(j).eval_coords(&coords) * &half;
            m[(i, j)] = v.clone();
            m[(j, i)] = v;
        }
    }
    QuadraticJet::new(p.dim(), m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::phase::int;

    fn hyperbolic(a: PolySymbol) -> PolySymbol {
        let d = a.dim();
        a - PolySymbol::tau(d).pow(2)
    }

    #[test]
    fn jet_drops_cubic_terms() {
        let d = 2;
        let t = PolySymbol::t(d);
        let x1 = PolySymbol::x(d, 1);
        let xi2 = PolySymbol::xi(d, 2);
        let p = hyperbolic(((&t - &x1).pow(2) + x1.pow(3)) * xi2.pow(2));
        let jet = quadratic_jet(&p, &PhasePoint::base(d)).unwrap();
        let expect = hyperbolic((&t - &x1).pow(2));
        assert_eq!(jet.to_poly(), expect);
        assert!(jet.has_hyperbolic_shape());
    }

    #[test]
    fn jet_of_classical_example() {
        let d = 2;
        let xi_sq = PolySymbol::xi(d, 1).pow(2) + PolySymbol::xi(d, 2).pow(2);
        let p = hyperbolic(PolySymbol::t(d).pow(2) * xi_sq);
        let jet = quadratic_jet(&p, &PhasePoint::base(d)).unwrap();
        assert_eq!(jet.to_poly(), hyperbolic(PolySymbol::t(d).pow(2)));
    }

    #[test]
    fn non_singular_point_names_the_derivative() {
        let d = 2;
        let p = hyperbolic(PolySymbol::t(d) * PolySymbol::xi(d, 2).pow(2));
        let err = quadratic_jet(&p, &PhasePoint::base(d)).unwrap_err();
        assert_eq!(
            err,
            Error::NotSingular {
                derivative: "dp/dt".into(),
                value: "1".into()
            }
        );
    }

    #[test]
    fn quadratic_round_trip() {
        let d = 1;
        let q = PolySymbol::t(d) * PolySymbol::x(d, 1).scale(&int(3)) + PolySymbol::xi(d, 1).pow(2);
        let jet = QuadraticJet::from_quadratic(&q).unwrap();
        assert_eq!(jet.to_poly(), q);
        assert!(QuadraticJet::from_quadratic(&PolySymbol::t(d)).is_err());
    }

    #[test]
    fn partition_blocks_are_complementary() {
        let p = Partition::new(2, vec![0, 1]).unwrap();
        assert_eq!(p.block_a(2), vec![0, 1, 3, 4]);
        assert_eq!(p.block_b(2), vec![2, 5]);
        assert!(Partition::new(2, vec![3]).is_err());
    }
}
