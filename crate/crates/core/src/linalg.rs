//! Small dense matrices over the rationals.

use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num_traits::{One, Zero};

use crate::symbolic::phase::{rat_to_f64, Rational};
use crate::symbolic::univariate::UniPoly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RatMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn sub(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Principal submatrix on the given index set.
    pub fn select(&self, idx: &[usize]) -> RatMatrix {
        Self::from_fn(idx.len(), idx.len(), |i, j| self[(idx[i], idx[j])].clone())
    }

    /// `x^T M x`
    pub fn quadratic_form(&self, x: &[Rational]) -> Rational {
        let mut s = Rational::zero();
        for i in 0..self.rows {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.cols {
                if !x[j].is_zero() && !self[(i, j)].is_zero() {
                    s += &x[i] * &self[(i, j)] * &x[j];
                }
            }
        }
        s
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| rat_to_f64(&self[(i, j)]))
    }

    /// Characteristic polynomial `det(l I - M)`, computed exactly by reduction
    /// to upper Hessenberg form followed by the Hessenberg determinant
    /// recurrence.
    pub fn charpoly(&self) -> UniPoly {
        assert!(self.is_square(), "characteristic polynomial of a non-square matrix");
        let n = self.rows;
        let mut h = self.clone();
        // Gaussian similarity reduction to Hessenberg form.
        for m in 1..n.saturating_sub(1) {
            let pivot = (m..n).find(|&i| !h[(i, m - 1)].is_zero());
            let Some(i) = pivot else { continue };
            if i != m {
                h.swap_rows(i, m);
                h.swap_cols(i, m);
            }
            for i in m + 1..n {
                if h[(i, m - 1)].is_zero() {
                    continue;
                }
                let u = &h[(i, m - 1)] / &h[(m, m - 1)];
                for j in 0..n {
                    let v = &u * &h[(m, j)];
                    h[(i, j)] -= v;
                }
                for j in 0..n {
                    let v = &u * &h[(j, i)];
                    h[(j, m)] += v;
                }
            }
        }
        // p_k = (l - h_kk) p_{k-1} - sum_{i<k} h_ik (prod_{j=i+1..k} h_{j,j-1}) p_{i-1}
        let mut p: Vec<UniPoly> = Vec::with_capacity(n + 1);
        p.push(UniPoly::one());
        for k in 0..n {
            let mut next = UniPoly::linear(h[(k, k)].clone()).mul(&p[k]);
            let mut prod = Rational::one();
            for i in (0..k).rev() {
                prod *= &h[(i + 1, i)];
                if prod.is_zero() {
                    break;
                }
                let c = &h[(i, k)] * &prod;
                if !c.is_zero() {
                    next = next.sub(&p[i].scale(&c));
                }
            }
            p.push(next);
        }
        p.pop().unwrap()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::phase::int;

    /// Leibniz-formula determinant of `l I - M` evaluated at integer points,
    /// as an oracle independent of the Hessenberg route.
    fn det(m: &RatMatrix) -> Rational {
        let n = m.rows();
        if n == 0 {
            return Rational::one();
        }
        let mut total = Rational::zero();
        for j in 0..n {
            if m[(0, j)].is_zero() {
                continue;
            }
            let minor_idx: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let minor = RatMatrix::from_fn(n - 1, n - 1, |r, c| m[(r + 1, minor_idx[c])].clone());
            let sign = if j % 2 == 0 { int(1) } else { int(-1) };
            total += sign * &m[(0, j)] * det(&minor);
        }
        total
    }

    #[test]
    fn charpoly_matches_cofactor_determinant() {
        let vals = [3, -1, 0, 2, 5, 1, -2, 4, 0, 0, 1, 7, -3, 2, 2, 1, 0, 6, 1, -1, 2, 0, 3, 1, 1];
        let m = RatMatrix::from_fn(5, 5, |i, j| int(vals[i * 5 + j]));
        let cp = m.charpoly();
        assert_eq!(cp.degree(), Some(5));
        for l in -3..=3 {
            let shifted = RatMatrix::identity(5).scale(&int(l)).sub(&m);
            assert_eq!(cp.eval(&int(l)), det(&shifted), "at l = {l}");
        }
    }

    #[test]
    fn charpoly_handles_zero_subdiagonal() {
        let m = RatMatrix::from_fn(4, 4, |i, j| if i == j { int(i as i64) } else { int(0) });
        assert_eq!(
            m.charpoly(),
            UniPoly::monomial(1)
                .mul(&UniPoly::linear(int(1)))
                .mul(&UniPoly::linear(int(2)))
                .mul(&UniPoly::linear(int(3)))
        );
        assert_eq!(RatMatrix::zeros(3, 3).charpoly(), UniPoly::monomial(3));
    }
}
