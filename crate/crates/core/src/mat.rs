//! Small dense matrices over a generic scalar.
//!
//! Sizes here are basis dimensions (rarely beyond a few hundred), so the
//! representation is a plain row-major vector and the algorithms are the
//! classical O(n³) ones. Exactness, not scale, is the point: over the
//! exact tower every inverse and every product is an identity, not an
//! approximation.

use std::ops::{Index, IndexMut};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::invalid("matrix", "ragged rows"));
        }
        Ok(Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[S] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Mat<S> {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Entrywise conjugate.
    pub fn conjugate(&self) -> Mat<S> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Scalar::conj).collect(),
        }
    }

    pub fn mul(&self, rhs: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out: Mat<S> = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)].clone();
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * rhs[(k, j)].clone();
                }
            }
        }
        out
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Mat<T> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Largest entry modulus squared; zero for empty matrices.
    pub fn max_abs_sq(&self) -> S::Real {
        let mut best = <S::Real as Zero>::zero();
        for x in &self.data {
            let a = x.abs_sq();
            if a > best {
                best = a;
            }
        }
        best
    }

    /// Gauss–Jordan inverse with partial pivoting on `|entry|²`. Exact over
    /// the exact tower; returns [`Error::SingularMatrix`] when no usable
    /// pivot remains.
    pub fn inverse(&self) -> Result<Mat<S>> {
        assert_eq!(self.rows, self.cols, "inverse needs a square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv: Mat<S> = Mat::identity(n);
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&r, &s| {
                    a[(r, col)]
                        .abs_sq()
                        .partial_cmp(&a[(s, col)].abs_sq())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .ok_or(Error::SingularMatrix)?;
            if a[(pivot_row, col)].is_zero() {
                return Err(Error::SingularMatrix);
            }
            a.swap_rows(col, pivot_row);
            inv.swap_rows(col, pivot_row);
            let p = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] = a[(col, j)].clone() / p.clone();
                inv[(col, j)] = inv[(col, j)].clone() / p.clone();
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[(r, col)].clone();
                if factor.is_zero() {
                    continue;
                }
                for j in 0..n {
                    a[(r, j)] = a[(r, j)].clone() - factor.clone() * a[(col, j)].clone();
                    inv[(r, j)] = inv[(r, j)].clone() - factor.clone() * inv[(col, j)].clone();
                }
            }
        }
        Ok(inv)
    }

    /// Exact inverse of a unit lower-triangular matrix by forward
    /// substitution (cheaper and pivot-free).
    pub fn unit_lower_inverse(&self) -> Mat<S> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut inv: Mat<S> = Mat::identity(n);
        for i in 0..n {
            for j in 0..i {
                // inv[i][j] = -(sum_{k=j}^{i-1} L[i][k] * inv[k][j])
                let mut acc = S::zero();
                for k in j..i {
                    acc = acc + self[(i, k)].clone() * inv[(k, j)].clone();
                }
                inv[(i, j)] = -acc;
            }
        }
        inv
    }

    pub fn swap_rows(&mut self, r: usize, s: usize) {
        if r == s {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(r * self.cols + j, s * self.cols + j);
        }
    }

    /// Largest deviation `|m_ij - conj(m_ji)|²` from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> S::Real {
        let mut worst = <S::Real as Zero>::zero();
        for i in 0..self.rows {
            for j in 0..=i {
                let d = (self[(i, j)].clone() - self[(j, i)].conj()).abs_sq();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }
}

impl<S> Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (r, c): (usize, usize)) -> &S {
        &self.data[r * self.cols + c]
    }
}

impl<S> IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut S {
        &mut self.data[r * self.cols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational;

    fn g(n: i64, d: i64) -> GaussianRational {
        GaussianRational::from_ratio(n, d)
    }

    #[test]
    fn exact_inverse_round_trip() {
        let a = Mat::from_rows(vec![
            vec![g(3, 5), g(4, 5)],
            vec![g(-4, 5), g(3, 5)],
        ])
        .unwrap();
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Mat::identity(2));
        assert_eq!(inv.mul(&a), Mat::identity(2));
    }

    #[test]
    fn singular_matrix_rejected() {
        let a = Mat::from_rows(vec![
            vec![g(1, 1), g(2, 1)],
            vec![g(2, 1), g(4, 1)],
        ])
        .unwrap();
        assert!(matches!(a.inverse(), Err(Error::SingularMatrix)));
    }

    #[test]
    fn unit_lower_inverse_matches_general() {
        let l = Mat::from_rows(vec![
            vec![g(1, 1), g(0, 1), g(0, 1)],
            vec![g(1, 2), g(1, 1), g(0, 1)],
            vec![g(-2, 3), g(5, 7), g(1, 1)],
        ])
        .unwrap();
        assert_eq!(l.unit_lower_inverse(), l.inverse().unwrap());
    }

    #[test]
    fn adjoint_conjugates() {
        let i = GaussianRational::new(g(0, 1).re, g(1, 1).re);
        let a = Mat::from_rows(vec![vec![g(1, 1), i.clone()]]).unwrap();
        let ad = a.adjoint();
        assert_eq!(ad.nrows(), 2);
        assert_eq!(ad[(1, 0)], -i);
    }
}
