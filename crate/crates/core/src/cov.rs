use std::ops::Index;

use crate::error::{LrcError, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Symmetric `p × p` estimate (or target) of a long-run covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix<T> {
    values: Matrix<T>,
}

impl<T: Scalar> CovMatrix<T> {
    /// Accepts a matrix that is already symmetric up to rounding and snaps it
    /// to exact symmetry.
    pub fn new(values: Matrix<T>) -> Result<Self> {
        if !values.is_square() {
            return Err(LrcError::Dimension {
                expected: "square matrix".into(),
                got: format!("{}x{}", values.rows(), values.cols()),
            });
        }
        if !values.all_finite() {
            return Err(LrcError::numerical(
                "covariance matrix has non-finite entries",
            ));
        }
        let scale = values
            .as_slice()
            .iter()
            .fold(T::one(), |m, v| m.max(v.abs()));
        let tol = T::lit(1e-10).max(T::epsilon() * T::lit(64.0)) * scale;
        if !values.is_symmetric(tol) {
            return Err(LrcError::Input("covariance matrix is not symmetric".into()));
        }
        Ok(Self {
            values: values.symmetrized(),
        })
    }

    /// Applies `(A + Aᵀ)/2`, the mandatory last step of every estimator.
    pub fn from_symmetrized(values: Matrix<T>) -> Result<Self> {
        if !values.is_square() {
            return Err(LrcError::Dimension {
                expected: "square matrix".into(),
                got: format!("{}x{}", values.rows(), values.cols()),
            });
        }
        if !values.all_finite() {
            return Err(LrcError::numerical(
                "covariance matrix has non-finite entries",
            ));
        }
        Ok(Self {
            values: values.symmetrized(),
        })
    }

    pub fn zeros(p: usize) -> Self {
        Self {
            values: Matrix::zeros(p, p),
        }
    }

    pub fn identity(p: usize) -> Self {
        Self {
            values: Matrix::identity(p),
        }
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.values.rows()
    }

    #[inline]
    pub fn values(&self) -> &Matrix<T> {
        &self.values
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.values
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.p()).map(|i| self.values[(i, i)]).collect()
    }

    /// Builds a symmetric matrix by applying `f` to every upper-triangle entry
    /// `(i, j, v)` with `i ≤ j` and mirroring.
    pub(crate) fn map_upper(&self, f: impl Fn(usize, usize, T) -> T) -> Self {
        let p = self.p();
        let mut out = Matrix::zeros(p, p);
        for i in 0..p {
            for j in i..p {
                let v = f(i, j, self.values[(i, j)]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        Self { values: out }
    }

    /// Number of nonzero entries.
    pub fn nnz(&self) -> usize {
        self.values
            .as_slice()
            .iter()
            .filter(|v| **v != T::zero())
            .count()
    }

    pub fn scaled(&self, c: T) -> Self {
        Self {
            values: self.values.scaled(c),
        }
    }
}

impl<T> Index<(usize, usize)> for CovMatrix<T> {
    type Output = T;

    fn index(&self, idx: (usize, usize)) -> &T {
        &self.values[idx]
    }
}
