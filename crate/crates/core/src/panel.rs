use crate::error::{LrcError, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// An `n × p` panel of observations, one row per time point.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesPanel<T> {
    data: Matrix<T>,
}

impl<T: Scalar> TimeSeriesPanel<T> {
    /// Wraps a matrix, requiring `n ≥ 2`, `p ≥ 1` and finite entries.
    pub fn new(data: Matrix<T>) -> Result<Self> {
        if data.rows() < 2 {
            return Err(LrcError::InsufficientLength {
                n: data.rows(),
                needed: 1,
            });
        }
        if data.cols() < 1 {
            return Err(LrcError::Input(
                "panel must have at least one column".into(),
            ));
        }
        if let Some(pos) = data.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(LrcError::Input(format!(
                "non-finite observation at row {}, column {}",
                pos / data.cols(),
                pos % data.cols()
            )));
        }
        Ok(Self { data })
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.data.rows()
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.data.cols()
    }

    #[inline]
    pub fn data(&self) -> &Matrix<T> {
        &self.data
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.data
    }

    /// Contiguous sub-panel of rows `range`.
    pub fn slice_rows(&self, range: std::ops::Range<usize>) -> Result<Self> {
        if range.end > self.n() || range.start >= range.end {
            return Err(LrcError::Input(format!(
                "row range {range:?} invalid for panel of length {}",
                self.n()
            )));
        }
        let p = self.p();
        let data = self.data.as_slice()[range.start * p..range.end * p].to_vec();
        Self::new(Matrix::from_vec(range.len(), p, data)?)
    }

    /// Column means `X̄_n`.
    pub fn column_means(&self) -> Vec<T> {
        let mut mean = vec![T::zero(); self.p()];
        for row in self.data.iter_rows() {
            for (m, &x) in mean.iter_mut().zip(row) {
                *m += x;
            }
        }
        let n = T::from_usize_lossy(self.n());
        mean.iter_mut().for_each(|m| *m /= n);
        mean
    }

    /// Rows with the column means removed.
    pub fn demeaned(&self) -> Matrix<T> {
        let mean = self.column_means();
        let mut out = self.data.clone();
        for t in 0..out.rows() {
            for (x, &m) in out.row_mut(t).iter_mut().zip(&mean) {
                *x -= m;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_short_and_nonfinite() {
        assert!(TimeSeriesPanel::from_rows(&[[1.0f64, 2.0]]).is_err());
        assert!(TimeSeriesPanel::from_rows(&[[1.0f64], [f64::NAN]]).is_err());
        assert!(TimeSeriesPanel::from_rows(&[[1.0f64], [f64::INFINITY]]).is_err());
        assert!(TimeSeriesPanel::from_rows(&[[1.0f64], [2.0]]).is_ok());
    }

    #[test]
    fn slicing_keeps_rows() {
        let x = TimeSeriesPanel::from_rows(&[[1.0f64], [2.0], [3.0], [4.0]]).unwrap();
        let s = x.slice_rows(1..3).unwrap();
        assert_eq!(s.data().as_slice(), &[2.0, 3.0]);
        assert!(x.slice_rows(3..5).is_err());
    }
}
