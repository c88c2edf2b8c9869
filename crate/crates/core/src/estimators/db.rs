use std::ops::Range;

use super::{fold_lags, fold_row, kernel_lag_sum, lagged_autocov};
use crate::cov::CovMatrix;
use crate::diff::DiffConfig;
use crate::error::{LrcError, Result};
use crate::matrix::{cross_product, Matrix};
use crate::panel::TimeSeriesPanel;
use crate::scalar::Scalar;

/// Difference statistics `D_t = Σ_j d_j X_{t − j h}` for `t = m h + 1, …, n`.
///
/// Row `0` of the output corresponds to `t = m h + 1`.
pub fn difference_series<T: Scalar>(x: &Matrix<T>, cfg: &DiffConfig) -> Result<Matrix<T>> {
    let n = x.rows();
    let span = cfg.span();
    if span >= n {
        return Err(LrcError::InsufficientLength { n, needed: span });
    }
    let weights: Vec<T> = cfg.d.weights().iter().map(|&w| T::lit(w)).collect();
    let mut out = Matrix::zeros(n - span, x.cols());
    for t in span..n {
        let row = out.row_mut(t - span);
        for (j, &w) in weights.iter().enumerate() {
            for (o, &v) in row.iter_mut().zip(x.row(t - j * cfg.h)) {
                *o += w * v;
            }
        }
    }
    Ok(out)
}

/// Difference-based sample autocovariance `Γ̂^D_k` with divisor `n`, before
/// symmetrization. Negative lags return the transpose of the positive lag.
pub fn db_autocov<T: Scalar>(diffs: &Matrix<T>, k: i64, n: usize) -> Result<Matrix<T>> {
    lagged_autocov(diffs, k, n)
}

/// The difference-based pilot `sym(Σ_{|k|<ℓ} K(k/ℓ) Γ̂^D_k)`.
pub fn db_estimate<T: Scalar>(x: &TimeSeriesPanel<T>, cfg: &DiffConfig) -> Result<CovMatrix<T>> {
    db_estimate_matrix(x.data(), cfg)
}

/// [`db_estimate`] on a bare matrix, for inputs that are not observed panels
/// (mean paths, noise paths).
pub fn db_estimate_matrix<T: Scalar>(x: &Matrix<T>, cfg: &DiffConfig) -> Result<CovMatrix<T>> {
    cfg.check_length(x.rows())?;
    let diffs = difference_series(x, cfg)?;
    db_from_diffs(&diffs, cfg, x.rows())
}

pub(crate) fn db_from_diffs<T: Scalar>(
    diffs: &Matrix<T>,
    cfg: &DiffConfig,
    n: usize,
) -> Result<CovMatrix<T>> {
    kernel_lag_sum(diffs, &kernel_weights(cfg), n)
}

fn kernel_weights<T: Scalar>(cfg: &DiffConfig) -> Vec<T> {
    let ell = T::from_usize_lossy(cfg.ell);
    (0..cfg.ell)
        .map(|k| cfg.kernel.eval_unchecked(T::from_usize_lossy(k) / ell))
        .collect()
}

/// Difference-based pilots of many contiguous segments of one series under a
/// common configuration.
///
/// Segment `[a, b)` of the series uses difference rows `a .. b − mh` of the
/// full series, and its folded rows agree with the full-series ones except
/// for the first `ℓ − 1`, where lags would reach before the segment. Interior
/// products `D_t E_tᵀ` are therefore shared through chunked prefix sums and
/// only the head rows and the partial chunks are multiplied per segment.
pub(crate) struct SegmentPilots<T> {
    cfg: DiffConfig,
    weights: Vec<T>,
    diffs: Matrix<T>,
    folded: Matrix<T>,
    chunk: usize,
    /// `prefix[c] = Σ_{r < c·chunk} D_r E_rᵀ`.
    prefix: Vec<Matrix<T>>,
}

impl<T: Scalar> SegmentPilots<T> {
    pub(crate) fn new(x: &Matrix<T>, cfg: &DiffConfig) -> Result<Self> {
        let diffs = difference_series(x, cfg)?;
        let weights = kernel_weights(cfg);
        let folded = fold_lags(&diffs, &weights);
        let rows = diffs.rows();
        let chunk = ((rows as f64).sqrt().ceil() as usize).max(1);
        let mut prefix = vec![Matrix::zeros(x.cols(), x.cols())];
        for c in 0..rows / chunk {
            let next =
                prefix[c].add(&cross_product(&diffs, c * chunk, &folded, c * chunk, chunk))?;
            prefix.push(next);
        }
        Ok(Self {
            cfg: cfg.clone(),
            weights,
            diffs,
            folded,
            chunk,
            prefix,
        })
    }

    /// Pilot of series rows `range`; equals `db_estimate` on that slice up to
    /// rounding.
    pub(crate) fn estimate(&self, range: Range<usize>) -> Result<CovMatrix<T>> {
        let len = range.len();
        self.cfg.check_length(len)?;
        let span = self.cfg.span();
        if range.end > self.diffs.rows() + span {
            return Err(LrcError::Input(format!(
                "segment {range:?} exceeds series length {}",
                self.diffs.rows() + span
            )));
        }
        let (start, end) = (range.start, range.end - span);
        let head_end = (start + self.weights.len() - 1).min(end);

        let mut head = Matrix::zeros(head_end - start, self.diffs.cols());
        for r in start..head_end {
            fold_row(
                &self.diffs,
                &self.weights,
                r,
                r - start,
                head.row_mut(r - start),
            );
        }
        let mut sum = cross_product(&self.diffs, start, &head, 0, head_end - start);
        sum = sum.add(&self.interior(head_end, end)?)?;
        CovMatrix::from_symmetrized(sum.scaled(T::one() / T::from_usize_lossy(len)))
    }

    /// `Σ_{lo ≤ r < hi} D_r E_rᵀ`.
    fn interior(&self, lo: usize, hi: usize) -> Result<Matrix<T>> {
        let cross = |a: usize, b: usize| cross_product(&self.diffs, a, &self.folded, a, b - a);
        let first_full = lo.div_ceil(self.chunk);
        let last_full = (hi / self.chunk).min(self.prefix.len() - 1);
        if first_full >= last_full {
            return Ok(cross(lo, hi.max(lo)));
        }
        let (a, b) = (first_full * self.chunk, last_full * self.chunk);
        self.prefix[last_full]
            .sub(&self.prefix[first_full])?
            .add(&cross(lo, a))?
            .add(&cross(b, hi))
    }
}
