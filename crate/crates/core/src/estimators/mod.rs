//! Long-run covariance estimators.
//!
//! Every estimator returns a [`CovMatrix`] that has been passed through
//! `(A + Aᵀ)/2`. Autocovariances use the divisor `n` at every lag, and
//! `Γ̂_{-k} = Γ̂_kᵀ`, so a kernel sum over `|k| < L` collapses to
//! `sym(w_0 Γ̂_0 + 2 Σ_{k≥1} w_k Γ̂_k)`.

mod classical;
mod db;
mod decomposition;

pub use classical::{
    demeaned_autocov, hac_estimate, mac_estimate, obm_estimate, qs_estimate, variate_difference,
    MacParams,
};
pub(crate) use db::SegmentPilots;
pub use db::{db_autocov, db_estimate, db_estimate_matrix, difference_series};
pub use decomposition::{
    mean_bias_matrix, mean_moment_stats, oracle_decomposition, MeanDecomposition, MeanMoments,
};

use crate::cov::CovMatrix;
use crate::error::{LrcError, Result};
use crate::matrix::{cross_product, Matrix};
use crate::scalar::Scalar;

/// `Γ_k = (1/n) Σ_t R_t R_{t-|k|}ᵀ` over all admissible `t`; transposed for `k < 0`.
pub(crate) fn lagged_autocov<T: Scalar>(rows: &Matrix<T>, k: i64, n: usize) -> Result<Matrix<T>> {
    let lag = k.unsigned_abs() as usize;
    if lag >= rows.rows() {
        return Err(LrcError::Lag {
            lag: k,
            limit: rows.rows(),
        });
    }
    let len = rows.rows() - lag;
    let gamma = cross_product(rows, lag, rows, 0, len).scaled(T::one() / T::from_usize_lossy(n));
    Ok(if k < 0 { gamma.transpose() } else { gamma })
}

/// `sym(Σ_{|k| ≤ L} w_{|k|} Γ_k)` with `weights[k] = w_k` for `k = 0..=L`.
///
/// Folds the lag sum into a single cross product: with
/// `E_t = w_0 R_t + 2 Σ_{k≥1} w_k R_{t-k}`, the sum equals `(1/n) sym(Σ_t R_t E_tᵀ)`.
pub(crate) fn kernel_lag_sum<T: Scalar>(
    rows: &Matrix<T>,
    weights: &[T],
    n: usize,
) -> Result<CovMatrix<T>> {
    let folded = fold_lags(rows, weights);
    let sum =
        cross_product(rows, 0, &folded, 0, rows.rows()).scaled(T::one() / T::from_usize_lossy(n));
    CovMatrix::from_symmetrized(sum)
}

/// Rows `E_t = w_0 R_t + 2 Σ_{1≤k≤min(L,t)} w_k R_{t-k}`.
pub(crate) fn fold_lags<T: Scalar>(rows: &Matrix<T>, weights: &[T]) -> Matrix<T> {
    let len = rows.rows();
    let mut folded = Matrix::zeros(len, rows.cols());
    for t in 0..len {
        fold_row(rows, weights, t, t, folded.row_mut(t));
    }
    folded
}

/// Accumulates the folded row for `t` into `out`, using lags up to `min(L, avail)`.
pub(crate) fn fold_row<T: Scalar>(
    rows: &Matrix<T>,
    weights: &[T],
    t: usize,
    avail: usize,
    out: &mut [T],
) {
    let two = T::lit(2.0);
    let max_lag = weights.len().saturating_sub(1).min(avail);
    for (k, &w) in weights.iter().enumerate().take(max_lag + 1) {
        if w == T::zero() {
            continue;
        }
        let c = if k == 0 { w } else { two * w };
        for (o, &x) in out.iter_mut().zip(rows.row(t - k)) {
            *o += c * x;
        }
    }
}
