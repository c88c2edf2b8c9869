//! Baselines that assume a constant mean: HAC, OBM and QS on demeaned data,
//! plus the variate-difference MAC estimator.

use std::collections::BTreeMap;

use super::{kernel_lag_sum, lagged_autocov};
use crate::cov::CovMatrix;
use crate::error::{LrcError, Result};
use crate::kernel::KernelSpec;
use crate::matrix::{cross_product, Matrix};
use crate::panel::TimeSeriesPanel;
use crate::scalar::Scalar;

/// `Γ̂_k = (1/n) Σ_{i>|k|} X̂_i X̂_{i−|k|}ᵀ` with `X̂_i = X_i − X̄_n`.
pub fn demeaned_autocov<T: Scalar>(x: &TimeSeriesPanel<T>, k: i64) -> Result<Matrix<T>> {
    lagged_autocov(&x.demeaned(), k, x.n())
}

/// Kernel HAC estimator `sym(Σ_{|k|<ℓ} K(k/ℓ) Γ̂_k)`.
///
/// With [`KernelSpec::Bartlett`] this is the Bartlett (Newey–West) estimator.
pub fn hac_estimate<T: Scalar>(
    x: &TimeSeriesPanel<T>,
    kernel: KernelSpec,
    ell: usize,
) -> Result<CovMatrix<T>> {
    kernel.validate()?;
    if ell == 0 || ell >= x.n() {
        return Err(LrcError::Config(format!(
            "HAC bandwidth must lie in [1, n); got {ell} with n = {}",
            x.n()
        )));
    }
    let ell_t = T::from_usize_lossy(ell);
    let weights: Vec<T> = (0..ell)
        .map(|k| kernel.eval_unchecked(T::from_usize_lossy(k) / ell_t))
        .collect();
    kernel_lag_sum(&x.demeaned(), &weights, x.n())
}

/// Quadratic spectral estimator; every lag `|k| ≤ n − 1` enters.
pub fn qs_estimate<T: Scalar>(x: &TimeSeriesPanel<T>, ell: usize) -> Result<CovMatrix<T>> {
    if ell == 0 {
        return Err(LrcError::Config("QS bandwidth must be positive".into()));
    }
    let ell_t = T::from_usize_lossy(ell);
    let weights: Vec<T> = (0..x.n())
        .map(|k| KernelSpec::QuadraticSpectral.eval_unchecked(T::from_usize_lossy(k) / ell_t))
        .collect();
    kernel_lag_sum(&x.demeaned(), &weights, x.n())
}

/// Overlapping batch means with batch size `1 < batch < n`.
pub fn obm_estimate<T: Scalar>(x: &TimeSeriesPanel<T>, batch: usize) -> Result<CovMatrix<T>> {
    let n = x.n();
    if batch <= 1 || batch >= n {
        return Err(LrcError::Config(format!(
            "OBM batch size must satisfy 1 < batch < n; got {batch} with n = {n}"
        )));
    }
    let centered = x.demeaned();
    let windows = n - batch + 1;
    let inv_batch = T::one() / T::from_usize_lossy(batch);
    let mut means = Matrix::zeros(windows, x.p());
    for w in 0..windows {
        let row = means.row_mut(w);
        for j in w..w + batch {
            for (o, &v) in row.iter_mut().zip(centered.row(j)) {
                *o += v;
            }
        }
        row.iter_mut().for_each(|o| *o *= inv_batch);
    }
    let scale = T::from_usize_lossy(batch) / T::from_usize_lossy(windows);
    CovMatrix::from_symmetrized(cross_product(&means, 0, &means, 0, windows).scaled(scale))
}

/// Variate difference `Δ̂_k = (1/(2(n−|k|+1))) Σ_{i>|k|} (X_i − X_{i−|k|})^{⊗2}`.
pub fn variate_difference<T: Scalar>(x: &TimeSeriesPanel<T>, k: usize) -> Result<Matrix<T>> {
    let n = x.n();
    if k >= n {
        return Err(LrcError::Lag {
            lag: k as i64,
            limit: n,
        });
    }
    if k == 0 {
        return Ok(Matrix::zeros(x.p(), x.p()));
    }
    let data = x.data();
    let len = n - k;
    let mut diffs = Matrix::zeros(len, x.p());
    for i in 0..len {
        let row = diffs.row_mut(i);
        for ((o, &a), &b) in row.iter_mut().zip(data.row(i + k)).zip(data.row(i)) {
            *o = a - b;
        }
    }
    let scale = T::one() / (T::lit(2.0) * T::from_usize_lossy(n - k + 1));
    Ok(cross_product(&diffs, 0, &diffs, 0, len).scaled(scale))
}

/// Tuning constants of the MAC estimator; `L_k = round(c0·ℓ + c1·|k|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacParams {
    pub ell: usize,
    pub q: f64,
    pub c0: f64,
    pub c1: f64,
}

impl MacParams {
    /// `c0 = 2`, `c1 = 1`, `q = 2`.
    pub fn with_bandwidth(ell: usize) -> Self {
        Self {
            ell,
            q: 2.0,
            c0: 2.0,
            c1: 1.0,
        }
    }

    fn far_lag(&self, k: usize, n: usize) -> usize {
        let raw = (self.c0 * self.ell as f64 + self.c1 * k as f64).round();
        (raw.max(1.0) as usize).min(n - 1)
    }
}

/// MAC estimator `sym(Σ_{|k|≤ℓ} K_q(|k|/ℓ) (Δ̂_{L_k} − Δ̂_k))`.
pub fn mac_estimate<T: Scalar>(x: &TimeSeriesPanel<T>, params: MacParams) -> Result<CovMatrix<T>> {
    let MacParams { ell, q, c0, c1 } = params;
    if ell == 0 {
        return Err(LrcError::Config("MAC bandwidth must be positive".into()));
    }
    if !(c0 > 0.0 && c1 > 0.0 && c0.is_finite() && c1.is_finite()) {
        return Err(LrcError::Config(format!(
            "MAC constants must be positive; got c0 = {c0}, c1 = {c1}"
        )));
    }
    let kernel = KernelSpec::TruncatedPolynomial { q };
    kernel.validate()?;
    let n = x.n();
    let widest = (c0 * ell as f64 + c1 * ell as f64).round();
    if widest >= n as f64 {
        return Err(LrcError::Config(format!(
            "MAC bandwidth {ell} too large: L_ell = {widest} must be below n = {n}"
        )));
    }

    let mut cache: BTreeMap<usize, Matrix<T>> = BTreeMap::new();
    let mut delta = |lag: usize| -> Result<Matrix<T>> {
        if let Some(m) = cache.get(&lag) {
            return Ok(m.clone());
        }
        let m = variate_difference(x, lag)?;
        cache.insert(lag, m.clone());
        Ok(m)
    };

    let p = x.p();
    let ell_t = T::from_usize_lossy(ell);
    let mut sum = Matrix::zeros(p, p);
    for k in 0..=ell {
        let w = kernel.eval_unchecked(T::from_usize_lossy(k) / ell_t);
        if w == T::zero() {
            continue;
        }
        // lags ±k contribute identically
        let mult = if k == 0 { w } else { T::lit(2.0) * w };
        let term = delta(params.far_lag(k, n))?.sub(&delta(k)?)?;
        sum.axpy(mult, &term)?;
    }
    CovMatrix::from_symmetrized(sum)
}
