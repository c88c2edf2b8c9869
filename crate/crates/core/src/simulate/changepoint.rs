//! CUSUM scan for a single mean break, normalized by a long-run covariance.

use crate::cov::CovMatrix;
use crate::error::{LrcError, Result};
use crate::panel::TimeSeriesPanel;
use crate::scalar::Scalar;

pub const DEFAULT_TRIM: f64 = 0.05;

/// `√(2 tr(V²) / p)`, with `tr(V²) = Σ_ij V_ij²` for symmetric `V`.
pub fn omega_hat<T: Scalar>(v: &CovMatrix<T>) -> T {
    let sq: T = v.values().as_slice().iter().map(|&x| x * x).sum();
    (T::lit(2.0) * sq / T::from_usize_lossy(v.p())).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CusumScan<T> {
    /// Number of rows before the estimated break (1-based).
    pub k_hat: usize,
    pub omega: T,
    /// `(k, S(k))` over the scanned range.
    pub path: Vec<(usize, T)>,
}

/// Scans `k` over `⌈trim·n⌉ ..= ⌊(1−trim)·n⌋` (clipped to `1..n`) and returns
/// the smallest maximizer of
/// `S(k) = (‖U(k)‖² − tr V) / (√p · ω̂(V))`, where
/// `U(k) = √(k(n−k)/n) (mean of rows 1..k − mean of rows k+1..n)`.
pub fn cusum_scan<T: Scalar>(
    x: &TimeSeriesPanel<T>,
    v: &CovMatrix<T>,
    trim: f64,
) -> Result<CusumScan<T>> {
    let (n, p) = (x.n(), x.p());
    if !(0.0..0.5).contains(&trim) {
        return Err(LrcError::Config(format!(
            "trim must lie in [0, 0.5), got {trim}"
        )));
    }
    if n < 10 {
        return Err(LrcError::InsufficientLength { n, needed: 10 });
    }
    if v.p() != p {
        return Err(LrcError::Dimension {
            expected: format!("{p}x{p}"),
            got: format!("{0}x{0}", v.p()),
        });
    }
    let lo = ((trim * n as f64).ceil() as usize).max(1);
    let hi = (((1.0 - trim) * n as f64).floor() as usize).min(n - 1);
    if lo > hi {
        return Err(LrcError::Config(format!(
            "empty scan range for n = {n}, trim = {trim}"
        )));
    }
    let omega = omega_hat(v);
    if omega.is_nan() || omega <= T::zero() {
        return Err(LrcError::numerical(
            "normalizing covariance has zero Frobenius norm",
        ));
    }
    let trace: T = v.diagonal().into_iter().sum();
    let denom = T::from_usize_lossy(p).sqrt() * omega;

    let mut total = vec![T::zero(); p];
    for row in x.data().iter_rows() {
        for (s, &r) in total.iter_mut().zip(row) {
            *s += r;
        }
    }
    let nf = T::from_usize_lossy(n);
    let mut prefix = vec![T::zero(); p];
    let mut path = Vec::with_capacity(hi - lo + 1);
    let mut best: Option<(usize, T)> = None;
    for k in 1..=hi {
        for (s, &r) in prefix.iter_mut().zip(x.data().row(k - 1)) {
            *s += r;
        }
        if k < lo {
            continue;
        }
        let kf = T::from_usize_lossy(k);
        let rest = nf - kf;
        let weight = kf * rest / nf;
        let norm_sq: T = prefix
            .iter()
            .zip(&total)
            .map(|(&a, &t)| {
                let d = a / kf - (t - a) / rest;
                d * d
            })
            .sum();
        let stat = (weight * norm_sq - trace) / denom;
        if best.is_none_or(|(_, b)| stat > b) {
            best = Some((k, stat));
        }
        path.push((k, stat));
    }
    let (k_hat, _) = best.expect("nonempty scan range");
    Ok(CusumScan { k_hat, omega, path })
}
