//! Hard thresholding, soft thresholding and tapering of a pilot estimate.
//!
//! All three act on off-diagonal entries only; the diagonal of the pilot is
//! passed through untouched.

use crate::cov::CovMatrix;
use crate::error::{LrcError, Result};
use crate::scalar::Scalar;

fn check_tau<T: Scalar>(tau: T) -> Result<()> {
    if !tau.is_finite() || tau < T::zero() {
        return Err(LrcError::Config(format!(
            "threshold must be finite and nonnegative, got {tau}"
        )));
    }
    Ok(())
}

fn warn_nonpositive_diagonal<T: Scalar>(v: &CovMatrix<T>) {
    if let Some(i) = v.diagonal().iter().position(|&d| d <= T::zero()) {
        log::warn!("pilot estimate has nonpositive diagonal entry at index {i}; passing through");
    }
}

/// Keeps off-diagonal entries with `|v| ≥ tau`, zeroes the rest.
pub fn hard_threshold<T: Scalar>(v: &CovMatrix<T>, tau: T) -> Result<CovMatrix<T>> {
    check_tau(tau)?;
    warn_nonpositive_diagonal(v);
    Ok(v.map_upper(|i, j, x| {
        if i == j || x.abs() >= tau {
            x
        } else {
            T::zero()
        }
    }))
}

/// Shrinks off-diagonal entries: `sign(v) (|v| − tau)_+`.
pub fn soft_threshold<T: Scalar>(v: &CovMatrix<T>, tau: T) -> Result<CovMatrix<T>> {
    check_tau(tau)?;
    warn_nonpositive_diagonal(v);
    Ok(v.map_upper(|i, j, x| if i == j { x } else { soft(x, tau) }))
}

#[inline]
pub(crate) fn soft<T: Scalar>(x: T, tau: T) -> T {
    let mag = x.abs() - tau;
    if mag > T::zero() {
        mag.copysign(x)
    } else {
        T::zero()
    }
}

/// Piecewise-linear taper: 1 within `k/2` of the diagonal, 0 from `k` on,
/// linear `2 − 2|i−j|/k` between.
pub fn taper_weight<T: Scalar>(i: usize, j: usize, k: usize) -> T {
    let dist = i.abs_diff(j);
    if dist >= k {
        return T::zero();
    }
    // |i−j| ≤ k/2 without rounding k/2
    if 2 * dist <= k {
        return T::one();
    }
    T::lit(2.0) - T::lit(2.0) * T::from_usize_lossy(dist) / T::from_usize_lossy(k)
}

/// Implicit tapering weight matrix `W^{(k)}` of size `p × p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaperWeights {
    pub p: usize,
    pub k: usize,
}

impl TaperWeights {
    pub fn new(p: usize, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(LrcError::Config(
                "taper bandwidth k must be positive".into(),
            ));
        }
        Ok(Self { p, k })
    }

    pub fn weight<T: Scalar>(&self, i: usize, j: usize) -> T {
        taper_weight(i, j, self.k)
    }

    /// Nonzero weights in row `i`.
    pub fn row_nnz(&self, i: usize) -> usize {
        let lo = i.saturating_sub(self.k - 1);
        let hi = (i + self.k - 1).min(self.p.saturating_sub(1));
        hi + 1 - lo
    }
}

/// Hadamard product `W^{(k)} ∘ V`.
pub fn taper<T: Scalar>(v: &CovMatrix<T>, k: usize) -> Result<CovMatrix<T>> {
    let w = TaperWeights::new(v.p(), k)?;
    Ok(v.map_upper(|i, j, x| {
        let wij: T = w.weight(i, j);
        if wij == T::zero() {
            T::zero()
        } else {
            wij * x
        }
    }))
}
