//! Lag-window kernels.

use std::f64::consts::PI;

use crate::error::{LrcError, Result};
use crate::scalar::Scalar;

/// Kernel family used to weight sample autocovariances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    /// `K_q(x) = (1 − |x|^q) 1(|x| ≤ 1)`.
    TruncatedPolynomial { q: f64 },
    /// `(1 − |x|) 1(|x| ≤ 1)`.
    Bartlett,
    /// Andrews' quadratic spectral kernel; unbounded support.
    QuadraticSpectral,
}

/// Below this value of `6πx/5` the quadratic spectral kernel switches to its
/// Taylor expansion, where the closed form loses all precision to cancellation.
const QS_SERIES_CUTOFF: f64 = 1e-3;

impl KernelSpec {
    /// The truncated polynomial kernel with `q = 2` used throughout the defaults.
    pub const fn quadratic() -> Self {
        KernelSpec::TruncatedPolynomial { q: 2.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::TruncatedPolynomial { q } if !(q.is_finite() && q > 0.0) => Err(
                LrcError::Config(format!("kernel exponent q must be positive, got {q}")),
            ),
            _ => Ok(()),
        }
    }

    /// Whether `K(x) = 0` for every `|x| ≥ 1`.
    pub fn has_compact_support(&self) -> bool {
        !matches!(self, KernelSpec::QuadraticSpectral)
    }

    pub fn eval<T: Scalar>(&self, x: T) -> Result<T> {
        if !x.is_finite() {
            return Err(LrcError::Input(format!(
                "kernel argument must be finite, got {x}"
            )));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked<T: Scalar>(&self, x: T) -> T {
        let a = x.abs();
        match *self {
            KernelSpec::TruncatedPolynomial { q } => {
                if a <= T::one() {
                    T::one() - a.powf(T::lit(q))
                } else {
                    T::zero()
                }
            }
            KernelSpec::Bartlett => {
                if a <= T::one() {
                    T::one() - a
                } else {
                    T::zero()
                }
            }
            KernelSpec::QuadraticSpectral => {
                let z = T::lit(6.0 * PI / 5.0) * a;
                if z < T::lit(QS_SERIES_CUTOFF) {
                    // 3/z² (sin z / z − cos z) = 1 − z²/10 + z⁴/280 − …
                    let z2 = z * z;
                    T::one() - z2 / T::lit(10.0) + z2 * z2 / T::lit(280.0)
                } else {
                    let pre = T::lit(25.0 / (12.0 * PI * PI)) / (a * a);
                    pre * (z.sin() / z - z.cos())
                }
            }
        }
    }
}

/// Convenience wrapper around [`KernelSpec::eval`].
pub fn kernel_eval<T: Scalar>(spec: KernelSpec, x: T) -> Result<T> {
    spec.eval(x)
}
