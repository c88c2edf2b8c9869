//! Difference sequences, difference-based configurations and bandwidth rules.

use crate::error::{LrcError, Result};
use crate::kernel::KernelSpec;

/// Four-term sequence (order 3) used by the default configuration.
pub const DEFAULT_DIFF_SEQUENCE: [f64; 4] = [0.1942, 0.2809, 0.3832, -0.8582];

/// Accepted deviation of `Σ d_j` from 0 and of `Σ d_j²` from 1.
///
/// Published sequences are rounded to four decimals; rounding each of `m + 1`
/// weights by at most `5e-5` moves both sums by a few `1e-4`.
pub const DIFF_SEQUENCE_TOL: f64 = 1e-3;

/// A difference sequence `d_0, …, d_m` with `Σ d = 0` and `Σ d² = 1`.
///
/// Sequences accepted by [`validate_diff_sequence`] are centered and rescaled
/// so both constraints hold to machine precision.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffSequence(Vec<f64>);

impl DiffSequence {
    pub fn new(d: Vec<f64>) -> Result<Self> {
        validate_diff_sequence(&d)?;
        if d.len() < 2 {
            return Err(LrcError::Config(
                "difference sequence needs at least two weights".into(),
            ));
        }
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        let centered: Vec<f64> = d.iter().map(|v| v - mean).collect();
        let norm = centered.iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok(Self(centered.into_iter().map(|v| v / norm).collect()))
    }

    /// Order `m` (one less than the number of weights).
    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }
}

impl Default for DiffSequence {
    fn default() -> Self {
        Self::new(DEFAULT_DIFF_SEQUENCE.to_vec()).expect("published sequence is valid")
    }
}

/// Checks the two normalization constraints on a difference sequence.
pub fn validate_diff_sequence(d: &[f64]) -> Result<()> {
    if d.is_empty() {
        return Err(LrcError::Config(
            "difference sequence must be nonempty".into(),
        ));
    }
    if d.iter().any(|v| !v.is_finite()) {
        return Err(LrcError::Config(
            "difference sequence has non-finite weights".into(),
        ));
    }
    let sum: f64 = d.iter().sum();
    if sum.abs() > DIFF_SEQUENCE_TOL {
        return Err(LrcError::Normalization {
            constraint: "sum-to-zero",
            value: sum,
            tol: DIFF_SEQUENCE_TOL,
        });
    }
    let sum_sq: f64 = d.iter().map(|v| v * v).sum();
    if (sum_sq - 1.0).abs() > DIFF_SEQUENCE_TOL {
        return Err(LrcError::Normalization {
            constraint: "unit sum of squares",
            value: sum_sq,
            tol: DIFF_SEQUENCE_TOL,
        });
    }
    Ok(())
}

/// Balanced bandwidth `max(1, min(⌊(n / ln p)^{1/4}⌋, ⌊(n − 10)/28⌋))`.
///
/// For `p = 1` the first term is unbounded and the rule reduces to the second.
pub fn default_bandwidth(n: usize, p: usize) -> Result<usize> {
    if p == 0 {
        return Err(LrcError::Config("dimension p must be positive".into()));
    }
    let length_cap = n.saturating_sub(10) / 28;
    if length_cap == 0 {
        return Err(LrcError::Config(format!(
            "series length n = {n} too short for the default bandwidth rule (need n ≥ 38)"
        )));
    }
    let log_p = (p as f64).ln();
    let rate = if log_p > 0.0 {
        (n as f64 / log_p).powf(0.25).floor() as usize
    } else {
        usize::MAX
    };
    Ok(rate.min(length_cap).max(1))
}

/// Fully resolved difference-based estimator settings for one series length.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffConfig {
    pub d: DiffSequence,
    /// Lag spacing between differenced observations.
    pub h: usize,
    /// Kernel bandwidth; lags `|k| < ell` enter the estimate.
    pub ell: usize,
    pub kernel: KernelSpec,
}

impl DiffConfig {
    pub fn new(d: DiffSequence, h: usize, ell: usize, kernel: KernelSpec) -> Result<Self> {
        if h == 0 {
            return Err(LrcError::Config("lag spacing h must be positive".into()));
        }
        if ell == 0 {
            return Err(LrcError::Config("bandwidth ell must be positive".into()));
        }
        kernel.validate()?;
        Ok(Self { d, h, ell, kernel })
    }

    /// Default configuration: four-term sequence, `ℓ` from [`default_bandwidth`],
    /// `h = 2ℓ`, quadratic truncated kernel.
    pub fn balanced(n: usize, p: usize) -> Result<Self> {
        DiffRecipe::default().resolve(n, p)
    }

    pub fn order(&self) -> usize {
        self.d.order()
    }

    /// Number of leading observations consumed by differencing, `m·h`.
    pub fn span(&self) -> usize {
        self.order() * self.h
    }

    /// Ensures `m·h + ℓ < n`.
    pub fn check_length(&self, n: usize) -> Result<()> {
        let needed = self.span() + self.ell;
        if needed >= n {
            return Err(LrcError::InsufficientLength { n, needed });
        }
        Ok(())
    }
}

/// How `(ℓ, h)` are obtained for a given series length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandwidthRule {
    /// `ℓ = default_bandwidth(n, p)`, `h = 2ℓ`.
    Balanced,
    Fixed {
        ell: usize,
        h: usize,
    },
}

/// A difference-based configuration whose bandwidth may depend on the length
/// of the segment it is applied to (cross-validation blocks are shorter than
/// the full sample).
#[derive(Debug, Clone, PartialEq)]
pub struct DiffRecipe {
    pub d: DiffSequence,
    pub kernel: KernelSpec,
    pub bandwidth: BandwidthRule,
}

impl Default for DiffRecipe {
    fn default() -> Self {
        Self {
            d: DiffSequence::default(),
            kernel: KernelSpec::quadratic(),
            bandwidth: BandwidthRule::Balanced,
        }
    }
}

impl DiffRecipe {
    pub fn resolve(&self, n: usize, p: usize) -> Result<DiffConfig> {
        let (ell, h) = match self.bandwidth {
            BandwidthRule::Balanced => {
                let ell = default_bandwidth(n, p)?;
                (ell, 2 * ell)
            }
            BandwidthRule::Fixed { ell, h } => (ell, h),
        };
        let cfg = DiffConfig::new(self.d.clone(), h, ell, self.kernel)?;
        cfg.check_length(n)?;
        Ok(cfg)
    }
}

impl From<DiffConfig> for DiffRecipe {
    fn from(cfg: DiffConfig) -> Self {
        Self {
            d: cfg.d,
            kernel: cfg.kernel,
            bandwidth: BandwidthRule::Fixed {
                ell: cfg.ell,
                h: cfg.h,
            },
        }
    }
}
