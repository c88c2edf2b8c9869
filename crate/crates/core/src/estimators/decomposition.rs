//! Split of the difference-based pilot into noise-only, mean-only and cross parts.

use super::db::{db_from_diffs, difference_series};
use crate::cov::CovMatrix;
use crate::diff::DiffConfig;
use crate::error::{LrcError, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// `V̂^DB = V̂^or + B_μ + R_μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanDecomposition<T> {
    /// Pilot computed from the observed series.
    pub v_db: CovMatrix<T>,
    /// Pilot computed from the noise-only series.
    pub v_oracle: CovMatrix<T>,
    /// Deterministic contribution of the differenced mean.
    pub b_mu: CovMatrix<T>,
    /// Mean–noise cross terms, `V̂^DB − V̂^or − B_μ`.
    pub r_mu: CovMatrix<T>,
}

/// Kernel-weighted autocovariance sum of the differenced mean path `M_t`.
pub fn mean_bias_matrix<T: Scalar>(mu: &Matrix<T>, cfg: &DiffConfig) -> Result<CovMatrix<T>> {
    cfg.check_length(mu.rows())?;
    let m = difference_series(mu, cfg)?;
    db_from_diffs(&m, cfg, mu.rows())
}

pub fn oracle_decomposition<T: Scalar>(
    x: &Matrix<T>,
    mu: &Matrix<T>,
    z: &Matrix<T>,
    cfg: &DiffConfig,
) -> Result<MeanDecomposition<T>> {
    let recombined = mu.add(z)?;
    if x.rows() != recombined.rows() || x.cols() != recombined.cols() {
        return Err(LrcError::Dimension {
            expected: format!("{}x{}", recombined.rows(), recombined.cols()),
            got: format!("{}x{}", x.rows(), x.cols()),
        });
    }
    let tol = T::lit(1e-10);
    for (i, (&a, &b)) in x.as_slice().iter().zip(recombined.as_slice()).enumerate() {
        if (a - b).abs() > tol * T::one().max(a.abs()) {
            return Err(LrcError::Consistency(format!(
                "X differs from mu + Z at row {}, column {}",
                i / x.cols(),
                i % x.cols()
            )));
        }
    }
    cfg.check_length(x.rows())?;
    let n = x.rows();
    let v_db = db_from_diffs(&difference_series(x, cfg)?, cfg, n)?;
    let v_oracle = db_from_diffs(&difference_series(z, cfg)?, cfg, n)?;
    let b_mu = db_from_diffs(&difference_series(mu, cfg)?, cfg, n)?;
    let r_mu =
        CovMatrix::from_symmetrized(v_db.values().sub(v_oracle.values())?.sub(b_mu.values())?)?;
    Ok(MeanDecomposition {
        v_db,
        v_oracle,
        b_mu,
        r_mu,
    })
}

/// Size of the differenced mean: `M̄_2 = n⁻¹ Σ_t ‖M_t‖²_max` and `M̄_∞ = max_t ‖M_t‖_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanMoments<T> {
    pub m2bar: T,
    pub minf: T,
}

/// `n` is the length of the original series, not the number of difference rows.
pub fn mean_moment_stats<T: Scalar>(m: &Matrix<T>, n: usize) -> Result<MeanMoments<T>> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(LrcError::Input("difference-mean matrix is empty".into()));
    }
    if n == 0 {
        return Err(LrcError::Input("series length must be positive".into()));
    }
    let mut sum_sq = T::zero();
    let mut minf = T::zero();
    for row in m.iter_rows() {
        let row_max = row.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
        sum_sq += row_max * row_max;
        minf = minf.max(row_max);
    }
    Ok(MeanMoments {
        m2bar: sum_sq / T::from_usize_lossy(n),
        minf,
    })
}
