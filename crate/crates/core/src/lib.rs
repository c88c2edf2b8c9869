//! High-dimensional long-run covariance estimation for series with a
//! nonconstant mean.
//!
//! The central estimator differences the series at a lag `h` before forming
//! kernel-weighted autocovariances, which removes smooth and piecewise-constant
//! mean components without estimating them. The resulting pilot can be
//! thresholded or tapered, with tuning parameters chosen by blockwise
//! cross-validation. Classical baselines, a simulation harness and a CUSUM
//! change-point scan are included.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! at the crate root fix the precision to `f64`.
//!
//! ```
//! use lrcov::{db_estimate, gen_series, CrossSection, DiffConfig, SimModel};
//!
//! let model = SimModel::new(CrossSection::model_one(), 200, 10, 7);
//! let data = gen_series::<f64>(&model).unwrap();
//! let cfg = DiffConfig::balanced(200, 10).unwrap();
//! let v = db_estimate(&data.x, &cfg).unwrap();
//! assert_eq!(v.p(), 10);
//! ```

pub mod cov;
pub mod diff;
pub mod error;
pub mod estimators;
pub mod kernel;
pub mod matrix;
pub mod metrics;
pub mod panel;
pub mod regularize;
pub mod scalar;
pub mod simulate;
pub mod tuning;

pub use cov::CovMatrix;
pub use diff::{
    default_bandwidth, validate_diff_sequence, BandwidthRule, DiffConfig, DiffRecipe, DiffSequence,
    DEFAULT_DIFF_SEQUENCE,
};
pub use error::{ErrorClass, LrcError, Result};
pub use estimators::{
    db_autocov, db_estimate, db_estimate_matrix, demeaned_autocov, difference_series, hac_estimate,
    mac_estimate, mean_bias_matrix, mean_moment_stats, obm_estimate, oracle_decomposition,
    qs_estimate, variate_difference, MacParams, MeanDecomposition, MeanMoments,
};
pub use kernel::{kernel_eval, KernelSpec};
pub use matrix::Matrix;
pub use metrics::{
    error_report, error_report_with_norms, frobenius_norm, induced_l1_norm, max_norm,
    spectral_norm, symmetric_eigenvalues, ErrorReport, MatrixNorms,
};
pub use panel::TimeSeriesPanel;
pub use regularize::{hard_threshold, soft_threshold, taper, taper_weight, TaperWeights};
pub use scalar::Scalar;
pub use simulate::{
    cusum_scan, gen_series, make_sigma_eps, mean_path, omega_hat, run_monte_carlo, target_lrc,
    CrossSection, CusumScan, EstimatorId, McConfig, McSummary, SimData, SimModel, Tuning,
};
pub use tuning::{
    cv_select_taper, cv_select_threshold, CvPilots, CvPlan, CvSelection, ThresholdMethod,
};

pub type Panel = TimeSeriesPanel<f64>;
pub type Cov = CovMatrix<f64>;
pub type Mat = Matrix<f64>;
pub type Panel32 = TimeSeriesPanel<f32>;
pub type Cov32 = CovMatrix<f32>;
pub type Mat32 = Matrix<f32>;
