//! Simulation models, the Monte Carlo runner and the change-point scan.

mod changepoint;
mod models;
mod monte_carlo;

pub use changepoint::{cusum_scan, omega_hat, CusumScan, DEFAULT_TRIM};
pub use models::{
    cholesky_lower, gen_series, gen_series_with_factor, make_sigma_eps, mean_function, mean_path,
    target_lrc, CrossSection, SimData, SimModel, DEFAULT_BURN_IN, DEFAULT_MEAN_COORDS, DEFAULT_PHI,
    PERMUTED_BLOCK_RHO, TOEPLITZ_RHO, TRIDIAGONAL_A,
};
pub use monte_carlo::{
    pairwise_sum, run_monte_carlo, run_replication, BaselineSettings, EstimatorId, McConfig,
    McSummary, ReplicationOutcome, SummaryRow, TableFormat, Tuning, DEFAULT_HAC_BANDWIDTH,
    SUMMARY_HEADER,
};
