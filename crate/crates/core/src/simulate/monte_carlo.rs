//! Monte Carlo comparison of estimators against the analytic target.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use crate::cov::CovMatrix;
use crate::diff::{default_bandwidth, DiffRecipe};
use crate::error::{LrcError, Result};
use crate::estimators::{
    db_estimate, hac_estimate, mac_estimate, obm_estimate, qs_estimate, MacParams,
};
use crate::kernel::KernelSpec;
use crate::metrics::{error_report_with_norms, ErrorReport, MatrixNorms};
use crate::regularize::{hard_threshold, soft_threshold, taper};
use crate::tuning::{CvPilots, CvPlan, ThresholdMethod};

use super::models::{cholesky_lower, gen_series_with_factor, make_sigma_eps, target_lrc, SimModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorId {
    Hac,
    Mac,
    Obm,
    Qs,
    Db,
    Hard,
    Soft,
    Taper,
}

impl EstimatorId {
    pub const ALL: [EstimatorId; 8] = [
        EstimatorId::Hac,
        EstimatorId::Mac,
        EstimatorId::Obm,
        EstimatorId::Qs,
        EstimatorId::Db,
        EstimatorId::Hard,
        EstimatorId::Soft,
        EstimatorId::Taper,
    ];

    /// Label used in result tables.
    pub fn label(self) -> &'static str {
        match self {
            EstimatorId::Hac => "HAC",
            EstimatorId::Mac => "MAC",
            EstimatorId::Obm => "OBM",
            EstimatorId::Qs => "QS",
            EstimatorId::Db => "DB",
            EstimatorId::Hard => "Hard",
            EstimatorId::Soft => "Soft",
            EstimatorId::Taper => "Taper",
        }
    }

    pub fn is_regularized(self) -> bool {
        matches!(
            self,
            EstimatorId::Hard | EstimatorId::Soft | EstimatorId::Taper
        )
    }
}

impl fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for EstimatorId {
    type Err = LrcError;

    fn from_str(s: &str) -> Result<Self> {
        EstimatorId::ALL
            .into_iter()
            .find(|e| e.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| LrcError::Config(format!("unknown estimator '{s}'")))
    }
}

/// How the regularized estimators obtain `τ` and `k`.
#[derive(Debug, Clone, PartialEq)]
pub enum Tuning {
    /// Blockwise CV in every replication. The plan seed is combined with the
    /// replication seed.
    Cv(CvPlan),
    Fixed {
        tau: f64,
        k: usize,
    },
}

/// Fixed HAC bandwidth of the simulation study. The HAC error there is
/// dominated by the uncorrected mean, whose contribution grows linearly in the
/// bandwidth; this value reproduces the published HAC rows.
pub const DEFAULT_HAC_BANDWIDTH: usize = 18;

/// Bandwidths of the classical baselines; `None` picks the default for `(n, p)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BaselineSettings {
    /// HAC bandwidth; defaults to [`DEFAULT_HAC_BANDWIDTH`] (at most `n − 1`).
    pub hac_ell: Option<usize>,
    pub hac_kernel: Option<KernelSpec>,
    /// MAC bandwidth; defaults to the difference-based default bandwidth.
    pub mac_ell: Option<usize>,
    pub mac_c0: Option<f64>,
    pub mac_c1: Option<f64>,
    /// OBM batch size; defaults to `max(2, ⌊n^{1/3}⌋)`.
    pub obm_batch: Option<usize>,
    /// QS bandwidth; defaults to the difference-based default bandwidth.
    pub qs_ell: Option<usize>,
}

impl BaselineSettings {
    pub fn hac_bandwidth(&self, n: usize) -> usize {
        self.hac_ell
            .unwrap_or(DEFAULT_HAC_BANDWIDTH.min(n.saturating_sub(1)).max(1))
    }

    pub fn obm_batch_size(&self, n: usize) -> usize {
        self.obm_batch
            .unwrap_or_else(|| ((n as f64).cbrt().floor() as usize).max(2))
    }

    pub fn mac_params(&self, n: usize, p: usize) -> Result<MacParams> {
        let ell = match self.mac_ell {
            Some(l) => l,
            None => default_bandwidth(n, p)?,
        };
        let mut params = MacParams::with_bandwidth(ell);
        if let Some(c0) = self.mac_c0 {
            params.c0 = c0;
        }
        if let Some(c1) = self.mac_c1 {
            params.c1 = c1;
        }
        Ok(params)
    }

    pub fn qs_bandwidth(&self, n: usize, p: usize) -> Result<usize> {
        match self.qs_ell {
            Some(l) => Ok(l),
            None => default_bandwidth(n, p),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    /// Data-generating process; its `seed` is replaced by `base_seed + r`.
    pub model: SimModel,
    pub replications: usize,
    /// Requested estimators, in output order.
    pub estimators: Vec<EstimatorId>,
    pub recipe: DiffRecipe,
    pub tuning: Tuning,
    pub base_seed: u64,
    pub baselines: BaselineSettings,
}

impl McConfig {
    /// CV tuning with default plan and baseline settings.
    pub fn new(
        model: SimModel,
        replications: usize,
        estimators: Vec<EstimatorId>,
        base_seed: u64,
    ) -> Self {
        Self {
            model,
            replications,
            estimators,
            recipe: DiffRecipe::default(),
            tuning: Tuning::Cv(CvPlan::default()),
            base_seed,
            baselines: BaselineSettings::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(LrcError::Config("replications must be at least 1".into()));
        }
        if self.estimators.is_empty() {
            return Err(LrcError::Config("no estimators requested".into()));
        }
        for (i, e) in self.estimators.iter().enumerate() {
            if self.estimators[..i].contains(e) {
                return Err(LrcError::Config(format!("estimator {e} requested twice")));
            }
        }
        match &self.tuning {
            Tuning::Cv(plan) => plan.validate()?,
            Tuning::Fixed { tau, k } => {
                if !(tau.is_finite() && *tau >= 0.0) || *k == 0 {
                    return Err(LrcError::Config(format!(
                        "fixed tuning needs tau ≥ 0 and k ≥ 1; got tau = {tau}, k = {k}"
                    )));
                }
            }
        }
        self.model.validate()
    }

    pub fn replication_seed(&self, r: usize) -> u64 {
        self.base_seed.wrapping_add(r as u64)
    }
}

/// Results of one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationOutcome {
    pub seed: u64,
    /// One report per requested estimator, in request order.
    pub reports: Vec<ErrorReport>,
    pub hard_tau: Option<f64>,
    pub soft_tau: Option<f64>,
    pub taper_k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub estimator: EstimatorId,
    pub mean: ErrorReport,
    pub std_err: ErrorReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McSummary {
    pub rows: Vec<SummaryRow>,
    /// Successful replications, in replication order.
    pub outcomes: Vec<ReplicationOutcome>,
    /// `(replication index, error message)` of failed replications.
    pub failures: Vec<(usize, String)>,
}

pub const SUMMARY_HEADER: &str = "estimator,frob,l1,max,spec,rel_frob,rel_l1,rel_max,rel_spec";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

impl McSummary {
    pub fn row(&self, id: EstimatorId) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.estimator == id)
    }

    /// Means at full precision, one line per estimator under [`SUMMARY_HEADER`].
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SUMMARY_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(row.estimator.label());
            for v in row.mean.to_array() {
                write!(out, ",{v}").expect("write to String");
            }
            out.push('\n');
        }
        out
    }

    /// Means rounded to `decimals` places.
    pub fn to_table(&self, format: TableFormat, decimals: usize) -> String {
        let mut out = String::new();
        match format {
            TableFormat::Csv => {
                out.push_str(SUMMARY_HEADER);
                out.push('\n');
            }
            TableFormat::Markdown => {
                out.push_str("| estimator |");
                for name in ErrorReport::FIELD_NAMES {
                    write!(out, " {name} |").expect("write to String");
                }
                out.push_str("\n|---|");
                out.push_str(&"---:|".repeat(ErrorReport::FIELD_NAMES.len()));
                out.push('\n');
            }
        }
        for row in &self.rows {
            let cells: Vec<String> = row
                .mean
                .to_array()
                .iter()
                .map(|v| format!("{v:.decimals$}"))
                .collect();
            match format {
                TableFormat::Csv => {
                    writeln!(out, "{},{}", row.estimator, cells.join(",")).expect("write to String")
                }
                TableFormat::Markdown => {
                    writeln!(out, "| {} | {} |", row.estimator, cells.join(" | "))
                        .expect("write to String")
                }
            }
        }
        out
    }
}

/// Mixes the CV plan seed with the replication seed so that block draws do
/// not reuse the stream that generated the data.
fn cv_seed(plan_seed: u64, rep_seed: u64) -> u64 {
    let mut z = plan_seed ^ rep_seed.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs a single replication of `cfg`.
pub fn run_replication(cfg: &McConfig, r: usize) -> Result<ReplicationOutcome> {
    let seed = cfg.replication_seed(r);
    let model = cfg.model.with_seed(seed);
    let sigma: CovMatrix<f64> = make_sigma_eps(&model)?;
    let factor = cholesky_lower(sigma.values())?;
    let data = gen_series_with_factor(&model, &factor)?;
    let target = target_lrc(&sigma, model.phi)?;
    let target_norms = MatrixNorms::of(target.values())?;
    let x = &data.x;
    let (n, p) = (x.n(), x.p());

    let needs_pilot = cfg
        .estimators
        .iter()
        .any(|e| *e == EstimatorId::Db || e.is_regularized());
    let pilot = if needs_pilot {
        Some(db_estimate(x, &cfg.recipe.resolve(n, p)?)?)
    } else {
        None
    };
    let pilots = match (
        &cfg.tuning,
        cfg.estimators.iter().any(|e| e.is_regularized()),
    ) {
        (Tuning::Cv(plan), true) => {
            let plan = CvPlan {
                seed: cv_seed(plan.seed, seed),
                ..plan.clone()
            };
            let full = pilot
                .clone()
                .expect("pilot computed for regularized estimators");
            Some(CvPilots::with_full_pilot(x, &cfg.recipe, &plan, full)?)
        }
        _ => None,
    };
    let tau_for = |method: ThresholdMethod| -> f64 {
        match (&cfg.tuning, &pilots) {
            (Tuning::Fixed { tau, .. }, _) => *tau,
            (_, Some(cv)) => cv.select_threshold(method).selected,
            _ => unreachable!("CV pilots exist whenever tuning is by CV"),
        }
    };

    let mut outcome = ReplicationOutcome {
        seed,
        reports: Vec::with_capacity(cfg.estimators.len()),
        hard_tau: None,
        soft_tau: None,
        taper_k: None,
    };
    for &id in &cfg.estimators {
        let pilot = || pilot.as_ref().expect("pilot computed");
        let est = match id {
            EstimatorId::Hac => {
                let kernel = cfg
                    .baselines
                    .hac_kernel
                    .unwrap_or_else(KernelSpec::quadratic);
                hac_estimate(x, kernel, cfg.baselines.hac_bandwidth(n))?
            }
            EstimatorId::Mac => mac_estimate(x, cfg.baselines.mac_params(n, p)?)?,
            EstimatorId::Obm => obm_estimate(x, cfg.baselines.obm_batch_size(n))?,
            EstimatorId::Qs => qs_estimate(x, cfg.baselines.qs_bandwidth(n, p)?)?,
            EstimatorId::Db => pilot().clone(),
            EstimatorId::Hard => {
                let tau = tau_for(ThresholdMethod::Hard);
                outcome.hard_tau = Some(tau);
                hard_threshold(pilot(), tau)?
            }
            EstimatorId::Soft => {
                let tau = tau_for(ThresholdMethod::Soft);
                outcome.soft_tau = Some(tau);
                soft_threshold(pilot(), tau)?
            }
            EstimatorId::Taper => {
                let k = match (&cfg.tuning, &pilots) {
                    (Tuning::Fixed { k, .. }, _) => *k,
                    (_, Some(cv)) => cv.select_taper().selected,
                    _ => unreachable!("CV pilots exist whenever tuning is by CV"),
                };
                outcome.taper_k = Some(k);
                taper(pilot(), k)?
            }
        };
        outcome
            .reports
            .push(error_report_with_norms(&est, &target, &target_norms)?);
    }
    Ok(outcome)
}

/// Runs all replications (in parallel) and averages the error reports.
///
/// A failing replication is recorded in [`McSummary::failures`] and left out
/// of the averages. If every replication fails the first error is returned.
pub fn run_monte_carlo(cfg: &McConfig) -> Result<McSummary> {
    cfg.validate()?;
    let results: Vec<Result<ReplicationOutcome>> = (0..cfg.replications)
        .into_par_iter()
        .map(|r| run_replication(cfg, r))
        .collect();

    let mut outcomes = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    let mut first_error = None;
    for (r, res) in results.into_iter().enumerate() {
        match res {
            Ok(o) => outcomes.push(o),
            Err(e) => {
                log::warn!("replication {r} failed: {e}");
                failures.push((r, e.to_string()));
                first_error.get_or_insert(e);
            }
        }
    }
    if outcomes.is_empty() {
        return Err(first_error.expect("at least one replication ran"));
    }
    if !failures.is_empty() {
        log::warn!(
            "{} of {} replications failed",
            failures.len(),
            cfg.replications
        );
    }

    let rows = cfg
        .estimators
        .iter()
        .enumerate()
        .map(|(e, &estimator)| {
            let mut mean = [0.0; 8];
            let mut std_err = [0.0; 8];
            for f in 0..8 {
                let values: Vec<f64> = outcomes
                    .iter()
                    .map(|o| o.reports[e].to_array()[f])
                    .collect();
                let (m, se) = mean_and_std_err(&values);
                mean[f] = m;
                std_err[f] = se;
            }
            SummaryRow {
                estimator,
                mean: ErrorReport::from_array(mean),
                std_err: ErrorReport::from_array(std_err),
            }
        })
        .collect();
    Ok(McSummary {
        rows,
        outcomes,
        failures,
    })
}

/// Sum with a fixed binary tree, independent of thread scheduling.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        len => {
            let (a, b) = values.split_at(len / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Sample mean and standard error `s/√R`; the standard error is 0 for one value.
fn mean_and_std_err(values: &[f64]) -> (f64, f64) {
    let r = values.len() as f64;
    let mean = pairwise_sum(values) / r;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (r - 1.0);
    (mean, (var / r).sqrt())
}
