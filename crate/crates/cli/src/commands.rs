//! The four subcommands.

use std::path::{Path, PathBuf};

use log::{info, warn};
use lrcov::simulate::{BaselineSettings, TableFormat, DEFAULT_TRIM};
use lrcov::tuning::CvPilots;
use lrcov::{
    cusum_scan, db_estimate, hac_estimate, mac_estimate, obm_estimate, omega_hat, qs_estimate,
    run_monte_carlo, taper, BandwidthRule, CovMatrix, CrossSection, CvPlan, DiffRecipe,
    EstimatorId, KernelSpec, LrcError, McConfig, Result, SimModel, ThresholdMethod,
    TimeSeriesPanel, Tuning,
};

use crate::args::{Command, RunConfig};
use crate::io;

pub const DEFAULT_SIM_ESTIMATORS: [EstimatorId; 5] = [
    EstimatorId::Hac,
    EstimatorId::Db,
    EstimatorId::Hard,
    EstimatorId::Soft,
    EstimatorId::Taper,
];

pub fn run(command: Command, cfg: &RunConfig) -> Result<()> {
    match command {
        Command::Estimate => cmd_estimate(cfg),
        Command::Tune => cmd_tune(cfg),
        Command::Simulate => cmd_simulate(cfg),
        Command::Changepoint => cmd_changepoint(cfg),
    }
}

fn required<'a>(value: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    value
        .as_deref()
        .ok_or_else(|| LrcError::Config(format!("--{flag} is required")))
}

fn parse_kernel(name: &str, q: Option<f64>) -> Result<KernelSpec> {
    let spec = match name.to_ascii_lowercase().as_str() {
        "poly" | "polynomial" => KernelSpec::TruncatedPolynomial {
            q: q.unwrap_or(2.0),
        },
        "bartlett" => KernelSpec::Bartlett,
        "qs" => KernelSpec::QuadraticSpectral,
        other => return Err(LrcError::Config(format!("unknown kernel '{other}'"))),
    };
    spec.validate()?;
    Ok(spec)
}

fn kernel(cfg: &RunConfig) -> Result<KernelSpec> {
    match &cfg.kernel {
        Some(name) => parse_kernel(name, cfg.q),
        None => parse_kernel("poly", cfg.q),
    }
}

fn parse_model(name: &str, rho: Option<f64>) -> Result<CrossSection> {
    Ok(match name.to_ascii_lowercase().as_str() {
        "tri" | "tridiagonal" => CrossSection::Tridiagonal {
            a: rho.unwrap_or(lrcov::simulate::TRIDIAGONAL_A),
        },
        "toeplitz" => CrossSection::Toeplitz {
            rho: rho.unwrap_or(lrcov::simulate::TOEPLITZ_RHO),
        },
        "permblock" => CrossSection::PermutedBlock {
            rho: rho.unwrap_or(lrcov::simulate::PERMUTED_BLOCK_RHO),
        },
        other => return Err(LrcError::Config(format!("unknown model '{other}'"))),
    })
}

fn parse_format(name: Option<&str>) -> Result<TableFormat> {
    match name.map(str::to_ascii_lowercase).as_deref() {
        None | Some("markdown") | Some("md") => Ok(TableFormat::Markdown),
        Some("csv") => Ok(TableFormat::Csv),
        Some(other) => Err(LrcError::Config(format!("unknown format '{other}'"))),
    }
}

/// Difference-based settings: `--bandwidth`/`--lag-h` fix `(ℓ, h)`, otherwise
/// both follow the length of the (sub)sample.
fn recipe(cfg: &RunConfig, n: usize, p: usize) -> Result<DiffRecipe> {
    let bandwidth = match (cfg.bandwidth, cfg.lag_h) {
        (None, None) => BandwidthRule::Balanced,
        (ell, h) => {
            let ell = match ell {
                Some(ell) => ell,
                None => lrcov::default_bandwidth(n, p)?,
            };
            BandwidthRule::Fixed {
                ell,
                h: h.unwrap_or(2 * ell),
            }
        }
    };
    Ok(DiffRecipe {
        kernel: kernel(cfg)?,
        bandwidth,
        ..DiffRecipe::default()
    })
}

fn cv_plan(cfg: &RunConfig) -> Result<CvPlan> {
    let mut plan = CvPlan::with_seed(cfg.seed.unwrap_or(0));
    if let Some(r) = cfg.cv_reps {
        plan.repetitions = r;
    }
    if let Some(f) = cfg.train_frac {
        plan.train_frac = f;
    }
    if let Some(f) = cfg.valid_frac {
        plan.valid_frac = f;
    }
    plan.validate()?;
    Ok(plan)
}

fn baselines(cfg: &RunConfig, estimator_bandwidth: Option<usize>) -> Result<BaselineSettings> {
    Ok(BaselineSettings {
        hac_ell: cfg.hac_bandwidth.or(estimator_bandwidth),
        hac_kernel: Some(kernel(cfg)?),
        mac_ell: estimator_bandwidth,
        mac_c0: cfg.c0,
        mac_c1: cfg.c1,
        obm_batch: cfg.batch,
        qs_ell: estimator_bandwidth,
    })
}

fn estimator(cfg: &RunConfig, default: EstimatorId) -> Result<EstimatorId> {
    cfg.estimator.as_deref().map_or(Ok(default), str::parse)
}

/// Regularizes `pilot` with `id`, choosing `τ` or `k` by CV unless fixed.
fn regularize(
    cfg: &RunConfig,
    x: &TimeSeriesPanel<f64>,
    recipe: &DiffRecipe,
    pilot: CovMatrix<f64>,
    id: EstimatorId,
) -> Result<CovMatrix<f64>> {
    let cv = || -> Result<CvPilots<f64>> {
        CvPilots::with_full_pilot(x, recipe, &cv_plan(cfg)?, pilot.clone())
    };
    let method = match id {
        EstimatorId::Hard => ThresholdMethod::Hard,
        EstimatorId::Soft => ThresholdMethod::Soft,
        EstimatorId::Taper => {
            let k = match cfg.k {
                Some(k) if !cfg.tune => k,
                _ => cv()?.select_taper().selected,
            };
            info!("taper bandwidth k = {k}");
            return taper(&pilot, k);
        }
        other => {
            return Err(LrcError::Config(format!(
                "{other} is not a regularized estimator (use hard, soft or taper)"
            )))
        }
    };
    let tau = match cfg.tau {
        Some(tau) if !cfg.tune => tau,
        _ => cv()?.select_threshold(method).selected,
    };
    info!("{id} threshold tau = {tau}");
    method.apply(&pilot, tau)
}

/// Difference-based pilot, logging its bandwidth.
fn pilot(x: &TimeSeriesPanel<f64>, recipe: &DiffRecipe) -> Result<CovMatrix<f64>> {
    let dc = recipe.resolve(x.n(), x.p())?;
    info!("difference-based pilot: ell = {}, h = {}", dc.ell, dc.h);
    db_estimate(x, &dc)
}

pub fn cmd_estimate(cfg: &RunConfig) -> Result<()> {
    let input = required(&cfg.input, "input")?;
    let output = required(&cfg.output, "output")?;
    let id = estimator(cfg, EstimatorId::Db)?;
    let x = io::load_panel(input)?;
    let (n, p) = (x.n(), x.p());
    info!("loaded panel with n = {n}, p = {p}");

    let base = baselines(cfg, cfg.bandwidth)?;
    let v = match id {
        EstimatorId::Hac => {
            let ell = base.hac_bandwidth(n);
            info!("HAC bandwidth ell = {ell}");
            hac_estimate(&x, kernel(cfg)?, ell)?
        }
        EstimatorId::Qs => {
            let ell = base.qs_bandwidth(n, p)?;
            info!("QS bandwidth ell = {ell}");
            qs_estimate(&x, ell)?
        }
        EstimatorId::Mac => {
            let params = base.mac_params(n, p)?;
            info!(
                "MAC bandwidth ell = {}, c0 = {}, c1 = {}",
                params.ell, params.c0, params.c1
            );
            mac_estimate(&x, params)?
        }
        EstimatorId::Obm => {
            let b = base.obm_batch_size(n);
            info!("OBM batch size = {b}");
            obm_estimate(&x, b)?
        }
        EstimatorId::Db => pilot(&x, &recipe(cfg, n, p)?)?,
        reg => {
            let recipe = recipe(cfg, n, p)?;
            let v = pilot(&x, &recipe)?;
            regularize(cfg, &x, &recipe, v, reg)?
        }
    };
    io::write_cov(output, &v)?;
    info!("wrote {p}x{p} {id} estimate to {}", output.display());
    Ok(())
}

pub fn cmd_tune(cfg: &RunConfig) -> Result<()> {
    let input = required(&cfg.input, "input")?;
    let output = required(&cfg.output, "output")?;
    let x = io::load_panel(input)?;
    let recipe = recipe(cfg, x.n(), x.p())?;
    let full = pilot(&x, &recipe)?;
    let cv = CvPilots::with_full_pilot(&x, &recipe, &cv_plan(cfg)?, full)?;

    let hard = cv.select_threshold(ThresholdMethod::Hard);
    let soft = cv.select_threshold(ThresholdMethod::Soft);
    let tap = cv.select_taper();
    let mut lines = Vec::new();
    for (name, sel) in [("hard", &hard), ("soft", &soft)] {
        lines.extend(
            sel.criterion.iter().map(|(c, l)| {
                format!("{name},{},{}", io::format_number(*c), io::format_number(*l))
            }),
        );
    }
    lines.extend(
        tap.criterion
            .iter()
            .map(|(k, l)| format!("taper,{k},{}", io::format_number(*l))),
    );
    io::write_lines(output, "method,candidate,cv_loss", lines)?;
    println!("hard tau = {}", io::format_number(hard.selected));
    println!("soft tau = {}", io::format_number(soft.selected));
    println!("taper k = {}", tap.selected);
    Ok(())
}

fn sim_config(cfg: &RunConfig) -> Result<McConfig> {
    let structure = parse_model(cfg.model.as_deref().unwrap_or("tri"), cfg.rho)?;
    let (n, p) = (cfg.n.unwrap_or(200), cfg.p.unwrap_or(300));
    let seed = cfg.seed.unwrap_or(0);
    let mut model = SimModel::new(structure, n, p, seed);
    if let Some(phi) = cfg.phi {
        model.phi = phi;
    }
    if let Some(b) = cfg.burn_in {
        model.burn_in = b;
    }
    if let Some(m) = cfg.mean_coords {
        model.mean_coords = m;
    }
    model.validate()?;

    let estimators = match &cfg.estimators {
        Some(list) => list
            .split(',')
            .map(|s| s.trim().parse())
            .collect::<Result<Vec<EstimatorId>>>()?,
        None => DEFAULT_SIM_ESTIMATORS.to_vec(),
    };
    let mut mc = McConfig::new(model, cfg.replications.unwrap_or(100), estimators, seed);
    mc.recipe = recipe(cfg, n, p)?;
    mc.tuning = match (cfg.tau, cfg.k) {
        (Some(tau), Some(k)) if !cfg.tune => Tuning::Fixed { tau, k },
        _ => Tuning::Cv(cv_plan(cfg)?),
    };
    mc.baselines = baselines(cfg, None)?;
    mc.validate()?;
    Ok(mc)
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<()> {
    let output = required(&cfg.output, "output")?;
    let format = parse_format(cfg.format.as_deref())?;
    let mc = sim_config(cfg)?;
    info!(
        "simulating {:?} with n = {}, p = {}, {} replications",
        mc.model.structure, mc.model.n, mc.model.p, mc.replications
    );
    let summary = run_monte_carlo(&mc)?;
    for (r, msg) in &summary.failures {
        warn!("replication {r} failed: {msg}");
    }
    io::write_text(output, &summary.to_csv())?;
    print!("{}", summary.to_table(format, 2));
    Ok(())
}

pub fn cmd_changepoint(cfg: &RunConfig) -> Result<()> {
    let input = required(&cfg.input, "input")?;
    let output = required(&cfg.output, "output")?;
    let id = estimator(cfg, EstimatorId::Soft)?;
    if !id.is_regularized() {
        return Err(LrcError::Config(format!(
            "change-point normalization needs hard, soft or taper, got {id}"
        )));
    }
    let x = io::load_panel(input)?;
    let recipe = recipe(cfg, x.n(), x.p())?;
    let v = regularize(cfg, &x, &recipe, pilot(&x, &recipe)?, id)?;
    let scan = cusum_scan(&x, &v, cfg.trim.unwrap_or(DEFAULT_TRIM))?;
    info!("omega_hat = {}", omega_hat(&v));

    io::write_lines(
        output,
        "k,statistic",
        scan.path
            .iter()
            .map(|(k, s)| format!("{k},{}", io::format_number(*s))),
    )?;
    if let Some(path) = &cfg.matrix_output {
        io::write_cov(path, &v)?;
    }
    println!("k_hat = {}", scan.k_hat);
    println!("omega_hat = {}", io::format_number(scan.omega));
    Ok(())
}
