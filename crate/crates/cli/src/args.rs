//! Command-line flags and the flat `key = value` config file they override.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use lrcov::LrcError;

#[derive(Debug, Parser)]
#[command(
    name = "lrcov",
    version,
    about = "Long-run covariance estimation for high-dimensional series"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Estimate the long-run covariance matrix of a CSV panel.
    Estimate,
    /// Cross-validate threshold levels and the taper bandwidth.
    Tune,
    /// Run a Monte Carlo comparison on a simulated model.
    Simulate,
    /// CUSUM change-point scan normalized by a regularized estimate.
    Changepoint,
}

/// Every setting, from flags or the config file. Config keys are the long
/// flag names (`-` and `_` are interchangeable).
#[derive(Debug, Clone, Default, Args)]
pub struct RunConfig {
    /// Flat `key = value` file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Input panel: rows are time points, columns coordinates.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// db, hac, mac, obm, qs, hard, soft or taper.
    #[arg(long, global = true)]
    pub estimator: Option<String>,
    /// Table format on standard output: markdown or csv.
    #[arg(long, global = true)]
    pub format: Option<String>,

    /// Kernel bandwidth ℓ (difference-based pilot, HAC, QS, MAC).
    #[arg(long, global = true)]
    pub bandwidth: Option<usize>,
    /// Difference lag h of the pilot (default 2ℓ).
    #[arg(long, global = true)]
    pub lag_h: Option<usize>,
    /// poly, bartlett or qs.
    #[arg(long, global = true)]
    pub kernel: Option<String>,
    /// Exponent of the polynomial kernel.
    #[arg(long, global = true)]
    pub q: Option<f64>,
    /// OBM batch size.
    #[arg(long, global = true)]
    pub batch: Option<usize>,
    #[arg(long, global = true)]
    pub c0: Option<f64>,
    #[arg(long, global = true)]
    pub c1: Option<f64>,

    /// Threshold level for hard/soft.
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    /// Taper bandwidth.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Choose τ or k by blockwise cross-validation even if given.
    #[arg(long, global = true)]
    pub tune: bool,
    #[arg(long, global = true)]
    pub cv_reps: Option<usize>,
    #[arg(long, global = true)]
    pub train_frac: Option<f64>,
    #[arg(long, global = true)]
    pub valid_frac: Option<f64>,

    /// tri, toeplitz or permblock.
    #[arg(long, global = true)]
    pub model: Option<String>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub p: Option<usize>,
    #[arg(long, global = true)]
    pub replications: Option<usize>,
    /// Comma-separated estimator list, in table order.
    #[arg(long, global = true)]
    pub estimators: Option<String>,
    #[arg(long, global = true)]
    pub phi: Option<f64>,
    /// Cross-sectional parameter: a for tri, ρ otherwise.
    #[arg(long, global = true)]
    pub rho: Option<f64>,
    #[arg(long, global = true)]
    pub burn_in: Option<usize>,
    #[arg(long, global = true)]
    pub mean_coords: Option<usize>,
    #[arg(long, global = true)]
    pub hac_bandwidth: Option<usize>,

    /// Fraction trimmed at each end of the change-point scan.
    #[arg(long, global = true)]
    pub trim: Option<f64>,
    /// Also write the normalizing matrix here.
    #[arg(long, global = true)]
    pub matrix_output: Option<PathBuf>,
}

/// Parsed config file; keys are removed as they are consumed.
struct ConfigFile {
    path: PathBuf,
    entries: BTreeMap<String, (usize, String)>,
}

impl ConfigFile {
    fn load(path: &Path) -> Result<Self, LrcError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LrcError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(path, &text)
    }

    fn parse(path: &Path, text: &str) -> Result<Self, LrcError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            let bad = |msg: &str| LrcError::Config(format!("{}:{}: {msg}", path.display(), i + 1));
            if line.starts_with('[') {
                return Err(bad(
                    "sections are not supported; use flat key = value lines",
                ));
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad("expected key = value"))?;
            let key = key.trim().replace('_', "-");
            let value = value.trim().trim_matches('"').to_string();
            if key.is_empty() {
                return Err(bad("empty key"));
            }
            if entries.insert(key.clone(), (i + 1, value)).is_some() {
                return Err(bad(&format!("duplicate key '{key}'")));
            }
        }
        Ok(Self {
            path: path.to_path_buf(),
            entries,
        })
    }

    fn take<T: FromStr>(&mut self, field: &str) -> Result<Option<T>, LrcError>
    where
        T::Err: Display,
    {
        let key = field.replace('_', "-");
        match self.entries.remove(&key) {
            None => Ok(None),
            Some((line, v)) => v.parse().map(Some).map_err(|e| {
                LrcError::Config(format!(
                    "{}:{line}: bad value for '{key}': {e}",
                    self.path.display()
                ))
            }),
        }
    }
}

macro_rules! fill_from_file {
    ($cfg:ident, $file:ident, $($field:ident),* $(,)?) => {
        $(
            if $cfg.$field.is_none() {
                $cfg.$field = $file.take(stringify!($field))?;
            } else {
                $file.take::<String>(stringify!($field))?;
            }
        )*
    };
}

impl RunConfig {
    /// Fills unset options from the config file named by `--config`.
    pub fn merge_config_file(mut self) -> Result<Self, LrcError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let mut file = ConfigFile::load(&path)?;
        self.merge(&mut file)?;
        Ok(self)
    }

    fn merge(&mut self, file: &mut ConfigFile) -> Result<(), LrcError> {
        let cfg = self;
        fill_from_file!(
            cfg,
            file,
            input,
            output,
            seed,
            threads,
            estimator,
            format,
            bandwidth,
            lag_h,
            kernel,
            q,
            batch,
            c0,
            c1,
            tau,
            k,
            cv_reps,
            train_frac,
            valid_frac,
            model,
            n,
            p,
            replications,
            estimators,
            phi,
            rho,
            burn_in,
            mean_coords,
            hac_bandwidth,
            trim,
            matrix_output,
        );
        if !cfg.tune {
            cfg.tune = file.take("tune")?.unwrap_or(false);
        } else {
            file.take::<String>("tune")?;
        }
        if let Some((key, (line, _))) = file.entries.iter().next() {
            return Err(LrcError::Config(format!(
                "{}:{line}: unknown key '{key}'",
                file.path.display()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn merged(cli: RunConfig, text: &str) -> Result<RunConfig, LrcError> {
        let mut file = ConfigFile::parse(Path::new("test.ini"), text)?;
        let mut cfg = cli;
        cfg.merge(&mut file)?;
        Ok(cfg)
    }

    #[test]
    fn flags_win_over_file() {
        let cli = RunConfig {
            seed: Some(9),
            ..Default::default()
        };
        let cfg = merged(
            cli,
            "seed = 3\n# comment\nestimator = hard\nlag_h = 4\ntune = true\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, Some(9));
        assert_eq!(cfg.estimator.as_deref(), Some("hard"));
        assert_eq!(cfg.lag_h, Some(4));
        assert!(cfg.tune);
    }

    #[test]
    fn rejects_malformed_files() {
        for text in [
            "seed = x\n",
            "what = 1\n",
            "[main]\nseed = 1\n",
            "seed\n",
            "seed = 1\nseed = 2\n",
        ] {
            let err = merged(RunConfig::default(), text).unwrap_err();
            assert!(matches!(err, LrcError::Config(_)), "{text:?}");
        }
    }

    #[test]
    fn quoted_paths() {
        let cfg = merged(RunConfig::default(), "output = \"out dir/v.csv\"\n").unwrap();
        assert_eq!(cfg.output, Some(PathBuf::from("out dir/v.csv")));
    }
}
