//! Data-driven choice of the threshold level and taper bandwidth.
//!
//! Each repetition draws two disjoint contiguous blocks. The regularized
//! difference-based pilot of the training block is compared with the raw
//! pilot of the validation block in squared Frobenius norm, and the loss is
//! averaged over repetitions.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cov::CovMatrix;
use crate::diff::DiffRecipe;
use crate::error::{LrcError, Result};
use crate::estimators::{db_estimate, SegmentPilots};
use crate::panel::TimeSeriesPanel;
use crate::regularize::{hard_threshold, soft_threshold, taper_weight};
use crate::scalar::Scalar;

pub const DEFAULT_REPETITIONS: usize = 50;
pub const DEFAULT_TRAIN_FRAC: f64 = 0.6;
pub const DEFAULT_VALID_FRAC: f64 = 0.3;
pub const DEFAULT_LAMBDA_POINTS: usize = 20;
pub const MAX_TAPER_CANDIDATES: usize = 40;

/// Repeated double-block validation settings.
#[derive(Debug, Clone, PartialEq)]
pub struct CvPlan {
    pub repetitions: usize,
    pub train_frac: f64,
    pub valid_frac: f64,
    pub seed: u64,
    /// Candidate thresholds; `None` derives them from the full-sample pilot.
    pub lambda_grid: Option<Vec<f64>>,
    /// Candidate taper bandwidths; `None` uses `2, 4, …`.
    pub taper_grid: Option<Vec<usize>>,
}

impl Default for CvPlan {
    fn default() -> Self {
        Self {
            repetitions: DEFAULT_REPETITIONS,
            train_frac: DEFAULT_TRAIN_FRAC,
            valid_frac: DEFAULT_VALID_FRAC,
            seed: 0,
            lambda_grid: None,
            taper_grid: None,
        }
    }
}

impl CvPlan {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(LrcError::Config("CV needs at least one repetition".into()));
        }
        let in_unit = |f: f64| f > 0.0 && f < 1.0;
        if !in_unit(self.train_frac) || !in_unit(self.valid_frac) {
            return Err(LrcError::Config(format!(
                "block fractions must lie in (0, 1); got {} and {}",
                self.train_frac, self.valid_frac
            )));
        }
        if self.train_frac + self.valid_frac > 1.0 + 1e-12 {
            return Err(LrcError::Config(format!(
                "train_frac + valid_frac = {} exceeds 1",
                self.train_frac + self.valid_frac
            )));
        }
        if let Some(g) = &self.lambda_grid {
            check_increasing(g.iter().map(|&v| {
                if v.is_finite() && v >= 0.0 {
                    Ok(v)
                } else {
                    Err(LrcError::Config(format!("invalid threshold candidate {v}")))
                }
            }))?;
        }
        if let Some(g) = &self.taper_grid {
            if g.contains(&0) {
                return Err(LrcError::Config("taper candidates must be positive".into()));
            }
            check_increasing(g.iter().map(|&k| Ok(k as f64)))?;
        }
        Ok(())
    }

    /// Lengths `(⌊train_frac·n⌋, ⌊valid_frac·n⌋)`.
    pub fn block_lengths(&self, n: usize) -> (usize, usize) {
        (
            (self.train_frac * n as f64).floor() as usize,
            (self.valid_frac * n as f64).floor() as usize,
        )
    }
}

fn check_increasing(values: impl Iterator<Item = Result<f64>>) -> Result<()> {
    let mut prev: Option<f64> = None;
    let mut any = false;
    for v in values {
        let v = v?;
        if prev.is_some_and(|p| v <= p) {
            return Err(LrcError::Config(
                "candidate grid must be strictly increasing".into(),
            ));
        }
        prev = Some(v);
        any = true;
    }
    if !any {
        return Err(LrcError::Config("candidate grid must be nonempty".into()));
    }
    Ok(())
}

/// Training and validation blocks of repetition `b`.
///
/// The order of the two blocks is a fair coin; positions are uniform given
/// the order. Deterministic in `(n, plan.seed, b)`.
pub fn draw_blocks(n: usize, plan: &CvPlan, b: usize) -> Result<(Range<usize>, Range<usize>)> {
    plan.validate()?;
    let (train_len, valid_len) = plan.block_lengths(n);
    if train_len == 0 || valid_len == 0 || train_len + valid_len > n {
        return Err(LrcError::Config(format!(
            "infeasible CV blocks of lengths {train_len} and {valid_len} for n = {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    rng.set_stream(b as u64);
    let train_first: bool = rng.random();
    let (first_len, second_len) = if train_first {
        (train_len, valid_len)
    } else {
        (valid_len, train_len)
    };
    let slack = n - train_len - valid_len;
    let first_start = rng.random_range(0..=slack);
    let second_start = rng.random_range(first_start + first_len..=n - second_len);
    let first = first_start..first_start + first_len;
    let second = second_start..second_start + second_len;
    Ok(if train_first {
        (first, second)
    } else {
        (second, first)
    })
}

/// Thresholding rule selected by cross-validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdMethod {
    Hard,
    Soft,
}

impl ThresholdMethod {
    pub fn apply<T: Scalar>(self, v: &CovMatrix<T>, tau: T) -> Result<CovMatrix<T>> {
        match self {
            ThresholdMethod::Hard => hard_threshold(v, tau),
            ThresholdMethod::Soft => soft_threshold(v, tau),
        }
    }
}

/// Outcome of a grid search.
#[derive(Debug, Clone, PartialEq)]
pub struct CvSelection<V> {
    pub selected: V,
    /// `(candidate, CV value)` in grid order.
    pub criterion: Vec<(V, f64)>,
    /// `split_losses[b][g]`: loss of candidate `g` on repetition `b`.
    pub split_losses: Vec<Vec<f64>>,
}

/// One repetition: the two blocks and their unregularized pilots.
#[derive(Debug, Clone)]
pub struct CvSplit<T> {
    pub train: Range<usize>,
    pub valid: Range<usize>,
    pub train_pilot: CovMatrix<T>,
    pub valid_pilot: CovMatrix<T>,
}

/// Pilots for every repetition of a plan, shared by all regularizers.
#[derive(Debug, Clone)]
pub struct CvPilots<T> {
    pub splits: Vec<CvSplit<T>>,
    /// Pilot on the full sample, used to derive the default threshold grid.
    pub full_pilot: CovMatrix<T>,
    plan: CvPlan,
}

impl<T: Scalar> CvPilots<T> {
    pub fn compute(x: &TimeSeriesPanel<T>, recipe: &DiffRecipe, plan: &CvPlan) -> Result<Self> {
        plan.validate()?;
        let full_cfg = recipe.resolve(x.n(), x.p())?;
        let full_pilot = db_estimate(x, &full_cfg)?;
        Self::with_full_pilot(x, recipe, plan, full_pilot)
    }

    pub fn with_full_pilot(
        x: &TimeSeriesPanel<T>,
        recipe: &DiffRecipe,
        plan: &CvPlan,
        full_pilot: CovMatrix<T>,
    ) -> Result<Self> {
        plan.validate()?;
        let (train_len, valid_len) = plan.block_lengths(x.n());
        let config = |len: usize| {
            recipe
                .resolve(len, x.p())
                .map_err(|e| LrcError::Config(format!("CV block of length {len} infeasible: {e}")))
        };
        let (train_cfg, valid_cfg) = (config(train_len)?, config(valid_len)?);
        let train_seg = SegmentPilots::new(x.data(), &train_cfg)?;
        let valid_seg = if valid_cfg == train_cfg {
            None
        } else {
            Some(SegmentPilots::new(x.data(), &valid_cfg)?)
        };
        let valid_seg = valid_seg.as_ref().unwrap_or(&train_seg);
        let splits = (0..plan.repetitions)
            .into_par_iter()
            .map(|b| -> Result<CvSplit<T>> {
                let (train, valid) = draw_blocks(x.n(), plan, b)?;
                Ok(CvSplit {
                    train_pilot: train_seg.estimate(train.clone())?,
                    valid_pilot: valid_seg.estimate(valid.clone())?,
                    train,
                    valid,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            splits,
            full_pilot,
            plan: plan.clone(),
        })
    }

    pub fn lambda_grid(&self) -> Vec<f64> {
        self.plan
            .lambda_grid
            .clone()
            .unwrap_or_else(|| default_lambda_grid(&self.full_pilot))
    }

    pub fn taper_grid(&self) -> Vec<usize> {
        self.plan
            .taper_grid
            .clone()
            .unwrap_or_else(|| default_taper_grid(self.full_pilot.p()))
    }

    /// Grid search over thresholds; ties go to the larger threshold.
    pub fn select_threshold(&self, method: ThresholdMethod) -> CvSelection<f64> {
        let grid = self.lambda_grid();
        let losses: Vec<Vec<f64>> = self
            .splits
            .par_iter()
            .map(|split| threshold_losses(split, &grid, method))
            .collect();
        let criterion = average(&losses, grid.len());
        let mut best = 0;
        for (g, &c) in criterion.iter().enumerate() {
            if c <= criterion[best] {
                best = g;
            }
        }
        CvSelection {
            selected: grid[best],
            criterion: grid.iter().copied().zip(criterion).collect(),
            split_losses: losses,
        }
    }

    /// Grid search over taper bandwidths; ties go to the smaller bandwidth.
    pub fn select_taper(&self) -> CvSelection<usize> {
        let grid = self.taper_grid();
        let losses: Vec<Vec<f64>> = self
            .splits
            .par_iter()
            .map(|split| taper_losses(split, &grid))
            .collect();
        let criterion = average(&losses, grid.len());
        let mut best = 0;
        for (g, &c) in criterion.iter().enumerate() {
            if c < criterion[best] {
                best = g;
            }
        }
        CvSelection {
            selected: grid[best],
            criterion: grid.iter().copied().zip(criterion).collect(),
            split_losses: losses,
        }
    }
}

/// `‖f_τ(train) − valid‖²_F` for every `τ` in the increasing `grid`.
///
/// Off-diagonal pairs are bucketed by how many candidates lie at or below
/// `|train|`: a pair in bucket `b` survives exactly the first `b` thresholds.
/// Per-bucket sums then give every loss without revisiting the matrix. For a
/// surviving pair, soft thresholding contributes
/// `(t − v)² − 2τ sign(t)(t − v) + τ²`.
fn threshold_losses<T: Scalar>(
    split: &CvSplit<T>,
    grid: &[f64],
    method: ThresholdMethod,
) -> Vec<f64> {
    let p = split.train_pilot.p();
    let buckets = grid.len() + 1;
    let mut dropped = vec![0.0; buckets];
    let mut kept_sq = vec![0.0; buckets];
    let mut kept_lin = vec![0.0; buckets];
    let mut kept_cnt = vec![0.0; buckets];
    let mut diag = 0.0;
    for i in 0..p {
        let tr = split.train_pilot.values().row(i);
        let va = split.valid_pilot.values().row(i);
        let d = tr[i].as_f64() - va[i].as_f64();
        diag += d * d;
        for j in (i + 1)..p {
            let (t, v) = (tr[j].as_f64(), va[j].as_f64());
            let b = grid.partition_point(|&tau| tau <= t.abs());
            dropped[b] += v * v;
            kept_sq[b] += (t - v) * (t - v);
            kept_lin[b] += t.signum() * (t - v);
            kept_cnt[b] += 1.0;
        }
    }
    grid.iter()
        .enumerate()
        .map(|(g, &tau)| {
            let mut off = 0.0;
            for b in 0..buckets {
                off += if b <= g {
                    dropped[b]
                } else {
                    match method {
                        ThresholdMethod::Hard => kept_sq[b],
                        ThresholdMethod::Soft => {
                            kept_sq[b] - 2.0 * tau * kept_lin[b] + tau * tau * kept_cnt[b]
                        }
                    }
                };
            }
            diag + 2.0 * off
        })
        .collect()
}

/// `‖W^{(k)} ∘ train − valid‖²_F` for every `k` in `grid`, from sums along
/// each diagonal (the taper weight depends only on `|i − j|`).
fn taper_losses<T: Scalar>(split: &CvSplit<T>, grid: &[usize]) -> Vec<f64> {
    let p = split.train_pilot.p();
    let (mut tt, mut tv, mut vv) = (vec![0.0; p], vec![0.0; p], vec![0.0; p]);
    for i in 0..p {
        let tr = split.train_pilot.values().row(i);
        let va = split.valid_pilot.values().row(i);
        for j in i..p {
            let (t, v) = (tr[j].as_f64(), va[j].as_f64());
            let d = j - i;
            tt[d] += t * t;
            tv[d] += t * v;
            vv[d] += v * v;
        }
    }
    grid.iter()
        .map(|&k| {
            (0..p)
                .map(|d| {
                    let w: f64 = taper_weight(0, d, k);
                    let mult = if d == 0 { 1.0 } else { 2.0 };
                    mult * (w * w * tt[d] - 2.0 * w * tv[d] + vv[d])
                })
                .sum()
        })
        .collect()
}

fn average(losses: &[Vec<f64>], candidates: usize) -> Vec<f64> {
    let b = losses.len() as f64;
    (0..candidates)
        .map(|g| losses.iter().map(|row| row[g]).sum::<f64>() / b)
        .collect()
}

/// Twenty geometrically spaced thresholds from the 10% quantile to the
/// maximum of the absolute off-diagonal entries of `pilot`.
pub fn default_lambda_grid<T: Scalar>(pilot: &CovMatrix<T>) -> Vec<f64> {
    let p = pilot.p();
    let mut off: Vec<f64> = Vec::with_capacity(p * p.saturating_sub(1) / 2);
    for i in 0..p {
        for j in (i + 1)..p {
            off.push(pilot[(i, j)].abs().as_f64());
        }
    }
    if off.is_empty() {
        return vec![0.0];
    }
    off.sort_by(|a, b| a.total_cmp(b));
    let hi = *off.last().expect("nonempty");
    if hi <= 0.0 {
        return vec![0.0];
    }
    let mut lo = quantile_sorted(&off, 0.1);
    if lo <= 0.0 {
        lo = hi * 1e-3;
    }
    let steps = DEFAULT_LAMBDA_POINTS - 1;
    let ratio = (hi / lo).ln() / steps as f64;
    let mut grid: Vec<f64> = (0..=steps).map(|s| lo * (ratio * s as f64).exp()).collect();
    grid[steps] = hi;
    grid.dedup_by(|a, b| a <= b);
    grid
}

/// Linear-interpolation quantile of ascending data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Even bandwidths `2, 4, …` up to `min(p, 4⌈p/4⌉)`, at most forty of them.
pub fn default_taper_grid(p: usize) -> Vec<usize> {
    let upper = p.min(4 * p.div_ceil(4));
    let grid: Vec<usize> = (1..)
        .map(|i| 2 * i)
        .take_while(|&k| k <= upper)
        .take(MAX_TAPER_CANDIDATES)
        .collect();
    if grid.is_empty() {
        vec![1]
    } else {
        grid
    }
}

/// Selects the threshold level for `method` by blockwise validation.
pub fn cv_select_threshold<T: Scalar>(
    x: &TimeSeriesPanel<T>,
    recipe: &DiffRecipe,
    plan: &CvPlan,
    method: ThresholdMethod,
) -> Result<CvSelection<f64>> {
    Ok(CvPilots::compute(x, recipe, plan)?.select_threshold(method))
}

/// Selects the taper bandwidth by blockwise validation.
pub fn cv_select_taper<T: Scalar>(
    x: &TimeSeriesPanel<T>,
    recipe: &DiffRecipe,
    plan: &CvPlan,
) -> Result<CvSelection<usize>> {
    Ok(CvPilots::compute(x, recipe, plan)?.select_taper())
}
