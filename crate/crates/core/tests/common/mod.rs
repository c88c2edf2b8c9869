//! Deliberately naive reference implementations, written straight from the
//! defining sums with explicit index loops and 1-based time indices.
#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::PI;

use lrcov::{KernelSpec, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Dense = Vec<Vec<f64>>;

pub fn zeros(p: usize) -> Dense {
    vec![vec![0.0; p]; p]
}

pub fn to_dense(m: &Matrix<f64>) -> Dense {
    m.iter_rows().map(|r| r.to_vec()).collect()
}

pub fn max_abs_diff(a: &Dense, b: &Matrix<f64>) -> f64 {
    assert_eq!(a.len(), b.rows());
    let mut worst: f64 = 0.0;
    for (i, row) in a.iter().enumerate() {
        assert_eq!(row.len(), b.cols());
        for (j, v) in row.iter().enumerate() {
            worst = worst.max((v - b.row(i)[j]).abs());
        }
    }
    worst
}

pub fn kernel(spec: KernelSpec, x: f64) -> f64 {
    let a = x.abs();
    match spec {
        KernelSpec::TruncatedPolynomial { q } => {
            if a <= 1.0 {
                1.0 - a.powf(q)
            } else {
                0.0
            }
        }
        KernelSpec::Bartlett => {
            if a <= 1.0 {
                1.0 - a
            } else {
                0.0
            }
        }
        KernelSpec::QuadraticSpectral => {
            if x == 0.0 {
                return 1.0;
            }
            let z = 6.0 * PI * x / 5.0;
            25.0 / (12.0 * PI * PI * x * x) * (z.sin() / z - z.cos())
        }
    }
}

/// `X[t]` for `t = 1..=n`.
fn obs(x: &Matrix<f64>, t: usize) -> &[f64] {
    x.row(t - 1)
}

fn symmetrize(a: Dense) -> Dense {
    let p = a.len();
    let mut out = zeros(p);
    for i in 0..p {
        for j in 0..p {
            out[i][j] = 0.5 * (a[i][j] + a[j][i]);
        }
    }
    out
}

/// `D_t = Σ_j d_j X_{t − j h}` for `t = m h + 1 ..= n`, stored with index `t`.
pub fn diff_series(x: &Matrix<f64>, d: &[f64], h: usize) -> Vec<(usize, Vec<f64>)> {
    let (n, p) = (x.rows(), x.cols());
    let m = d.len() - 1;
    let mut out = Vec::new();
    for t in (m * h + 1)..=n {
        let mut row = vec![0.0; p];
        for (j, dj) in d.iter().enumerate() {
            for c in 0..p {
                row[c] += dj * obs(x, t - j * h)[c];
            }
        }
        out.push((t, row));
    }
    out
}

/// `Γ^D_k = (1/n) Σ_{t = m h + |k| + 1}^{n} D_t D_{t−|k|}ᵀ`, transposed for `k < 0`.
pub fn diff_autocov(x: &Matrix<f64>, d: &[f64], h: usize, k: i64) -> Dense {
    let (n, p) = (x.rows(), x.cols());
    let m = d.len() - 1;
    let lag = k.unsigned_abs() as usize;
    let series = diff_series(x, d, h);
    let at = |t: usize| -> &Vec<f64> {
        let (tt, row) = &series[t - (m * h + 1)];
        assert_eq!(*tt, t);
        row
    };
    let mut g = zeros(p);
    for t in (m * h + lag + 1)..=n {
        let (a, b) = (at(t), at(t - lag));
        for r in 0..p {
            for s in 0..p {
                g[r][s] += a[r] * b[s] / n as f64;
            }
        }
    }
    if k < 0 {
        let mut tr = zeros(p);
        for r in 0..p {
            for s in 0..p {
                tr[r][s] = g[s][r];
            }
        }
        g = tr;
    }
    g
}

pub fn db(x: &Matrix<f64>, d: &[f64], h: usize, ell: usize, spec: KernelSpec) -> Dense {
    let p = x.cols();
    let mut v = zeros(p);
    let l = ell as i64;
    for k in -(l - 1)..=(l - 1) {
        let w = kernel(spec, k as f64 / ell as f64);
        let g = diff_autocov(x, d, h, k);
        for r in 0..p {
            for s in 0..p {
                v[r][s] += w * g[r][s];
            }
        }
    }
    symmetrize(v)
}

fn demeaned(x: &Matrix<f64>) -> Vec<Vec<f64>> {
    let (n, p) = (x.rows(), x.cols());
    let mut mean = vec![0.0; p];
    for t in 1..=n {
        for c in 0..p {
            mean[c] += obs(x, t)[c] / n as f64;
        }
    }
    (1..=n)
        .map(|t| (0..p).map(|c| obs(x, t)[c] - mean[c]).collect())
        .collect()
}

/// `Γ̂_k = (1/n) Σ_{i=|k|+1}^{n} X̂_i X̂_{i−|k|}ᵀ`, transposed for `k < 0`.
pub fn autocov(x: &Matrix<f64>, k: i64) -> Dense {
    let (n, p) = (x.rows(), x.cols());
    let xh = demeaned(x);
    let lag = k.unsigned_abs() as usize;
    let mut g = zeros(p);
    for i in (lag + 1)..=n {
        for r in 0..p {
            for s in 0..p {
                let (a, b) = if k >= 0 {
                    (xh[i - 1][r], xh[i - lag - 1][s])
                } else {
                    (xh[i - lag - 1][r], xh[i - 1][s])
                };
                g[r][s] += a * b / n as f64;
            }
        }
    }
    g
}

fn kernel_sum(x: &Matrix<f64>, spec: KernelSpec, ell: usize, max_lag: usize) -> Dense {
    let p = x.cols();
    let mut v = zeros(p);
    let m = max_lag as i64;
    for k in -m..=m {
        let w = kernel(spec, k as f64 / ell as f64);
        let g = autocov(x, k);
        for r in 0..p {
            for s in 0..p {
                v[r][s] += w * g[r][s];
            }
        }
    }
    symmetrize(v)
}

pub fn hac(x: &Matrix<f64>, spec: KernelSpec, ell: usize) -> Dense {
    kernel_sum(x, spec, ell, ell - 1)
}

pub fn qs(x: &Matrix<f64>, ell: usize) -> Dense {
    kernel_sum(x, KernelSpec::QuadraticSpectral, ell, x.rows() - 1)
}

pub fn obm(x: &Matrix<f64>, batch: usize) -> Dense {
    let (n, p) = (x.rows(), x.cols());
    let xh = demeaned(x);
    let mut v = zeros(p);
    for i in batch..=n {
        let mut mean = vec![0.0; p];
        for j in (i - batch + 1)..=i {
            for c in 0..p {
                mean[c] += xh[j - 1][c] / batch as f64;
            }
        }
        for r in 0..p {
            for s in 0..p {
                v[r][s] += batch as f64 / (n - batch + 1) as f64 * mean[r] * mean[s];
            }
        }
    }
    v
}

/// `Δ̂_k = (1/(2(n−|k|+1))) Σ_{i=|k|+1}^{n} (X_i − X_{i−|k|})^{⊗2}`, zero at `k = 0`.
pub fn variate_difference(x: &Matrix<f64>, k: usize) -> Dense {
    let (n, p) = (x.rows(), x.cols());
    let mut v = zeros(p);
    if k == 0 {
        return v;
    }
    for i in (k + 1)..=n {
        let diff: Vec<f64> = (0..p).map(|c| obs(x, i)[c] - obs(x, i - k)[c]).collect();
        for r in 0..p {
            for s in 0..p {
                v[r][s] += diff[r] * diff[s] / (2.0 * (n - k + 1) as f64);
            }
        }
    }
    v
}

pub fn mac(x: &Matrix<f64>, ell: usize, q: f64, c0: f64, c1: f64) -> Dense {
    let (n, p) = (x.rows(), x.cols());
    let mut v = zeros(p);
    let l = ell as i64;
    for k in -l..=l {
        let a = k.unsigned_abs() as usize;
        let far = ((c0 * ell as f64 + c1 * a as f64).round() as usize).clamp(1, n - 1);
        let w = kernel(KernelSpec::TruncatedPolynomial { q }, a as f64 / ell as f64);
        let (dl, dk) = (variate_difference(x, far), variate_difference(x, a));
        for r in 0..p {
            for s in 0..p {
                v[r][s] += w * (dl[r][s] - dk[r][s]);
            }
        }
    }
    symmetrize(v)
}

pub fn frobenius(a: &Dense) -> f64 {
    a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Matrix<f64> {
    Matrix::from_fn(n, p, |_, _| rng.random_range(-2.0..2.0))
}

/// A random panel with a trend and a jump, so mean effects are exercised.
pub fn random_panel(seed: u64, n: usize, p: usize) -> Matrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = random_matrix(&mut rng, n, p);
    let slope: Vec<f64> = (0..p).map(|_| rng.random_range(-1.0..1.0)).collect();
    for i in 0..n {
        let row = m.row_mut(i);
        for (c, v) in row.iter_mut().enumerate() {
            *v += slope[c] * i as f64 / n as f64 + if 2 * i > n { 1.5 } else { 0.0 };
        }
    }
    m
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, p: usize) -> Matrix<f64> {
    let a = random_matrix(rng, p, p);
    a.symmetrized()
}

/// Largest deviation of each library estimator from its loop oracle over
/// `instances` random problems with `n ≤ 60`, `p ≤ 5`.
pub fn loop_oracle_deviations(instances: usize, seed: u64) -> Vec<(&'static str, f64)> {
    use lrcov::{
        db_autocov, db_estimate, difference_series, hac_estimate, mac_estimate, mean_bias_matrix,
        obm_estimate, qs_estimate, variate_difference as lib_vd, DiffConfig, DiffSequence,
        MacParams, TimeSeriesPanel,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: Vec<(&'static str, f64)> = [
        "DB",
        "HAC",
        "OBM",
        "QS",
        "MAC",
        "Delta_k",
        "Gamma^D_k",
        "B_mu",
    ]
    .into_iter()
    .map(|name| (name, 0.0))
    .collect();
    let mut record = |name: &str, dev: f64| {
        let slot = worst.iter_mut().find(|(n, _)| *n == name).unwrap();
        slot.1 = slot.1.max(dev);
    };
    let kernels = [
        KernelSpec::TruncatedPolynomial { q: 2.0 },
        KernelSpec::TruncatedPolynomial { q: 1.5 },
        KernelSpec::Bartlett,
    ];
    for inst in 0..instances {
        let n = rng.random_range(30..=60);
        let p = rng.random_range(1..=5);
        let data = random_panel(seed.wrapping_add(inst as u64), n, p);
        let x = TimeSeriesPanel::new(data.clone()).unwrap();
        let spec = kernels[inst % kernels.len()];

        let d = DiffSequence::default();
        let h = rng.random_range(1..=3);
        let ell = rng.random_range(1..=4);
        let cfg = DiffConfig::new(d.clone(), h, ell, spec).unwrap();
        let w = d.weights();
        record(
            "DB",
            max_abs_diff(
                &db(&data, w, h, ell, spec),
                db_estimate(&x, &cfg).unwrap().values(),
            ),
        );
        let diffs = difference_series(&data, &cfg).unwrap();
        for k in [-(ell as i64), -1, 0, 1, 2] {
            if k.unsigned_abs() as usize >= diffs.rows() {
                continue;
            }
            let lib = db_autocov(&diffs, k, n).unwrap();
            record(
                "Gamma^D_k",
                max_abs_diff(&diff_autocov(&data, w, h, k), &lib),
            );
        }
        record(
            "B_mu",
            max_abs_diff(
                &db(&data, w, h, ell, spec),
                mean_bias_matrix(&data, &cfg).unwrap().values(),
            ),
        );

        let hac_ell = rng.random_range(1..=8);
        record(
            "HAC",
            max_abs_diff(
                &hac(&data, spec, hac_ell),
                hac_estimate(&x, spec, hac_ell).unwrap().values(),
            ),
        );
        let qs_ell = rng.random_range(1..=6);
        record(
            "QS",
            max_abs_diff(
                &qs(&data, qs_ell),
                qs_estimate(&x, qs_ell).unwrap().values(),
            ),
        );
        let batch = rng.random_range(2..=8);
        record(
            "OBM",
            max_abs_diff(
                &obm(&data, batch),
                obm_estimate(&x, batch).unwrap().values(),
            ),
        );
        for k in [0, 1, 3, n - 1] {
            record(
                "Delta_k",
                max_abs_diff(&variate_difference(&data, k), &lib_vd(&x, k).unwrap()),
            );
        }
        let params = MacParams {
            ell: rng.random_range(1..=4),
            q: [1.0, 2.0][inst % 2],
            c0: rng.random_range(0.5..3.0),
            c1: rng.random_range(0.5..2.0),
        };
        record(
            "MAC",
            max_abs_diff(
                &mac(&data, params.ell, params.q, params.c0, params.c1),
                mac_estimate(&x, params).unwrap().values(),
            ),
        );
    }
    worst
}
