use lrcov::simulate::cusum_scan;
use lrcov::{
    db_estimate, gen_series, hard_threshold, make_sigma_eps, max_norm, mean_bias_matrix, mean_path,
    oracle_decomposition, run_monte_carlo, soft_threshold, taper, CovMatrix, CrossSection,
    DiffConfig, EstimatorId, Matrix, McConfig, SimModel, TimeSeriesPanel,
};

use EstimatorId::{Db, Hac, Hard, Soft, Taper};

#[test]
fn noise_moments_match_the_model() {
    let mut model = SimModel::new(CrossSection::model_two(), 50_000, 3, 17);
    model.mean_coords = 0;
    let data = gen_series::<f64>(&model).unwrap();
    let sigma = make_sigma_eps::<f64>(&model).unwrap();
    let z = &data.z;
    let n = z.rows() as f64;
    let phi = model.phi;
    for r in 0..3 {
        for s in 0..3 {
            let cov: f64 = z.iter_rows().map(|row| row[r] * row[s]).sum::<f64>() / n;
            let want = sigma.values().row(r)[s] / (1.0 - phi * phi);
            assert!((cov - want).abs() < 0.05, "({r},{s}): {cov} vs {want}");
        }
        let var: f64 = z.iter_rows().map(|row| row[r] * row[r]).sum();
        let lag1: f64 = (1..z.rows()).map(|t| z.row(t)[r] * z.row(t - 1)[r]).sum();
        assert!((lag1 / var - phi).abs() < 0.02);
    }
    // without a mean component the observations are the noise
    assert_eq!(data.x.data(), z);
}

#[test]
fn observations_are_mean_plus_noise() {
    let model = SimModel::new(CrossSection::model_one(), 300, 25, 4);
    let data = gen_series::<f64>(&model).unwrap();
    assert_eq!(data.mu, mean_path::<f64>(300, 25, 20).unwrap());
    assert_eq!(data.x.data(), &data.mu.add(&data.z).unwrap());
}

#[test]
fn decomposition_identity_on_simulated_replications() {
    for seed in 0..10 {
        let model = SimModel::new(CrossSection::model_one(), 200, 40, seed);
        let data = gen_series::<f64>(&model).unwrap();
        let cfg = DiffConfig::balanced(200, 40).unwrap();
        let dec = oracle_decomposition(data.x.data(), &data.mu, &data.z, &cfg).unwrap();
        let resid = dec
            .v_db
            .values()
            .sub(dec.v_oracle.values())
            .and_then(|m| m.sub(dec.b_mu.values()))
            .and_then(|m| m.sub(dec.r_mu.values()))
            .unwrap();
        assert!(max_norm(&resid) < 1e-8);
        let b_mu = mean_bias_matrix(&data.mu, &cfg).unwrap();
        assert_eq!(b_mu, dec.b_mu);
        assert!(max_norm(b_mu.values()) > 0.0);
    }
}

fn mean_rel_frob(summary: &lrcov::McSummary, id: EstimatorId) -> f64 {
    summary.row(id).unwrap().mean.rel_frob
}

#[test]
fn regularized_estimators_beat_the_pilot_at_moderate_length() {
    let estimators = vec![Hac, Db, Hard, Soft, Taper];
    for (structure, seed) in [
        (CrossSection::model_one(), 1000),
        (CrossSection::model_two(), 2000),
    ] {
        let model = SimModel::new(structure, 400, 300, 0);
        let summary =
            run_monte_carlo(&McConfig::new(model, 100, estimators.clone(), seed)).unwrap();
        assert!(summary.failures.is_empty());
        let r = |id| mean_rel_frob(&summary, id);
        assert!(r(Hac) > 10.0 * r(Db), "{structure:?}");
        assert!(r(Db) > r(Hard) && r(Db) > r(Soft), "{structure:?}");
        assert!(r(Taper) <= r(Soft), "{structure:?}");

        if matches!(structure, CrossSection::Tridiagonal { .. }) {
            let wins = summary
                .outcomes
                .iter()
                .filter(|o| o.reports[2].spectral < o.reports[1].spectral)
                .count();
            assert!(
                wins >= 90,
                "hard beat the pilot in {wins} of 100 replications"
            );
        }
    }
}

#[test]
fn pilot_error_shrinks_with_constant_mean() {
    let mut errors = Vec::new();
    for n in [200, 800, 3200] {
        let mut model = SimModel::new(CrossSection::model_one(), n, 300, 0);
        model.mean_coords = 0;
        let summary = run_monte_carlo(&McConfig::new(model, 50, vec![Db], 500)).unwrap();
        errors.push(summary.row(Db).unwrap().mean.max);
    }
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
}

fn shifted_noise(seed: u64, delta: f64) -> TimeSeriesPanel<f64> {
    let (n, p) = (200, 50);
    let z = gen_series::<f64>(&SimModel::new(CrossSection::model_one(), n, p, seed))
        .unwrap()
        .z;
    TimeSeriesPanel::new(Matrix::from_fn(n, p, |i, j| {
        z.row(i)[j] + if i >= n / 2 { delta } else { 0.0 }
    }))
    .unwrap()
}

fn regularized_pilot(x: &TimeSeriesPanel<f64>) -> CovMatrix<f64> {
    let pilot = db_estimate(x, &DiffConfig::balanced(x.n(), x.p()).unwrap()).unwrap();
    soft_threshold(&pilot, 0.1).unwrap()
}

#[test]
fn null_scan_stays_below_the_shifted_peak() {
    let mut below = 0;
    for seed in 0..100 {
        let peak = |delta: f64| {
            let x = shifted_noise(seed, delta);
            let v = regularized_pilot(&x);
            let scan = cusum_scan(&x, &v, 0.05).unwrap();
            scan.path
                .iter()
                .map(|p| p.1)
                .fold(f64::NEG_INFINITY, f64::max)
        };
        if peak(0.0) < peak(5.0) {
            below += 1;
        }
    }
    assert!(below >= 95, "{below}");
}

#[test]
fn fixed_regularizers_locate_a_strong_shift() {
    for seed in 0..20 {
        let x = shifted_noise(seed, 5.0);
        let pilot = db_estimate(&x, &DiffConfig::balanced(200, 50).unwrap()).unwrap();
        let ks: Vec<usize> = [
            hard_threshold(&pilot, 0.2).unwrap(),
            soft_threshold(&pilot, 0.2).unwrap(),
            taper(&pilot, 4).unwrap(),
        ]
        .iter()
        .map(|v| cusum_scan(&x, v, 0.05).unwrap().k_hat)
        .collect();
        assert!(
            ks.iter().all(|&k| k.abs_diff(100) <= 2 && k == ks[0]),
            "{seed}: {ks:?}"
        );
    }
}
