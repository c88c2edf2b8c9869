mod common;

use lrcov::{
    db_estimate, default_bandwidth, frobenius_norm, hac_estimate, hard_threshold, induced_l1_norm,
    kernel_eval, mac_estimate, max_norm, obm_estimate, qs_estimate, soft_threshold, spectral_norm,
    taper, CovMatrix, CvPilots, CvPlan, DiffConfig, DiffRecipe, DiffSequence, KernelSpec,
    MacParams, Matrix, ThresholdMethod, TimeSeriesPanel,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn panel(seed: u64, n: usize, p: usize) -> TimeSeriesPanel<f64> {
    TimeSeriesPanel::new(common::random_panel(seed, n, p)).unwrap()
}

fn shifted(x: &TimeSeriesPanel<f64>, c: &[f64]) -> TimeSeriesPanel<f64> {
    let m = x.data();
    TimeSeriesPanel::new(Matrix::from_fn(m.rows(), m.cols(), |i, j| {
        m.row(i)[j] + c[j]
    }))
    .unwrap()
}

fn symmetric(seed: u64, p: usize) -> CovMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CovMatrix::new(common::random_symmetric(&mut rng, p)).unwrap()
}

fn exactly_symmetric(v: &CovMatrix<f64>) -> bool {
    v.values().is_symmetric(0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn estimators_ignore_constant_shifts(
        seed in any::<u64>(),
        n in 40usize..80,
        p in 1usize..6,
        c in proptest::collection::vec(-10.0f64..10.0, 6),
    ) {
        let x = panel(seed, n, p);
        let y = shifted(&x, &c[..p]);
        let cfg = DiffConfig::new(DiffSequence::default(), 2, 3, KernelSpec::quadratic()).unwrap();
        let mac = MacParams::with_bandwidth(3);
        let pairs = [
            (db_estimate(&x, &cfg).unwrap(), db_estimate(&y, &cfg).unwrap()),
            (hac_estimate(&x, KernelSpec::Bartlett, 5).unwrap(), hac_estimate(&y, KernelSpec::Bartlett, 5).unwrap()),
            (obm_estimate(&x, 4).unwrap(), obm_estimate(&y, 4).unwrap()),
            (qs_estimate(&x, 3).unwrap(), qs_estimate(&y, 3).unwrap()),
            (mac_estimate(&x, mac).unwrap(), mac_estimate(&y, mac).unwrap()),
        ];
        for (a, b) in &pairs {
            prop_assert!(exactly_symmetric(a) && exactly_symmetric(b));
            prop_assert!(a.values().max_abs_diff(b.values()).unwrap() < 1e-10);
        }
    }

    #[test]
    fn thresholding_properties(seed in any::<u64>(), p in 1usize..12, t1 in 0.0f64..2.0, dt in 0.0f64..1.0) {
        let v = symmetric(seed, p);
        let t2 = t1 + dt;
        let h1 = hard_threshold(&v, t1).unwrap();
        let h2 = hard_threshold(&v, t2).unwrap();
        let s1 = soft_threshold(&v, t1).unwrap();
        prop_assert!(h1.nnz() >= h2.nnz());
        prop_assert_eq!(&hard_threshold(&h1, t1).unwrap(), &h1);
        for out in [&h1, &h2, &s1] {
            prop_assert!(exactly_symmetric(out));
            prop_assert_eq!(out.diagonal(), v.diagonal());
        }
        for i in 0..p {
            for j in 0..p {
                if i == j {
                    continue;
                }
                let (orig, hard, soft) = (v.values().row(i)[j], h1.values().row(i)[j], s1.values().row(i)[j]);
                prop_assert!(soft.abs() <= hard.abs() && hard.abs() <= orig.abs());
            }
        }
    }

    #[test]
    fn taper_properties(seed in any::<u64>(), p in 1usize..14, k in 1usize..16) {
        let v = symmetric(seed, p);
        let t = taper(&v, k).unwrap();
        prop_assert!(exactly_symmetric(&t));
        prop_assert_eq!(t.diagonal(), v.diagonal());
        for i in 0..p {
            for j in 0..p {
                let x = t.values().row(i)[j];
                if i.abs_diff(j) >= k {
                    prop_assert_eq!(x, 0.0);
                } else {
                    prop_assert!(x.abs() <= v.values().row(i)[j].abs());
                }
            }
        }
    }

    #[test]
    fn norm_inequalities(seed in any::<u64>(), p in 1usize..20, c in -5.0f64..5.0) {
        let a = symmetric(seed, p).into_matrix();
        let b = symmetric(seed ^ 0x55, p).into_matrix();
        let slack = 1e-8;
        let (mx, sp, fr, l1) = (
            max_norm(&a),
            spectral_norm(&a).unwrap(),
            frobenius_norm(&a),
            induced_l1_norm(&a),
        );
        prop_assert!(mx <= sp + slack && sp <= fr + slack && fr <= p as f64 * mx + slack);
        prop_assert!(l1 + slack >= sp);

        let sum = a.add(&b).unwrap();
        prop_assert!(max_norm(&sum) <= max_norm(&a) + max_norm(&b) + slack);
        prop_assert!(frobenius_norm(&sum) <= frobenius_norm(&a) + frobenius_norm(&b) + slack);
        prop_assert!(induced_l1_norm(&sum) <= induced_l1_norm(&a) + induced_l1_norm(&b) + slack);
        prop_assert!(
            spectral_norm(&sum).unwrap() <= spectral_norm(&a).unwrap() + spectral_norm(&b).unwrap() + slack
        );

        let scaled = spectral_norm(&a.scaled(c)).unwrap();
        prop_assert!((scaled - c.abs() * sp).abs() <= 1e-8 * (c.abs() * sp).max(1e-300));
    }

    #[test]
    fn kernels_are_even(x in -20.0f64..20.0, q in 0.5f64..4.0) {
        for spec in [KernelSpec::TruncatedPolynomial { q }, KernelSpec::Bartlett, KernelSpec::QuadraticSpectral] {
            prop_assert_eq!(kernel_eval(spec, x).unwrap(), kernel_eval(spec, -x).unwrap());
        }
    }
}

#[test]
fn polynomial_kernel_order_bound() {
    for q in [1.0, 1.5, 2.0, 3.0] {
        let spec = KernelSpec::TruncatedPolynomial { q };
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            let k: f64 = kernel_eval(spec, x).unwrap();
            assert!((1.0 - k).abs() <= x.powf(q) + 1e-15, "q = {q}, x = {x}");
        }
    }
}

#[test]
fn default_bandwidth_monotone() {
    for p in [2, 10, 100, 1000] {
        let mut last = 0;
        for n in 38..3000 {
            let l = default_bandwidth(n, p).unwrap();
            assert!(l >= last);
            last = l;
        }
    }
    for n in [38, 200, 1600, 10_000] {
        let mut last = usize::MAX;
        for p in 2..2000 {
            let l = default_bandwidth(n, p).unwrap();
            assert!(l <= last);
            last = l;
        }
    }
}

#[test]
fn threshold_selection_is_scale_equivariant() {
    let base = common::random_panel(31, 240, 7);
    let x = TimeSeriesPanel::new(base.clone()).unwrap();
    let plan = CvPlan {
        repetitions: 9,
        ..CvPlan::with_seed(4)
    };
    let grid: Vec<f64> = (1..=15).map(|i| 0.02 * i as f64).collect();
    let plain = CvPilots::compute(
        &x,
        &DiffRecipe::default(),
        &CvPlan {
            lambda_grid: Some(grid.clone()),
            ..plan.clone()
        },
    )
    .unwrap();
    // powers of two scale every intermediate exactly
    for c in [0.5, 2.0, 4.0] {
        let y = TimeSeriesPanel::new(base.scaled(c)).unwrap();
        let scaled_grid: Vec<f64> = grid.iter().map(|g| g * c * c).collect();
        let scaled = CvPilots::compute(
            &y,
            &DiffRecipe::default(),
            &CvPlan {
                lambda_grid: Some(scaled_grid),
                ..plan.clone()
            },
        )
        .unwrap();
        for method in [ThresholdMethod::Hard, ThresholdMethod::Soft] {
            assert_eq!(
                scaled.select_threshold(method).selected,
                c * c * plain.select_threshold(method).selected
            );
        }
        assert_eq!(
            scaled.select_taper().selected,
            plain.select_taper().selected
        );
    }
}

#[test]
fn cv_selection_ignores_thread_count() {
    let x = TimeSeriesPanel::new(common::random_panel(2, 300, 9)).unwrap();
    let plan = CvPlan {
        repetitions: 10,
        ..CvPlan::with_seed(99)
    };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let cv = CvPilots::compute(&x, &DiffRecipe::default(), &plan).unwrap();
            (
                cv.select_threshold(ThresholdMethod::Hard),
                cv.select_threshold(ThresholdMethod::Soft),
                cv.select_taper(),
            )
        })
    };
    let one = run(1);
    for threads in [2, 4] {
        assert_eq!(run(threads), one);
    }
}
