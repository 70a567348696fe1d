mod support;

use espart::pointset::PointSetWindow;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{brute_count, brute_max_count};

fn window() -> impl Strategy<Value = PointSetWindow> {
    prop::collection::vec(-50.0f64..50.0, 1..40)
        .prop_filter_map("degenerate", |v| PointSetWindow::from_unsorted(v).ok())
}

#[test]
fn counts_match_brute_force_on_1000_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let n = rng.random_range(1..60);
        let pts: Vec<f64> = (0..n).map(|_| rng.random_range(-30.0..30.0)).collect();
        let w = PointSetWindow::from_unsorted(pts).unwrap();
        let x = rng.random_range(-35.0..35.0);
        let h = rng.random_range(0.0..20.0);
        assert_eq!(w.count_in_cube(x, h), brute_count(w.points(), x, h));
        assert_eq!(w.max_count(h), brute_max_count(w.points(), h));
    }
}

proptest! {
    #[test]
    fn max_count_is_monotone(w in window(), h in 0.0f64..30.0, dh in 0.0f64..10.0) {
        prop_assert!(w.max_count(h) <= w.max_count(h + dh));
        if let Some(lo) = w.min_count(h) {
            prop_assert!(lo <= w.max_count(h));
        }
    }

    #[test]
    fn breakpoints_are_exact_steps(w in window()) {
        let b = w.count_breakpoints();
        prop_assert_eq!(b.len(), w.len());
        prop_assert_eq!(b[0], 0.0);
        for (k, &r) in b.iter().enumerate() {
            prop_assert!(w.max_count(r) > k);
            if r > 0.0 {
                prop_assert!(w.max_count(r * (1.0 - 1e-12)) <= k);
            }
        }
    }

    #[test]
    fn d_plus_scales_with_exponent(w in window(), alpha in 0.0f64..1.0, r in 0.5f64..20.0) {
        let d0 = w.d_plus_profile(0.0, r);
        let da = w.d_plus_profile(alpha, r);
        prop_assert!((da * r.powf(alpha) - d0).abs() <= 1e-9 * d0.max(1.0));
        prop_assert_eq!(d0, w.max_count(r) as f64);
    }

    #[test]
    fn dilation_rescales_counts(w in window(), s in 0.1f64..10.0, h in 0.0f64..20.0) {
        let scaled = PointSetWindow::new(w.points().iter().map(|p| p * s).collect()).unwrap();
        // compare away from ties at breakpoints
        let b = w.count_breakpoints();
        prop_assume!(b.iter().all(|&r| (r - h).abs() > 1e-9 * (1.0 + h)));
        prop_assert_eq!(scaled.max_count(s * h), w.max_count(h));
    }

    #[test]
    fn subsamples_partition_the_window(w in window(), n in 1usize..7) {
        let mut all: Vec<f64> = Vec::new();
        for j in 1..=n {
            let s = w.subsample(n, j).unwrap();
            all.extend_from_slice(s.points());
            let anchor = w.anchor() as i64;
            for &p in s.points() {
                let pos = w.points().iter().position(|&q| q == p).unwrap() as i64;
                prop_assert_eq!((pos - anchor).rem_euclid(n as i64), (j % n) as i64);
            }
        }
        all.sort_by(f64::total_cmp);
        prop_assert_eq!(all.as_slice(), w.points());
    }

    #[test]
    fn subsample_separation_dominates(w in window(), n in 1usize..7, j in 1usize..7) {
        prop_assume!(j <= n);
        let s = w.subsample(n, j).unwrap();
        if let (Ok(ds), Ok(dw)) = (s.separation(), w.separation()) {
            prop_assert!(ds >= n as f64 * dw - 1e-9);
        }
    }
}

#[test]
fn integer_window_densities() {
    let w = PointSetWindow::new((-500..=500).map(f64::from).collect()).unwrap();
    // Q_h has length 2h, so integer density tends to 2
    let grid = espart::pointset::geometric_grid(10.0, 200.0, 12);
    let d = w.density_estimate(1.0, &grid).unwrap();
    assert!(
        (d.d_plus_estimate - 2.0).abs() < 0.05,
        "{}",
        d.d_plus_estimate
    );
    assert!(
        (d.d_minus_estimate - 2.0).abs() < 0.1,
        "{}",
        d.d_minus_estimate
    );
    let dim = w
        .dim_estimate(&[], &espart::pointset::geometric_grid(10.0, 50.0, 12))
        .unwrap();
    assert!(dim.dim_plus > 0.95, "{}", dim.dim_plus);
}

#[test]
fn cube_dimension_is_about_a_third() {
    let w = PointSetWindow::new((-60i64..=60).map(|n| (n * n * n) as f64).collect()).unwrap();
    let dim = w.dim_estimate(&[], &w.default_scale_grid(24)).unwrap();
    assert!((dim.dim_plus - 1.0 / 3.0).abs() < 0.1, "{}", dim.dim_plus);
}

#[test]
fn single_point_window() {
    let w = PointSetWindow::new(vec![3.0]).unwrap();
    assert_eq!(w.discreteness_profile(1.0), (1, 0));
    let d = w.density_estimate(1.0, &[1.0]).unwrap();
    assert_eq!(d.d_minus_estimate, 0.0);
    assert!(d.truncated);
}
