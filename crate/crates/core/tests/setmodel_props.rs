use espart::setmodel::{CoverSpec, GeometricTail, IntervalUnion};
use proptest::prelude::*;

fn raw_intervals() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-3.0f64..3.0, 0.0f64..1.5), 0..8)
        .prop_map(|v| v.into_iter().map(|(a, len)| (a, a + len)).collect())
}

fn cover() -> impl Strategy<Value = CoverSpec> {
    (
        prop::collection::vec(0.001f64..0.2, 1..10),
        prop::option::of((0.01f64..0.5, 0.1f64..0.6)),
        0usize..4,
        0.3f64..0.9,
    )
        .prop_filter_map("invalid cover", |(mut lengths, tail, z, alpha)| {
            lengths.sort_by(|a, b| b.total_cmp(a));
            let last = *lengths.last().unwrap();
            let tail = tail.map(|(frac, rho)| {
                let n0 = lengths.len() + 1;
                // first tail term equals frac·last
                let c = frac * last / rho.powi(n0 as i32);
                GeometricTail { c, rho, from_n: n0 }
            });
            let n = lengths.len();
            let centers = Some((0..n).map(|i| i as f64 / n as f64).collect());
            CoverSpec::new(lengths, tail, centers, z, alpha).ok()
        })
}

proptest! {
    #[test]
    fn normalize_is_idempotent(raw in raw_intervals()) {
        let u = IntervalUnion::normalize(&raw).unwrap();
        let again = IntervalUnion::normalize(u.intervals()).unwrap();
        prop_assert_eq!(&again, &u);
        for w in u.intervals().windows(2) {
            prop_assert!(w[0].1 < w[1].0);
        }
        for &(a, b) in u.intervals() {
            prop_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b) && a < b);
        }
    }

    #[test]
    fn measure_plus_complement_is_one(raw in raw_intervals()) {
        let u = IntervalUnion::normalize(&raw).unwrap();
        let c = u.complement();
        prop_assert!((u.measure() + c.measure() - 1.0).abs() < 1e-12);
        prop_assert!(u.measure() <= 1.0 + 1e-12);
    }

    #[test]
    fn union_is_subadditive(a in raw_intervals(), b in raw_intervals()) {
        let u = IntervalUnion::normalize(&a).unwrap();
        let v = IntervalUnion::normalize(&b).unwrap();
        let w = u.union(&v);
        prop_assert!(w.measure() <= u.measure() + v.measure() + 1e-12);
        prop_assert!(w.measure() + 1e-12 >= u.measure().max(v.measure()));
        prop_assert!(u.is_subset_of(&w, 1e-12));
    }

    #[test]
    fn membership_matches_complement(raw in raw_intervals(), x in 0.0f64..1.0) {
        let u = IntervalUnion::normalize(&raw).unwrap();
        let c = u.complement();
        // boundary points belong to both closed sets
        prop_assert!(u.contains(x) || c.contains(x));
    }

    #[test]
    fn cost_is_nonincreasing_in_alpha(c in cover(), d in 0.01f64..0.09) {
        let lo = c.cover_cost().unwrap().total;
        let mut hi = c.clone();
        hi.alpha = (c.alpha + d).min(0.99);
        let hi_cost = hi.cover_cost().unwrap().total;
        prop_assert!(hi_cost <= lo + 1e-12);
    }

    #[test]
    fn sum_of_lengths_bounds_realized_measure(c in cover()) {
        let n = c.explicit_len();
        let u = c.realize(n).unwrap();
        prop_assert!(u.measure() <= c.sum_lengths() + 1e-12);
        prop_assert!(u.measure() <= c.head_sum(n) + 1e-12);
    }

    #[test]
    fn cost_dominates_sum_of_lengths(c in cover()) {
        // ℓ ≤ ℓ^α for ℓ ≤ 1
        prop_assert!(c.sum_lengths() <= c.cover_cost().unwrap().total + 1e-12);
    }
}

#[test]
fn quarter_lengths_closed_forms() {
    let c = CoverSpec::new(
        vec![],
        Some(GeometricTail {
            c: 1.0 / 16.0,
            rho: 0.25,
            from_n: 1,
        }),
        None,
        0,
        0.5,
    )
    .unwrap();
    assert!((c.cover_cost().unwrap().total - 0.25).abs() < 1e-15);
    assert!((c.sum_lengths() - 1.0 / 48.0).abs() < 1e-15);
    let brute: f64 = (1..=60).map(|n| 4f64.powi(-(n + 2))).sum();
    assert!((c.sum_lengths() - brute).abs() < 1e-15);
}
