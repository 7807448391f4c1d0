use mwu_chaos::chaos::period2_points;
use mwu_chaos::dynamics::*;
use mwu_chaos::geometry::*;
use mwu_chaos::Interval;
use proptest::prelude::*;

fn equilibrium() -> impl Strategy<Value = f64> {
    0.05f64..0.95
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn conjugacy(x in 0.0f64..=1.0, a in 0.1f64..60.0, b in equilibrium()) {
        let lhs = map(x, a, b);
        let rhs = 1.0 - map(1.0 - x, a, 1.0 - b);
        prop_assert!((lhs - rhs).abs() <= 1e-12, "{lhs} vs {rhs}");
    }

    #[test]
    fn map_stays_in_unit_interval(x in 0.0f64..=1.0, a in 0.1f64..200.0, b in equilibrium()) {
        let y = map(x, a, b);
        prop_assert!((0.0..=1.0).contains(&y));
    }

    #[test]
    fn small_rates_are_monotone(x in 0.001f64..0.998, a in 0.1f64..4.0, b in equilibrium()) {
        prop_assert!(map(x + 1e-3, a, b) > map(x, a, b));
        prop_assert!(deriv(x, a, b) > 0.0);
    }

    #[test]
    fn derivative_matches_central_differences(x in 0.01f64..0.99, a in 0.5f64..30.0, b in equilibrium()) {
        let h = 1e-6;
        let fd = (map(x + h, a, b) - map(x - h, a, b)) / (2.0 * h);
        let d = deriv(x, a, b);
        prop_assert!((fd - d).abs() <= 1e-6 * d.abs().max(1.0), "{fd} vs {d}");
    }

    #[test]
    fn iteration_is_deterministic(x0 in 0.01f64..0.99, b in equilibrium()) {
        let rule = RateRule::gaussian_bump(20.0, 30.0, 10.0).unwrap();
        let s = iterate_adaptive(x0, &rule, b, 2000, 0).unwrap();
        let t = iterate_adaptive(x0, &rule, b, 2000, 0).unwrap();
        prop_assert_eq!(s, t);
    }

    #[test]
    fn closed_form_holds(x0 in 0.001f64..0.999, b in equilibrium(), amax in 5.0f64..40.0) {
        let rule = RateRule::gaussian_bump(1.0, amax, 10.0).unwrap();
        let t = iterate_adaptive(x0, &rule, b, 10_000, 0).unwrap();
        prop_assert!(closed_form_check(&t).unwrap() <= 1e-8);
    }

    #[test]
    fn rules_stay_in_bounds(r in -50.0f64..50.0, lo in 1.0f64..20.0, width in 0.0f64..20.0, k in 0.1f64..100.0) {
        let g = RateRule::gaussian_bump(lo, lo + width, k).unwrap();
        let v = g.g(r);
        prop_assert!(v >= lo && v <= lo + width);
        prop_assert_eq!(g.limit_rate(), lo + width);
        let t = RateRule::lookup_table(vec![(-1.0, lo), (0.0, lo + width), (2.0, lo + width / 2.0)]).unwrap();
        let v = t.g(r);
        prop_assert!(v >= t.a_min && v <= t.a_max);
    }

    #[test]
    fn interval_image_encloses_dense_samples(
        lo in 0.0f64..1.0,
        w in 0.0f64..1.0,
        a in 0.5f64..40.0,
        b in equilibrium(),
    ) {
        let hi = (lo + w).min(1.0);
        let i = Interval::new(lo, hi);
        let p = MapParams::new(a, b).unwrap();
        let img = interval_image(&i, &p).unwrap();
        let ys: Vec<f64> = i.linspace(100_000).into_iter().map(|x| map(x, a, b)).collect();
        let smin = ys.iter().copied().fold(f64::INFINITY, f64::min);
        let smax = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(img.lo <= smin && smax <= img.hi);
        // sampled extremes approach the exact ones at the sampling resolution
        let slope = ys.windows(2).map(|v| (v[1] - v[0]).abs()).fold(0.0, f64::max);
        prop_assert!(smin - img.lo <= 1e-10 + slope && img.hi - smax <= 1e-10 + slope);
    }

    #[test]
    fn perpetual_set_is_invariant(a in 16.0f64..40.0, b in 0.1f64..0.9) {
        let p = MapParams::new(a, b).unwrap();
        prop_assume!(envelope(&p).unwrap().ordered);
        let rep = check_perpetual(&p).unwrap();
        prop_assert!(rep.forward_invariant);
        prop_assert!(rep.margin <= 1e-12);
    }

    #[test]
    fn delta_is_forward_invariant(x0 in 0.05f64..0.95, b in 0.2f64..0.8) {
        let rule = RateRule::gaussian_bump(20.0, 30.0, 10.0).unwrap();
        let d = delta_set(&rule, b, 201).unwrap().interval();
        let mut st = AdaptiveState::new(x0, &rule);
        let mut inside = false;
        for _ in 0..5000 {
            let now = d.contains(st.share);
            prop_assert!(!inside || now, "left Δ at step {}", st.step);
            inside |= now;
            st.advance(&rule, b);
        }
        prop_assert!(inside);
    }

    #[test]
    fn period_two_pairs_are_symmetric(a in 5.0f64..100.0, b in equilibrium()) {
        let p = MapParams::new(a, b).unwrap();
        for (l, r) in period2_points(&p).unwrap() {
            prop_assert!((l + r - 2.0 * b).abs() <= 1e-10);
            prop_assert!(l < b && b < r);
        }
    }

    #[test]
    fn outside_points_are_pulled_in(t in 0.0f64..1.0, a in 16.0f64..40.0, b in 0.1f64..0.9) {
        let e = envelope(&MapParams::new(a, b).unwrap()).unwrap();
        prop_assume!(e.ordered);
        let x = t * e.f_min;
        if x > 0.0 {
            let y = map(x, a, b);
            prop_assert!(y > x && y <= e.f_max);
        }
        let x = e.f_max + t * (1.0 - e.f_max);
        if x < 1.0 && x > e.f_max {
            let y = map(x, a, b);
            prop_assert!(y < x && y >= e.f_min);
        }
    }
}
