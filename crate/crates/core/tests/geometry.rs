use approx::assert_relative_eq;
use mwu_chaos::dynamics::{map, MapParams, RateRule};
use mwu_chaos::geometry::*;
use mwu_chaos::{Error, Interval};

// f(x_min), f(x_max) from 40-digit evaluations
const PERPETUAL: [(f64, f64, f64, f64); 3] = [
    (25.0, 0.4, 1.993_844_656_184_287_3e-5, 0.997_049_544_106_831_4),
    (25.0, 0.7, 0.034_795_874_958_042_65, 0.999_998_363_322_687_3),
    (30.0, 0.4, 1.199_849_181_709_634e-6, 0.999_516_179_906_648_6),
];

#[test]
fn envelope_matches_reference() {
    for (a, b, lo, hi) in PERPETUAL {
        let e = envelope(&MapParams::new(a, b).unwrap()).unwrap();
        assert_relative_eq!(e.f_min, lo, max_relative = 1e-12);
        assert_relative_eq!(e.f_max, hi, max_relative = 1e-14);
        assert!(e.ordered);
    }
}

#[test]
fn envelope_needs_critical_points() {
    let p = MapParams::new(3.0, 0.4).unwrap();
    assert!(matches!(envelope(&p), Err(Error::NoCriticalPoints { .. })));
}

#[test]
fn perpetual_set_maps_onto_itself() {
    for (a, b) in [(25.0, 0.4), (25.0, 0.7)] {
        let r = check_perpetual(&MapParams::new(a, b).unwrap()).unwrap();
        assert!(r.forward_invariant && r.surjective);
        assert!(r.margin <= 1e-12);
    }
}

#[test]
fn image_of_monotone_piece_is_endpoint_image() {
    let p = MapParams::new(25.0, 0.4).unwrap();
    let i = Interval::new(0.2, 0.3);
    let img = interval_image(&i, &p).unwrap();
    assert_eq!(img, Interval::new(map(0.3, 25.0, 0.4), map(0.2, 25.0, 0.4)));
    assert_eq!(interval_image_n(&i, &p, 0).unwrap(), i);
    assert!(interval_image(&Interval::new(-0.1, 0.2), &p).is_err());
}

#[test]
fn fixed_absorption() {
    let p = MapParams::new(25.0, 0.4).unwrap();
    // [0.01, 0.02] already sits inside F(25) = [2.0e-5, 0.997]
    assert_eq!(absorption_time_fixed(&Interval::new(0.01, 0.02), &p, 10_000).unwrap(), 0);
    let n = absorption_time_fixed(&Interval::new(1e-9, 1e-8), &p, 10_000).unwrap();
    assert!(n > 0);
    let f = envelope(&p).unwrap().perpetual();
    assert!(interval_image_n(&Interval::new(1e-9, 1e-8), &p, n).unwrap().within(&f, SET_TOL));
    assert!(absorption_time_fixed(&Interval::new(0.0, 0.1), &p, 10).is_err());
}

#[test]
fn fixed_expansion() {
    let p = MapParams::new(25.0, 0.4).unwrap();
    let i = Interval::new(0.399, 0.401);
    let n = volume_expansion_fixed(&i, &p, 1000).unwrap();
    assert_eq!(n, 6);
    let f = envelope(&p).unwrap().perpetual();
    for k in n..=2 * n {
        assert!(interval_image_n(&i, &p, k).unwrap().hausdorff(&f) <= EQ_TOL);
    }
    assert!(volume_expansion_fixed(&Interval::new(0.1, 0.2), &p, 1000).is_err());
}

#[test]
fn delta_for_gaussian_rule() {
    let rule = RateRule::gaussian_bump(20.0, 30.0, 10.0).unwrap();
    let d = delta_set(&rule, 0.4, DELTA_GRID).unwrap();
    assert!(d.monotone);
    let (lo, hi) = (PERPETUAL[2].2, PERPETUAL[2].3);
    assert_relative_eq!(d.lo, lo, max_relative = 1e-12);
    assert_relative_eq!(d.hi, hi, max_relative = 1e-14);
    let c = delta_set(&RateRule::constant(25.0).unwrap(), 0.4, DELTA_GRID).unwrap();
    assert_eq!(c.interval(), envelope(&MapParams::new(25.0, 0.4).unwrap()).unwrap().perpetual());
    assert!(delta_set(&RateRule::gaussian_bump(3.0, 30.0, 10.0).unwrap(), 0.4, 11).is_err());
}

#[test]
fn adaptive_absorption_stays() {
    let rule = RateRule::gaussian_bump(20.0, 30.0, 10.0).unwrap();
    let r = absorption_time_adaptive(&Interval::new(0.05, 0.95), &rule, 0.4, 64, 20_000).unwrap();
    assert_eq!(r.samples, 64);
    assert_eq!(r.reentries, 0);
    assert!(r.n <= 100);
    let edge = r.delta.lo.min(1.0 - r.delta.hi);
    assert!(r.interiority >= edge - SET_TOL);
}

#[test]
fn adaptive_expansion() {
    let rule = RateRule::gaussian_bump(20.0, 30.0, 10.0).unwrap();
    let i = Interval::new(0.35, 0.45);
    let r = volume_expansion_adaptive(&i, &rule, 0.4, 0.5, 1 << 14, 5000).unwrap();
    assert_eq!(r.n, 13);
    assert_eq!(r.covers_amin, Some(true));
    assert!(volume_expansion_adaptive(&i, &rule, 0.4, 10.0, 1 << 14, 5000).is_err());
    // a constant rule targets F(a) itself
    let c = RateRule::constant(25.0).unwrap();
    let r = volume_expansion_adaptive(&i, &c, 0.4, 0.5, 1 << 14, 5000).unwrap();
    assert_eq!(r.target, envelope(&MapParams::new(25.0, 0.4).unwrap()).unwrap().perpetual());
}

#[test]
fn cover_test() {
    let t = Interval::new(0.0, 1.0);
    let dense = t.linspace(1000);
    assert!(sample_covers(&dense, &t));
    let holed: Vec<f64> = dense.iter().copied().filter(|&x| !(0.5..0.51).contains(&x)).collect();
    assert!(!sample_covers(&holed, &t));
    assert!(!sample_covers(&[], &t));
}

#[test]
fn thresholds_at_b_04() {
    let t = estimate_thresholds(0.4, 4.5, 40.0, 0.5).unwrap();
    let est = |th: Threshold| t.get(th).unwrap().estimate;
    // |ab² − ab + 1| > 1 exactly when a b (1 − b) > 2, i.e. a > 8.33 at b = 0.4
    assert_eq!(est(Threshold::KB), Some(8.5));
    assert_eq!(est(Threshold::AB), Some(16.0));
    assert_eq!(est(Threshold::UB), Some(27.0));
    assert_eq!(est(Threshold::DB), Some(27.0));
    assert!(t.entries.iter().all(|e| e.note.is_none()));
    let half = estimate_thresholds(0.5, 20.0, 22.0, 1.0).unwrap();
    assert!(half.get(Threshold::DB).unwrap().note.is_some());
    assert!(estimate_thresholds(0.4, 3.0, 10.0, 1.0).is_err());
}
