use approx::assert_relative_eq;
use mwu_chaos::dynamics::*;
use mwu_chaos::Error;

// reference values from 40-digit evaluations of x / (x + (1 - x) e^{a(x - b)})
const ORACLE_MAP: [(f64, f64, f64, f64); 4] = [
    (0.5, 8.0, 0.4, 0.310_025_518_872_387_56),
    (0.3, 25.0, 0.4, 0.839_255_917_966_736_8),
    (0.9, 25.0, 0.7, 0.057_174_381_425_985_144),
    (1e-3, 30.0, 0.4, 0.993_714_754_036_053_8),
];

const ORACLE_DERIV: [(f64, f64, f64, f64); 3] = [
    (0.3, 25.0, 0.4, -2.730_228_781_092_017_5),
    (0.05, 8.0, 0.6, 2.001_889_066_958_487),
    (0.95, 30.0, 0.4, -1.160_349_564_342_332_8e-5),
];

#[test]
fn map_matches_high_precision_values() {
    for (x, a, b, want) in ORACLE_MAP {
        assert_relative_eq!(map(x, a, b), want, max_relative = 1e-14);
    }
}

#[test]
fn derivative_matches_high_precision_values() {
    for (x, a, b, want) in ORACLE_DERIV {
        assert_relative_eq!(deriv(x, a, b), want, max_relative = 1e-12);
    }
}

#[test]
fn derivative_at_equilibrium_is_exact() {
    for (a, b) in [(25.0, 0.4), (25.0, 0.5), (7.3, 0.11), (30.0, 0.9)] {
        let p = MapParams::new(a, b).unwrap();
        assert_eq!(mwu_derivative(b, &p), a * b * b - a * b + 1.0);
    }
}

#[test]
fn fixed_points_are_exact() {
    let p = MapParams::new(25.0, 0.4).unwrap();
    for x in [0.0, 0.4, 1.0] {
        assert_eq!(mwu_step(x, &p).unwrap(), x);
    }
}

#[test]
fn step_rejects_bad_shares() {
    let p = MapParams::new(25.0, 0.4).unwrap();
    assert!(matches!(mwu_step(-0.1, &p), Err(Error::Domain(_))));
    assert!(matches!(mwu_step(f64::NAN, &p), Err(Error::Domain(_))));
    assert!(MapParams::new(25.0, 1.0).is_err());
    assert!(MapParams::new(0.0, 0.5).is_err());
}

#[test]
fn extreme_arguments_stay_finite() {
    for x in [1e-300, 1e-12, 0.5, 1.0 - 1e-12] {
        let y = map(x, 1e4, 0.3);
        assert!(y.is_finite() && (0.0..=1.0).contains(&y));
        assert!(deriv(x, 1e4, 0.3).is_finite());
    }
}

#[test]
fn critical_points_closed_form() {
    let (lo, hi) = critical_points(8.0).unwrap();
    assert_relative_eq!(lo, 0.146_446_609_406_726_24, max_relative = 1e-14);
    assert_relative_eq!(hi, 0.853_553_390_593_273_8, max_relative = 1e-14);
    let (lo, hi) = critical_points(5.0).unwrap();
    assert_relative_eq!(lo, 0.276_393_202_250_021, max_relative = 1e-14);
    assert_relative_eq!(hi, 0.723_606_797_749_979, max_relative = 1e-14);
    assert!(matches!(critical_points(4.0), Err(Error::NoCriticalPoints { .. })));
    for a in [5.0, 8.0, 25.0] {
        let (lo, hi) = critical_points(a).unwrap();
        assert!(deriv(lo, a, 0.4).abs() < 1e-12);
        assert!(deriv(hi, a, 0.4).abs() < 1e-12);
    }
}

#[test]
fn normalize_game() {
    let spec = GameSpec { total_flow: 10.0, cost_coeff_1: 2.0, cost_coeff_2: 3.0, raw_rate: 0.5 };
    let p = normalize(&spec).unwrap();
    assert_relative_eq!(p.a, 1.0);
    assert_relative_eq!(p.b, 0.6);
    assert!(normalize(&GameSpec { raw_rate: 0.0, ..spec }).is_err());
}

#[test]
fn rate_rules() {
    let g = RateRule::gaussian_bump(20.0, 30.0, 10.0).unwrap();
    assert_eq!(g.limit_rate(), 30.0);
    assert_relative_eq!(g.g(0.1), 20.0 + 10.0 * (-0.1f64).exp());
    let t = RateRule::lookup_table(vec![(1.0, 5.0), (-1.0, 5.0), (0.0, 9.0)]).unwrap();
    assert_eq!((t.a_min, t.a_max, t.limit_rate()), (5.0, 9.0, 9.0));
    assert_eq!(t.g(0.5), 7.0);
    assert_eq!(t.g(-4.0), 5.0);
    assert!(RateRule::lookup_table(vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
    assert!(RateRule::gaussian_bump(30.0, 20.0, 1.0).is_err());
    assert!(RateRule::constant(25.0).unwrap().is_constant());
}

// x0 = 0.3 under g(r) = 20 + 10 exp(-10 r²), b = 0.4; 50-digit reference run
#[test]
fn adaptive_orbit_matches_reference() {
    let rule = RateRule::gaussian_bump(20.0, 30.0, 10.0).unwrap();
    let t = iterate_adaptive(0.3, &rule, 0.4, 11, 0).unwrap();
    let want = [
        (1, 0.895_921_011_780_036_8, 20.0, -3.0),
        (2, 4.238_452_985_867_316e-4, 20.0, 3.459_210_117_800_368),
        (5, 0.982_955_897_983_2, 20.000_669_162_555_69, -0.980_411_578_738_962_2),
        (10, 1.561_120_379_080_886_7e-4, 20.018_947_788_993_56, 0.791_748_263_216_061_4),
    ];
    for (n, x, a, r) in want {
        let rec = t.records[n];
        assert_eq!(rec.step, n);
        assert_relative_eq!(rec.share, x, max_relative = 1e-9);
        assert_relative_eq!(rec.rate, a, max_relative = 1e-12);
        assert_relative_eq!(rec.pseudo_regret, r, max_relative = 1e-10);
    }
}

#[test]
fn trace_rows_and_burn_in() {
    let p = MapParams::new(25.0, 0.4).unwrap();
    let t = iterate_fixed(0.3, &p, 1000, 0).unwrap();
    assert_eq!(t.records.len(), 1000);
    assert_eq!(t.records[0].share, 0.3);
    let tail = iterate_fixed(0.3, &p, 1000, 400).unwrap();
    assert_eq!(tail.records.len(), 600);
    assert_eq!(tail.records[0], t.records[400]);
    assert!(iterate_fixed(0.4, &p, 50, 0).unwrap().shares().all(|x| x == 0.4));
}

#[test]
fn adaptive_at_equilibrium_keeps_limit_rate() {
    let rule = RateRule::gaussian_bump(20.0, 30.0, 10.0).unwrap();
    let t = iterate_adaptive(0.4, &rule, 0.4, 500, 0).unwrap();
    assert!(t.records.iter().all(|r| r.share == 0.4 && r.rate == 30.0 && r.pseudo_regret == 0.0));
}

#[test]
fn compensated_sum_beats_naive() {
    let mut c = CompensatedSum::default();
    for v in [1.0, 1e100, 1.0, -1e100] {
        c.add(v);
    }
    assert_eq!(c.value(), 2.0);
}

#[test]
fn closed_form_tracks_long_orbits() {
    let rule = RateRule::gaussian_bump(20.0, 30.0, 10.0).unwrap();
    let t = iterate_adaptive(0.37, &rule, 0.4, 100_000, 0).unwrap();
    assert!(closed_form_check(&t).unwrap() <= 1e-8);
}
