use mwu_chaos::diagnostics::*;
use mwu_chaos::dynamics::RateRule;
use mwu_chaos::Interval;

const HORIZONS: [usize; 3] = [1_000, 10_000, 100_000];

fn bump() -> RateRule {
    RateRule::gaussian_bump(20.0, 30.0, 10.0).unwrap()
}

#[test]
fn equilibrium_start_is_exact() {
    let s = SampleSet::from_points(vec![0.4]).unwrap();
    let suite = convergence_suite(&s, &bump(), 0.4, 2, &HORIZONS).unwrap();
    for i in 0..HORIZONS.len() {
        assert_eq!(suite.pseudo_regret[i].sup_value, 0.0);
        assert_eq!(suite.rate_gap[i].sup_value, 0.0);
        assert_eq!(suite.cesaro_mean[i].per_sample[0], 0.4);
        assert_eq!(suite.strong_gap[i].sup_value, 0.0);
    }
}

#[test]
fn constant_rule_has_no_rate_or_strong_gap() {
    let s = SampleSet::standard(Interval::new(0.1, 0.9), 3).unwrap();
    let rule = RateRule::constant(25.0).unwrap();
    let suite = convergence_suite(&s, &rule, 0.4, 3, &HORIZONS).unwrap();
    assert!(suite.rate_gap.iter().all(|r| r.sup_value == 0.0));
    assert!(suite.strong_gap.iter().all(|r| r.sup_value == 0.0));
    // the fixed-rate Cesàro mean still settles at b
    assert!(suite.cesaro_mean[2].sup_value < 1e-2);
}

#[test]
fn regret_decays_like_one_over_n() {
    let s = SampleSet::standard(Interval::new(0.1, 0.9), 11).unwrap();
    let suite = convergence_suite(&s, &bump(), 0.4, 2, &HORIZONS).unwrap();
    for r in &suite.pseudo_regret {
        assert_eq!(r.bound_violations, Some(0));
        assert_eq!(r.per_sample.len(), 128);
    }
    for ratio in suite.regret_trend() {
        assert!(ratio < 0.2, "{ratio}");
    }
    let last = HORIZONS.len() - 1;
    assert!(suite.pseudo_regret[last].sup_value < 1e-3);
    assert!(suite.rate_gap[last].sup_value < 1e-3);
    assert!(suite.cesaro_mean[last].sup_value < 1e-3);
    assert!(suite.gap_ratio().iter().all(|r| r.is_finite()));
}

#[test]
fn convergence_holds_at_one_half() {
    let s = SampleSet::standard(Interval::new(0.1, 0.9), 5).unwrap();
    let suite = convergence_suite(&s, &bump(), 0.5, 2, &HORIZONS).unwrap();
    let last = HORIZONS.len() - 1;
    assert!(suite.pseudo_regret[last].sup_value < 1e-3);
    assert!(suite.cesaro_mean[last].sup_value < 1e-3);
    assert!(suite.rate_gap[last].sup_value < 1e-3);
    assert!(suite.pseudo_regret.iter().all(|r| r.bound_violations == Some(0)));
}

#[test]
fn sup_and_argmax_agree() {
    let s = SampleSet::new(Interval::new(0.2, 0.8), 8, 8, 1).unwrap();
    let r = &cesaro_mean(&s, &bump(), 0.4, &[5_000]).unwrap()[0];
    let worst = (r.per_sample[r.argmax] - r.reference).abs();
    assert_eq!(worst, r.sup_value);
    assert!(r.per_sample.iter().all(|v| (v - r.reference).abs() <= r.sup_value));
}

#[test]
fn sample_sets_are_reproducible() {
    let a = SampleSet::standard(Interval::new(0.1, 0.9), 42).unwrap();
    let b = SampleSet::standard(Interval::new(0.1, 0.9), 42).unwrap();
    let c = SampleSet::standard(Interval::new(0.1, 0.9), 43).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.points, c.points);
    assert_eq!(a.points.len(), 128);
    assert!(a.points.iter().all(|&x| (0.1..0.9).contains(&x)));
}

#[test]
fn boundary_samples_are_rejected() {
    assert!(SampleSet::from_points(vec![0.0, 0.5]).is_err());
    assert!(SampleSet::new(Interval::new(0.0, 1.0), 1, 0, 0).is_ok());
    assert!(SampleSet::new(Interval::new(0.5, 1.0), 0, 4, 0).is_ok());
    assert!(SampleSet::from_points(vec![]).is_err());
    let s = SampleSet::from_points(vec![0.3]).unwrap();
    assert!(strong_convergence_gap(&s, &bump(), 0.4, 0, &HORIZONS).is_err());
}
