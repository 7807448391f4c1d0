//! Finite-horizon checks of pseudo-regret decay, rate convergence, Cesàro
//! means and the gap to the limit map.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::{AdaptiveState, CompensatedSum, RateRule};
use crate::error::{domain, Result};
use crate::interval::Interval;

pub const DEFAULT_HORIZONS: [usize; 4] = [1_000, 10_000, 100_000, 1_000_000];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    PseudoRegret,
    CesaroMean,
    RateGap,
    StrongGap,
}

impl Quantity {
    pub fn name(&self) -> &'static str {
        match self {
            Quantity::PseudoRegret => "pseudo_regret",
            Quantity::CesaroMean => "cesaro_mean",
            Quantity::RateGap => "rate_gap",
            Quantity::StrongGap => "strong_gap",
        }
    }
}

/// Initializations: equispaced interior points followed by seeded uniform draws.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub interval: Interval,
    pub points: Vec<f64>,
    pub equispaced: usize,
    pub random: usize,
    pub seed: u64,
}

impl SampleSet {
    pub fn new(interval: Interval, equispaced: usize, random: usize, seed: u64) -> Result<Self> {
        let i = Interval::checked(interval.lo, interval.hi)?;
        let mut points: Vec<f64> = (0..equispaced)
            .map(|k| i.lo + i.diam() * (k + 1) as f64 / (equispaced + 1) as f64)
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        points.extend((0..random).map(|_| if i.diam() > 0.0 { rng.gen_range(i.lo..i.hi) } else { i.lo }));
        let set = SampleSet { interval: i, points, equispaced, random, seed };
        set.check()?;
        Ok(set)
    }

    /// 64 equispaced plus 64 random points.
    pub fn standard(interval: Interval, seed: u64) -> Result<Self> {
        SampleSet::new(interval, 64, 64, seed)
    }

    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        let lo = points.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = points.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let n = points.len();
        let set = SampleSet { interval: Interval::new(lo, hi), points, equispaced: n, random: 0, seed: 0 };
        set.check()?;
        Ok(set)
    }

    fn check(&self) -> Result<()> {
        match self.points.iter().find(|&&x| !(x > 0.0 && x < 1.0)) {
            Some(x) => domain(format!("sample {x} is not strictly interior")),
            None if self.points.is_empty() => domain("empty sample set"),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub quantity: Quantity,
    pub horizon: usize,
    pub per_sample: Vec<f64>,
    /// `max |value − reference|` over samples.
    pub sup_value: f64,
    pub reference: f64,
    /// Index of the sample attaining `sup_value`.
    pub argmax: usize,
    /// Samples violating `|S_n / n| ≤ −ln(δ²)/n` (pseudo-regret only).
    pub bound_violations: Option<usize>,
}

fn report(quantity: Quantity, horizon: usize, per_sample: Vec<f64>, reference: f64) -> ConvergenceReport {
    let (argmax, sup_value) = per_sample
        .iter()
        .map(|v| (v - reference).abs())
        .enumerate()
        .fold((0, 0.0), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc });
    ConvergenceReport { quantity, horizon, per_sample, sup_value, reference, argmax, bound_violations: None }
}

/// Per-horizon values of one orbit.
#[derive(Debug, Clone, Copy, Default)]
struct Snapshot {
    regret: f64,
    cesaro: f64,
    rate: f64,
    strong: f64,
    bound_ok: bool,
}

fn simulate(x0: f64, rule: &RateRule, b: f64, k: usize, horizons: &[usize]) -> Vec<Snapshot> {
    let a_star = rule.limit_rate();
    let last = horizons.iter().copied().max().unwrap_or(0);
    let mut st = AdaptiveState::new(x0, rule);
    let mut shares = CompensatedSum::default();
    let mut inner = x0.min(1.0 - x0);
    let mut out = vec![Snapshot::default(); horizons.len()];
    // predictions f^k(x_n, a*) waiting for step n + k
    let mut pending: Vec<(usize, usize, f64)> = Vec::new();
    for n in 0..=last + k {
        let x = st.share;
        inner = inner.min(x.min(1.0 - x));
        pending.retain(|&(slot, due, pred)| {
            if due == n {
                out[slot].strong = (x - pred).abs();
                false
            } else {
                true
            }
        });
        if n <= last {
            shares.add(x);
        }
        for (slot, &h) in horizons.iter().enumerate() {
            if h == n {
                let s_n = st.cum_weighted_regret;
                let bound = -(inner * inner).ln();
                let tol = 1e-9 * bound + 1e-12;
                out[slot].bound_ok = n == 0 || s_n.abs() <= bound + tol;
                out[slot].rate = st.rate;
                out[slot].cesaro = shares.value() / (n + 1) as f64;
                out[slot].regret = (s_n + st.rate * (x - b)) / (n + 1) as f64;
                pending.push((slot, n + k, st.fixed_ahead(a_star, b, k)));
            }
        }
        if n < last + k {
            st.advance(rule, b);
        }
    }
    out
}

/// All four reports for each horizon, from one joint simulation per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceSuite {
    pub pseudo_regret: Vec<ConvergenceReport>,
    pub rate_gap: Vec<ConvergenceReport>,
    pub cesaro_mean: Vec<ConvergenceReport>,
    pub strong_gap: Vec<ConvergenceReport>,
    pub k: usize,
}

impl ConvergenceSuite {
    /// `sup(h_{i+1}) / sup(h_i)` along the horizon ladder.
    pub fn regret_trend(&self) -> Vec<f64> {
        self.pseudo_regret.windows(2).map(|w| w[1].sup_value / w[0].sup_value).collect()
    }

    /// Empirical `strong_gap / rate_gap` per horizon (NaN where the rate gap vanishes).
    pub fn gap_ratio(&self) -> Vec<f64> {
        self.strong_gap
            .iter()
            .zip(&self.rate_gap)
            .map(|(s, r)| if r.sup_value > 0.0 { s.sup_value / r.sup_value } else { f64::NAN })
            .collect()
    }
}

pub fn convergence_suite(
    samples: &SampleSet,
    rule: &RateRule,
    b: f64,
    k: usize,
    horizons: &[usize],
) -> Result<ConvergenceSuite> {
    samples.check()?;
    if k == 0 {
        return domain("strong-convergence lag k must be at least 1");
    }
    if !(b > 0.0 && b < 1.0) {
        return domain(format!("b = {b} outside (0, 1)"));
    }
    let runs: Vec<Vec<Snapshot>> =
        samples.points.par_iter().map(|&x0| simulate(x0, rule, b, k, horizons)).collect();
    let col = |slot: usize, f: fn(&Snapshot) -> f64| runs.iter().map(|r| f(&r[slot])).collect::<Vec<f64>>();
    let mut suite = ConvergenceSuite { pseudo_regret: vec![], rate_gap: vec![], cesaro_mean: vec![], strong_gap: vec![], k };
    for (slot, &h) in horizons.iter().enumerate() {
        let mut pr = report(Quantity::PseudoRegret, h, col(slot, |s| s.regret), 0.0);
        pr.bound_violations = Some(runs.iter().filter(|r| !r[slot].bound_ok).count());
        suite.pseudo_regret.push(pr);
        suite.rate_gap.push(report(Quantity::RateGap, h, col(slot, |s| s.rate), rule.limit_rate()));
        suite.cesaro_mean.push(report(Quantity::CesaroMean, h, col(slot, |s| s.cesaro), b));
        suite.strong_gap.push(report(Quantity::StrongGap, h, col(slot, |s| s.strong), 0.0));
    }
    Ok(suite)
}

pub fn pseudo_regret_decay(samples: &SampleSet, rule: &RateRule, b: f64, horizons: &[usize]) -> Result<Vec<ConvergenceReport>> {
    Ok(convergence_suite(samples, rule, b, 1, horizons)?.pseudo_regret)
}

pub fn rate_uniform_convergence(samples: &SampleSet, rule: &RateRule, b: f64, horizons: &[usize]) -> Result<Vec<ConvergenceReport>> {
    Ok(convergence_suite(samples, rule, b, 1, horizons)?.rate_gap)
}

pub fn cesaro_mean(samples: &SampleSet, rule: &RateRule, b: f64, horizons: &[usize]) -> Result<Vec<ConvergenceReport>> {
    Ok(convergence_suite(samples, rule, b, 1, horizons)?.cesaro_mean)
}

pub fn strong_convergence_gap(
    samples: &SampleSet,
    rule: &RateRule,
    b: f64,
    k: usize,
    horizons: &[usize],
) -> Result<Vec<ConvergenceReport>> {
    Ok(convergence_suite(samples, rule, b, k, horizons)?.strong_gap)
}
