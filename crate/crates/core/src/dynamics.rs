//! The MWU map on the route-1 share, its derivative, and orbit iteration
//! for fixed and pseudo-regret driven learning rates.

use crate::error::{domain, Error, Result};

const EXP_CLAMP: f64 = 709.0;

/// Raw game parameters of a two-route nonatomic linear congestion game.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameSpec {
    /// N
    pub total_flow: f64,
    /// γ, cost slope of route 1
    pub cost_coeff_1: f64,
    /// δ, cost slope of route 2
    pub cost_coeff_2: f64,
    /// η
    pub raw_rate: f64,
}

/// Normalized parameters `(a, b)` of the one-dimensional map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapParams {
    pub a: f64,
    pub b: f64,
}

impl MapParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return domain(format!("rate a = {a} must be positive and finite"));
        }
        if !(b > 0.0 && b < 1.0) {
            return domain(format!("equilibrium b = {b} must lie in (0, 1)"));
        }
        Ok(MapParams { a, b })
    }

    /// Parameters of the conjugate system under `x -> 1 - x`.
    pub fn mirrored(&self) -> MapParams {
        MapParams { a: self.a, b: 1.0 - self.b }
    }
}

pub fn normalize(spec: &GameSpec) -> Result<MapParams> {
    let GameSpec { total_flow: n, cost_coeff_1: g, cost_coeff_2: d, raw_rate: eta } = *spec;
    for (name, v) in [("N", n), ("gamma", g), ("delta", d), ("eta", eta)] {
        if !(v > 0.0) || !v.is_finite() {
            return domain(format!("{name} = {v} must be positive and finite"));
        }
    }
    MapParams::new(n * eta / (d + g), d / (d + g))
}

#[inline]
pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[inline]
fn logit_arg(x: f64, a: f64, b: f64) -> f64 {
    (x.ln() - (-x).ln_1p() - a * (x - b)).clamp(-EXP_CLAMP, EXP_CLAMP)
}

/// `f(x, a, b) = x / (x + (1 - x) e^{a(x - b)})` evaluated in logit form.
/// No argument checks; `0`, `1` and `b` are returned unchanged.
#[inline]
pub fn map(x: f64, a: f64, b: f64) -> f64 {
    if x == 0.0 || x == 1.0 || x == b {
        return x;
    }
    sigmoid(logit_arg(x, a, b))
}

/// `f^n(x)` at a fixed rate.
pub fn map_n(mut x: f64, a: f64, b: f64, n: usize) -> f64 {
    for _ in 0..n {
        x = map(x, a, b);
    }
    x
}

/// Derivative of `map` in `x`.
pub fn deriv(x: f64, a: f64, b: f64) -> f64 {
    if x == b {
        return a * b * b - a * b + 1.0;
    }
    if x == 0.0 {
        return (a * b).min(EXP_CLAMP).exp();
    }
    if x == 1.0 {
        return (a * (1.0 - b)).min(EXP_CLAMP).exp();
    }
    let z = logit_arg(x, a, b);
    let q = a * x * x - a * x + 1.0;
    q * (sigmoid(z) * sigmoid(-z)) / (x * (1.0 - x))
}

fn check_share(x: f64) -> Result<()> {
    if x.is_nan() {
        return domain("share is NaN");
    }
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("share {x} outside [0, 1]"));
    }
    Ok(())
}

pub fn mwu_step(x: f64, p: &MapParams) -> Result<f64> {
    check_share(x)?;
    Ok(map(x, p.a, p.b))
}

pub fn mwu_derivative(x: f64, p: &MapParams) -> f64 {
    deriv(x, p.a, p.b)
}

/// `(x_max, x_min)`: local maximum and local minimum of the map, `1/2 ∓ sqrt(1/4 - 1/a)`.
pub fn critical_points(a: f64) -> Result<(f64, f64)> {
    if !(a > 4.0) {
        return Err(Error::NoCriticalPoints { a });
    }
    let r = (0.25 - 1.0 / a).sqrt();
    Ok((0.5 - r, 0.5 + r))
}

#[derive(Debug, Clone, PartialEq)]
pub enum RuleKind {
    Constant,
    GaussianBump { sharpness: f64 },
    /// Piecewise-linear through `(r, a)` knots, constant outside the knot range.
    LookupTable(Vec<(f64, f64)>),
}

/// Learning-rate rule `a_n = g(r_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRule {
    pub a_min: f64,
    pub a_max: f64,
    pub kind: RuleKind,
}

impl RateRule {
    pub fn constant(a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return domain(format!("constant rate {a} must be positive"));
        }
        Ok(RateRule { a_min: a, a_max: a, kind: RuleKind::Constant })
    }

    /// `g(r) = a_min + (a_max - a_min) exp(-κ r²)`.
    pub fn gaussian_bump(a_min: f64, a_max: f64, sharpness: f64) -> Result<Self> {
        if !(a_min > 0.0) || !(a_max >= a_min) || !a_max.is_finite() {
            return domain(format!("need 0 < a_min <= a_max, got [{a_min}, {a_max}]"));
        }
        if !(sharpness > 0.0) || !sharpness.is_finite() {
            return domain(format!("sharpness {sharpness} must be positive"));
        }
        Ok(RateRule { a_min, a_max, kind: RuleKind::GaussianBump { sharpness } })
    }

    pub fn lookup_table(mut knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return domain("lookup table needs at least one knot");
        }
        knots.sort_by(|p, q| p.0.total_cmp(&q.0));
        if knots.windows(2).any(|w| w[0].0 == w[1].0) {
            return domain("lookup table has repeated r values");
        }
        if knots.iter().any(|k| !k.0.is_finite() || !(k.1 > 0.0) || !k.1.is_finite()) {
            return domain("lookup table needs finite r and positive finite rates");
        }
        let a_min = knots.iter().map(|k| k.1).fold(f64::INFINITY, f64::min);
        let a_max = knots.iter().map(|k| k.1).fold(f64::NEG_INFINITY, f64::max);
        Ok(RateRule { a_min, a_max, kind: RuleKind::LookupTable(knots) })
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, RuleKind::Constant)
    }

    pub fn g(&self, r: f64) -> f64 {
        match &self.kind {
            RuleKind::Constant => self.a_max,
            RuleKind::GaussianBump { sharpness } => {
                self.a_min + (self.a_max - self.a_min) * (-sharpness * r * r).exp()
            }
            RuleKind::LookupTable(k) => {
                if r <= k[0].0 {
                    return k[0].1;
                }
                let last = k[k.len() - 1];
                if r >= last.0 {
                    return last.1;
                }
                let i = k.partition_point(|p| p.0 <= r);
                let (r0, a0) = k[i - 1];
                let (r1, a1) = k[i];
                let t = (r - r0) / (r1 - r0);
                (a0 + t * (a1 - a0)).clamp(a0.min(a1), a0.max(a1))
            }
        }
    }

    /// `a* = g(0)`.
    pub fn limit_rate(&self) -> f64 {
        self.g(0.0)
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// State `(n, x_n, S_n, r_n, a_n)` of the adaptive system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveState {
    pub step: usize,
    pub share: f64,
    pub cum_weighted_regret: f64,
    pub pseudo_regret: f64,
    pub rate: f64,
    acc: CompensatedSum,
    /// `ln(x_n / (1 − x_n))`, carried alongside the share so that shares
    /// within an ulp of 0 or 1 keep their full relative precision.
    logit: f64,
}

impl AdaptiveState {
    pub fn new(x0: f64, rule: &RateRule) -> Self {
        AdaptiveState {
            step: 0,
            share: x0,
            cum_weighted_regret: 0.0,
            pseudo_regret: 0.0,
            rate: rule.g(0.0),
            acc: CompensatedSum::default(),
            logit: x0.ln() - (-x0).ln_1p(),
        }
    }

    #[inline]
    pub fn advance(&mut self, rule: &RateRule, b: f64) {
        let d = self.rate * (self.share - b);
        self.acc.add(d);
        (self.share, self.logit) = logit_step(self.share, self.logit, d);
        self.step += 1;
        self.cum_weighted_regret = self.acc.value();
        self.pseudo_regret = self.cum_weighted_regret / self.step as f64;
        self.rate = rule.g(self.pseudo_regret);
    }
}

#[inline]
fn logit_step(x: f64, l: f64, d: f64) -> (f64, f64) {
    if d == 0.0 {
        return (x, l);
    }
    let l = l - d;
    (sigmoid(l), l)
}

impl AdaptiveState {
    /// Share after `k` further steps at the fixed rate `a`, using the same
    /// arithmetic as [`AdaptiveState::advance`].
    pub fn fixed_ahead(&self, a: f64, b: f64, k: usize) -> f64 {
        let (mut x, mut l) = (self.share, self.logit);
        for _ in 0..k {
            (x, l) = logit_step(x, l, a * (x - b));
        }
        x
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceParams {
    Fixed(MapParams),
    Adaptive { rule: RateRule, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub step: usize,
    pub share: f64,
    pub rate: f64,
    pub pseudo_regret: f64,
    /// `S_n`, kept for the closed-form check.
    pub cum_weighted_regret: f64,
}

/// Orbit records for steps `burn_in..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitTrace {
    pub params: TraceParams,
    pub initial_share: f64,
    pub burn_in: usize,
    pub records: Vec<Record>,
}

impl OrbitTrace {
    pub fn shares(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.share)
    }

    pub fn last(&self) -> Option<&Record> {
        self.records.last()
    }
}

fn run(x0: f64, rule: &RateRule, b: f64, n: usize, burn_in: usize) -> Vec<Record> {
    let mut st = AdaptiveState::new(x0, rule);
    let mut out = Vec::with_capacity(n.saturating_sub(burn_in));
    for i in 0..n {
        if i >= burn_in {
            out.push(Record {
                step: st.step,
                share: st.share,
                rate: st.rate,
                pseudo_regret: st.pseudo_regret,
                cum_weighted_regret: st.cum_weighted_regret,
            });
        }
        st.advance(rule, b);
    }
    out
}

pub fn iterate_fixed(x0: f64, p: &MapParams, n: usize, burn_in: usize) -> Result<OrbitTrace> {
    check_share(x0)?;
    let rule = RateRule::constant(p.a)?;
    Ok(OrbitTrace {
        params: TraceParams::Fixed(*p),
        initial_share: x0,
        burn_in,
        records: run(x0, &rule, p.b, n, burn_in),
    })
}

pub fn iterate_adaptive(
    x0: f64,
    rule: &RateRule,
    b: f64,
    n: usize,
    burn_in: usize,
) -> Result<OrbitTrace> {
    check_share(x0)?;
    MapParams::new(rule.a_min, b)?;
    Ok(OrbitTrace {
        params: TraceParams::Adaptive { rule: rule.clone(), b },
        initial_share: x0,
        burn_in,
        records: run(x0, rule, b, n, burn_in),
    })
}

/// Max over records of `|x_n - x0 / (x0 + (1 - x0) e^{S_n})|`.
pub fn closed_form_check(trace: &OrbitTrace) -> Result<f64> {
    let x0 = trace.initial_share;
    if !(x0 > 0.0 && x0 < 1.0) {
        return domain(format!("closed form needs an interior start, got {x0}"));
    }
    let l0 = x0.ln() - (-x0).ln_1p();
    Ok(trace
        .records
        .iter()
        .map(|r| (r.share - sigmoid(l0 - r.cum_weighted_regret)).abs())
        .fold(0.0, f64::max))
}
