//! Exact interval images, the perpetual set F(a), the adaptive absorbing set Δ,
//! absorption and volume-expansion times, and empirical threshold brackets.

use rayon::prelude::*;

use crate::chaos::{build_turbulent_pair, period2_points, period3_find};
use crate::dynamics::{critical_points, deriv, map, AdaptiveState, MapParams, RateRule};
use crate::error::{domain, Error, Result};
use crate::interval::Interval;

/// Tolerance for set inclusions between exactly propagated intervals.
pub const SET_TOL: f64 = 1e-12;
/// Hausdorff tolerance for "image equals F(a)".
pub const EQ_TOL: f64 = 1e-9;

/// Image of `i` without argument checks. `crit` holds `(x_max, x_min)` when `a > 4`.
#[inline]
pub(crate) fn image_raw(i: Interval, a: f64, b: f64, crit: Option<(f64, f64)>) -> Interval {
    let (mut lo, mut hi) = {
        let (u, v) = (map(i.lo, a, b), map(i.hi, a, b));
        (u.min(v), u.max(v))
    };
    if let Some((xa, xb)) = crit {
        for c in [xa, xb] {
            if i.contains(c) {
                let y = map(c, a, b);
                lo = lo.min(y);
                hi = hi.max(y);
            }
        }
    }
    Interval::new(lo, hi)
}

pub(crate) fn image_n_raw(mut i: Interval, a: f64, b: f64, n: usize) -> Interval {
    let crit = critical_points(a).ok();
    for _ in 0..n {
        i = image_raw(i, a, b, crit);
    }
    i
}

fn check_unit(i: &Interval) -> Result<()> {
    Interval::checked(i.lo, i.hi)?;
    if i.lo < 0.0 || i.hi > 1.0 {
        return domain(format!("interval {i} not inside [0, 1]"));
    }
    Ok(())
}

fn check_strict_interior(i: &Interval) -> Result<()> {
    check_unit(i)?;
    if i.lo <= 0.0 || i.hi >= 1.0 {
        return domain(format!("interval {i} touches the boundary fixed points"));
    }
    Ok(())
}

/// Exact image `f(I)`: endpoints plus any critical point inside `I`.
pub fn interval_image(i: &Interval, p: &MapParams) -> Result<Interval> {
    check_unit(i)?;
    Ok(image_raw(*i, p.a, p.b, critical_points(p.a).ok()))
}

/// `f^n(I)` by composing exact one-step images.
pub fn interval_image_n(i: &Interval, p: &MapParams, n: usize) -> Result<Interval> {
    check_unit(i)?;
    Ok(image_n_raw(*i, p.a, p.b, n))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub rate: f64,
    pub x_max: f64,
    pub x_min: f64,
    pub f_max: f64,
    pub f_min: f64,
    /// `f_min < x_max < b < x_min < f_max`
    pub ordered: bool,
}

impl Envelope {
    /// `F(a) = [f_min, f_max]`.
    pub fn perpetual(&self) -> Interval {
        Interval::new(self.f_min, self.f_max)
    }

    pub fn critical(&self) -> Interval {
        Interval::new(self.x_max, self.x_min)
    }
}

pub fn envelope(p: &MapParams) -> Result<Envelope> {
    let (x_max, x_min) = critical_points(p.a)?;
    let f_max = map(x_max, p.a, p.b);
    let f_min = map(x_min, p.a, p.b);
    Ok(Envelope {
        rate: p.a,
        x_max,
        x_min,
        f_max,
        f_min,
        ordered: f_min < x_max && x_max < p.b && p.b < x_min && x_min < f_max,
    })
}

pub(crate) fn perpetual_set(a: f64, b: f64) -> Result<Interval> {
    Ok(envelope(&MapParams { a, b })?.perpetual())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerpetualReport {
    pub set: Interval,
    pub image: Interval,
    pub forward_invariant: bool,
    pub surjective: bool,
    /// Hausdorff distance between `f(F(a))` and `F(a)`.
    pub margin: f64,
}

pub fn check_perpetual(p: &MapParams) -> Result<PerpetualReport> {
    let set = envelope(p)?.perpetual();
    let image = interval_image(&set, p)?;
    Ok(PerpetualReport {
        set,
        image,
        forward_invariant: image.within(&set, SET_TOL),
        surjective: image.covers(&set, SET_TOL),
        margin: image.hausdorff(&set),
    })
}

/// Smallest `n <= n_cap` with `f^n(I) ⊆ F(a)`.
pub fn absorption_time_fixed(i: &Interval, p: &MapParams, n_cap: usize) -> Result<usize> {
    check_strict_interior(i)?;
    let target = envelope(p)?.perpetual();
    let crit = critical_points(p.a).ok();
    let mut cur = *i;
    for n in 0..=n_cap {
        if cur.within(&target, SET_TOL) {
            return Ok(n);
        }
        cur = image_raw(cur, p.a, p.b, crit);
    }
    Err(Error::NotAbsorbed { n_cap })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaSet {
    pub lo: f64,
    pub hi: f64,
    /// Grid confirmed `f_min` nonincreasing and `f_max` nondecreasing in `a`.
    pub monotone: bool,
    /// Outward widening applied to the grid extrema (0 when `monotone`).
    pub widening: f64,
    pub grid: usize,
}

impl DeltaSet {
    pub fn interval(&self) -> Interval {
        Interval::new(self.lo, self.hi)
    }
}

/// `∂f/∂a` at `x`: `-f (1 - f) (x - b)`.
fn rate_sensitivity(x: f64, a: f64, b: f64) -> f64 {
    let y = map(x, a, b);
    -y * (1.0 - y) * (x - b)
}

pub fn delta_set(rule: &RateRule, b: f64, grid: usize) -> Result<DeltaSet> {
    if !(rule.a_min > 4.0) {
        return domain(format!("delta set needs a_min > 4, got {}", rule.a_min));
    }
    MapParams::new(rule.a_min, b)?;
    if rule.a_min == rule.a_max {
        let e = envelope(&MapParams { a: rule.a_max, b })?;
        return Ok(DeltaSet { lo: e.f_min, hi: e.f_max, monotone: true, widening: 0.0, grid: 1 });
    }
    let grid = grid.max(2);
    let rates = Interval::new(rule.a_min, rule.a_max).linspace(grid);
    let envs: Vec<Envelope> =
        rates.iter().map(|&a| envelope(&MapParams { a, b })).collect::<Result<_>>()?;
    let monotone = envs
        .windows(2)
        .all(|w| w[1].f_min <= w[0].f_min && w[1].f_max >= w[0].f_max);
    if monotone {
        let e = envs[grid - 1];
        return Ok(DeltaSet { lo: e.f_min, hi: e.f_max, monotone, widening: 0.0, grid });
    }
    let lo = envs.iter().map(|e| e.f_min).fold(f64::INFINITY, f64::min);
    let hi = envs.iter().map(|e| e.f_max).fold(f64::NEG_INFINITY, f64::max);
    // envelope theorem: d f_min / da = ∂f/∂a at x_min
    let lip = envs
        .iter()
        .map(|e| {
            rate_sensitivity(e.x_min, e.rate, b).abs().max(rate_sensitivity(e.x_max, e.rate, b).abs())
        })
        .fold(0.0, f64::max);
    let widening = lip * (rule.a_max - rule.a_min) / (grid - 1) as f64;
    Ok(DeltaSet { lo: (lo - widening).max(0.0), hi: (hi + widening).min(1.0), monotone, widening, grid })
}

pub const DELTA_GRID: usize = 1001;

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveAbsorption {
    pub n: usize,
    pub delta: DeltaSet,
    /// Smallest `min(x, 1 - x)` seen over all sampled iterates.
    pub interiority: f64,
    /// Orbits that left Δ after having entered it.
    pub reentries: usize,
    pub samples: usize,
    pub n_cap: usize,
}

pub fn absorption_time_adaptive(
    i: &Interval,
    rule: &RateRule,
    b: f64,
    samples: usize,
    n_cap: usize,
) -> Result<AdaptiveAbsorption> {
    check_strict_interior(i)?;
    let delta = delta_set(rule, b, DELTA_GRID)?;
    let d = delta.interval();
    let starts = i.linspace(samples.max(1));
    // per sample: (first n after which the orbit stays in Δ, exits after entry, interiority)
    let per: Vec<(Option<usize>, usize, f64)> = starts
        .par_iter()
        .map(|&x0| {
            let mut st = AdaptiveState::new(x0, rule);
            let mut entered: Option<usize> = None;
            let mut exits = 0;
            let mut inner = x0.min(1.0 - x0);
            for n in 0..=n_cap {
                let x = st.share;
                inner = inner.min(x.min(1.0 - x));
                let inside = x >= d.lo - SET_TOL && x <= d.hi + SET_TOL;
                match (inside, entered) {
                    (true, None) => entered = Some(n),
                    (false, Some(_)) => {
                        exits += 1;
                        entered = None;
                    }
                    _ => {}
                }
                if n < n_cap {
                    st.advance(rule, b);
                }
            }
            (entered, exits, inner)
        })
        .collect();
    let mut n = 0;
    for (entered, _, _) in &per {
        match entered {
            Some(k) => n = n.max(*k),
            None => return Err(Error::NotAbsorbed { n_cap }),
        }
    }
    Ok(AdaptiveAbsorption {
        n,
        delta,
        interiority: per.iter().map(|p| p.2).fold(f64::INFINITY, f64::min),
        reentries: per.iter().map(|p| p.1).sum(),
        samples: starts.len(),
        n_cap,
    })
}

/// Smallest `n <= n_cap` with `f^n(I)` equal to `F(a)` within [`EQ_TOL`].
pub fn volume_expansion_fixed(i: &Interval, p: &MapParams, n_cap: usize) -> Result<usize> {
    check_strict_interior(i)?;
    if !i.contains_interior(p.b) {
        return domain(format!("b = {} not interior to {i}", p.b));
    }
    let target = envelope(p)?.perpetual();
    let crit = critical_points(p.a).ok();
    let mut cur = *i;
    for n in 0..=n_cap {
        if cur.hausdorff(&target) <= EQ_TOL {
            return Ok(n);
        }
        cur = image_raw(cur, p.a, p.b, crit);
    }
    Err(Error::NotExpanded { n_cap })
}

/// Points in the cover test grid.
pub const COVER_GRID: usize = 1000;

/// Every point of a [`COVER_GRID`]-point grid on `target` lies within one grid
/// spacing of some value in `sorted`.
pub fn sample_covers(sorted: &[f64], target: &Interval) -> bool {
    if sorted.is_empty() {
        return false;
    }
    let h = target.diam() / (COVER_GRID - 1) as f64;
    target.linspace(COVER_GRID).into_iter().all(|t| {
        let k = sorted.partition_point(|&v| v < t);
        let right = sorted.get(k).map_or(f64::INFINITY, |v| v - t);
        let left = if k > 0 { t - sorted[k - 1] } else { f64::INFINITY };
        right.min(left) <= h
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveExpansion {
    pub n: usize,
    pub target: Interval,
    /// Cover resolution: one spacing of the cover grid on `target`.
    pub resolution: f64,
    /// The image at `n` also covers `F(a_min)`.
    pub covers_amin: Option<bool>,
    pub samples: usize,
}

pub fn volume_expansion_adaptive(
    i: &Interval,
    rule: &RateRule,
    b: f64,
    eps: f64,
    samples: usize,
    n_cap: usize,
) -> Result<AdaptiveExpansion> {
    check_strict_interior(i)?;
    if !i.contains_interior(b) {
        return domain(format!("b = {b} not interior to {i}"));
    }
    let a_star = rule.limit_rate();
    let a_t = if rule.is_constant() {
        a_star
    } else {
        if !(eps > 0.0) || a_star - eps <= rule.a_min {
            return domain(format!("eps = {eps} leaves a* - eps <= a_min = {}", rule.a_min));
        }
        a_star - eps
    };
    let target = perpetual_set(a_t, b)?;
    let lower = perpetual_set(rule.a_min, b).ok();
    let mut states: Vec<AdaptiveState> =
        i.linspace(samples.max(2)).into_iter().map(|x| AdaptiveState::new(x, rule)).collect();
    for n in 0..=n_cap {
        let mut xs: Vec<f64> = states.iter().map(|s| s.share).collect();
        xs.sort_by(f64::total_cmp);
        if sample_covers(&xs, &target) {
            return Ok(AdaptiveExpansion {
                n,
                target,
                resolution: target.diam() / (COVER_GRID - 1) as f64,
                covers_amin: lower.map(|l| sample_covers(&xs, &l)),
                samples: states.len(),
            });
        }
        states.par_iter_mut().for_each(|s| s.advance(rule, b));
    }
    Err(Error::NotExpanded { n_cap })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Threshold {
    /// ordering of critical values and surjectivity
    AB,
    /// forward invariance of F(a)
    SB,
    /// expansion of a neighborhood of b onto F(a)
    ZB,
    /// turbulent pair exists
    UB,
    /// absorption and expansion together
    VB,
    /// no period-2 orbit with both points in [x_max, x_min]
    LB,
    /// instability of b
    KB,
    /// period-3 orbit and turbulent pair, away from b = 1/2
    DB,
}

impl Threshold {
    pub const ALL: [Threshold; 8] = [
        Threshold::AB,
        Threshold::SB,
        Threshold::ZB,
        Threshold::UB,
        Threshold::VB,
        Threshold::LB,
        Threshold::KB,
        Threshold::DB,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Threshold::AB => "a_b",
            Threshold::SB => "s_b",
            Threshold::ZB => "z_b",
            Threshold::UB => "u_b",
            Threshold::VB => "v_b",
            Threshold::LB => "l_b",
            Threshold::KB => "k_b",
            Threshold::DB => "d_b",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdEntry {
    pub name: Threshold,
    /// `None` means unbracketed on the grid.
    pub estimate: Option<f64>,
    /// Grid points that fail after the first passing one.
    pub violations: usize,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdEstimates {
    pub b: f64,
    pub grid: (f64, f64, f64),
    pub entries: Vec<ThresholdEntry>,
}

impl ThresholdEstimates {
    pub fn get(&self, t: Threshold) -> Option<&ThresholdEntry> {
        self.entries.iter().find(|e| e.name == t)
    }
}

fn properties(a: f64, b: f64) -> [bool; 8] {
    let p = MapParams { a, b };
    let env = envelope(&p).ok();
    let perp = check_perpetual(&p).ok();
    let ordered = env.is_some_and(|e| e.ordered) && perp.is_some_and(|r| r.surjective);
    let forward = perp.is_some_and(|r| r.forward_invariant)
        && env.is_some_and(|e| e.f_min < b && b < e.f_max);
    let unstable = deriv(b, a, b).abs() > 1.0;
    let no_p2 = env.is_some_and(|e| {
        period2_points(&p)
            .map(|v| !v.iter().any(|&(l, r)| e.critical().contains(l) && e.critical().contains(r)))
            .unwrap_or(false)
    });
    let expands = env.is_some_and(|e| {
        let lo = (b - 1e-3).max(e.x_max);
        let hi = (b + 1e-3).min(e.x_min);
        lo < b && b < hi && volume_expansion_fixed(&Interval::new(lo, hi), &p, 1000).is_ok()
    });
    let absorbs = absorption_time_fixed(&Interval::new(0.01, 0.99), &p, 10_000).is_ok();
    let turbulent = build_turbulent_pair(&p).is_ok();
    let p3 = period3_find(&p).is_ok();
    [
        ordered,
        forward,
        expands,
        turbulent,
        absorbs && expands,
        no_p2,
        unstable,
        p3 && turbulent && b != 0.5,
    ]
}

pub fn estimate_thresholds(b: f64, lo: f64, hi: f64, step: f64) -> Result<ThresholdEstimates> {
    if !(lo > 4.0) {
        return domain(format!("threshold grid must start above 4, got {lo}"));
    }
    if !(hi > lo) || !(step > 0.0) {
        return domain("threshold grid needs lo < hi and step > 0");
    }
    MapParams::new(lo, b)?;
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    let grid: Vec<f64> = (0..count).map(|k| lo + step * k as f64).collect();
    let table: Vec<[bool; 8]> = grid.par_iter().map(|&a| properties(a, b)).collect();
    let entries = Threshold::ALL
        .iter()
        .enumerate()
        .map(|(j, &name)| {
            let pass: Vec<bool> = table.iter().map(|row| row[j]).collect();
            let persist_from = match pass.iter().rposition(|&ok| !ok) {
                None => Some(0),
                Some(k) if k + 1 < pass.len() => Some(k + 1),
                Some(_) => None,
            };
            let violations = match pass.iter().position(|&ok| ok) {
                Some(first) => pass[first..].iter().filter(|&&ok| !ok).count(),
                None => 0,
            };
            let note = match name {
                Threshold::UB | Threshold::DB if b == 0.5 => {
                    Some("b = 1/2 is outside the scope of the scrambling construction".to_string())
                }
                _ => None,
            };
            ThresholdEntry { name, estimate: persist_from.map(|k| grid[k]), violations, note }
        })
        .collect();
    Ok(ThresholdEstimates { b, grid: (lo, hi, step), entries })
}
