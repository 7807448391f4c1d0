use rayon::prelude::*;

use super::turbulence::NestedFamily;
use crate::dynamics::{AdaptiveState, RateRule};
use crate::error::{domain, Error, Result};
use crate::geometry::sample_covers;
use crate::interval::Interval;
use crate::precise::{self, dd, to_f64, Dd, State};

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Interval of initializations searched; must contain b.
    pub seed: Interval,
    /// Samples per refinement pass.
    pub samples: usize,
    /// Candidate sub-intervals tried per level before backtracking.
    pub branch: usize,
    /// Samples of `seed` used to detect the burn-in `n₀`.
    pub burn_in_samples: usize,
    /// Cap on the adaptive burn-in `n₀`.
    pub max_burn_in: usize,
    /// Re-sampling passes inside a crossing window when no sample hits a box.
    pub max_zoom: usize,
    /// Cap on refinement passes over the whole search.
    pub max_passes: usize,
    /// Cap on two-step delays of any one schedule time past its earliest value.
    pub max_delay: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            seed: Interval::new(0.35, 0.45),
            samples: 1024,
            branch: 4,
            burn_in_samples: 1 << 14,
            max_burn_in: 2000,
            max_zoom: 6,
            max_passes: 2000,
            max_delay: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicSchedule {
    pub bits: Vec<u8>,
    pub times: Vec<usize>,
    /// Initialization in double-double precision.
    pub x0: Dd,
    pub boxes: Vec<Interval>,
    /// Distance of `x_{n_i}(x0)` to the nearest endpoint of `A_i` (negative outside).
    pub margins: Vec<f64>,
    pub passes: usize,
}

impl SymbolicSchedule {
    pub fn x0_f64(&self) -> f64 {
        to_f64(self.x0)
    }
}

fn box_margin(x: f64, t: &Interval) -> f64 {
    (x - t.lo).min(t.hi - x)
}

/// First `n` at which the sampled image of `seed` covers the hull of `J ∪ K`.
fn adaptive_burn_in(fam: &NestedFamily, rule: &RateRule, b: f64, cfg: &SearchConfig) -> Option<usize> {
    let hull = fam.base.hull();
    let mut states: Vec<AdaptiveState> =
        cfg.seed.linspace(cfg.burn_in_samples.max(2)).into_iter().map(|x| AdaptiveState::new(x, rule)).collect();
    for n in 0..=cfg.max_burn_in {
        let mut xs: Vec<f64> = states.iter().map(|s| s.share).collect();
        xs.sort_by(f64::total_cmp);
        if sample_covers(&xs, &hull) {
            return Some(n);
        }
        states.iter_mut().for_each(|s| s.advance(rule, b));
    }
    None
}

struct Search<'a> {
    rule: &'a RateRule,
    b: Dd,
    times: Vec<usize>,
    delays: Vec<usize>,
    max_delay: usize,
    boxes: &'a [Interval],
    cfg: &'a SearchConfig,
    passes: usize,
}

/// Per sample: hits on all earlier boxes, position at the current time, and
/// the smallest box margin so far.
struct Probe {
    prev_ok: bool,
    x: f64,
    margin: f64,
}

impl<'a> Search<'a> {
    fn probe(&self, x0: Dd, level: usize) -> Probe {
        let mut st = State::new(x0, self.rule);
        let mut margin = f64::INFINITY;
        let mut prev_ok = true;
        for j in 0..=level {
            while st.step < self.times[j] {
                st.advance(self.rule, self.b);
            }
            let m = box_margin(to_f64(st.x), &self.boxes[j]);
            if j < level {
                prev_ok &= m >= 0.0;
            }
            margin = margin.min(m);
        }
        Probe { prev_ok, x: to_f64(st.x), margin }
    }

    fn points(&self, lo: Dd, hi: Dd) -> Vec<Dd> {
        let m = self.cfg.samples.max(2);
        let (lf, hf) = (to_f64(lo), to_f64(hi));
        let logit_spaced = hf - lf >= 1e-3 * lf.min(1.0 - hf);
        let mut pts: Vec<Dd> = if logit_spaced {
            let (l0, l1) = (precise::logit(lo), precise::logit(hi));
            (0..=m).map(|s| precise::expit(l0 + (l1 - l0) * dd(s as f64 / m as f64))).collect()
        } else {
            (0..=m).map(|s| lo + (hi - lo) * dd(s as f64 / m as f64)).collect()
        };
        pts[0] = lo;
        pts[m] = hi;
        pts
    }

    /// Searches `[lo, hi]` for a point hitting boxes `level..`. A level whose box no
    /// sample reaches is retried two steps later, shifting every later time too.
    fn level(&mut self, level: usize, lo: Dd, hi: Dd) -> Option<Dd> {
        loop {
            let mut hit = false;
            if let Some(x) = self.run(level, lo, hi, 0, f64::INFINITY, &mut hit) {
                return Some(x);
            }
            if hit || self.passes >= self.cfg.max_passes || self.delays[level] >= self.max_delay {
                return None;
            }
            self.delays[level] += 1;
            self.times[level..].iter_mut().for_each(|t| *t += 2);
        }
    }

    fn run(&mut self, level: usize, lo: Dd, hi: Dd, zoom: usize, parent_dist: f64, hit: &mut bool) -> Option<Dd> {
        if self.passes >= self.cfg.max_passes || to_f64(hi - lo) <= 1e-30 {
            return None;
        }
        self.passes += 1;
        let pts = self.points(lo, hi);
        let probes: Vec<Probe> = pts.par_iter().map(|&x| self.probe(x, level)).collect();
        let ok: Vec<bool> = probes.iter().map(|p| p.prev_ok && p.margin >= 0.0).collect();
        let mut runs: Vec<(usize, usize)> = Vec::new();
        let mut i = 0;
        while i < ok.len() {
            if ok[i] {
                let s = i;
                while i + 1 < ok.len() && ok[i + 1] {
                    i += 1;
                }
                runs.push((s, i));
            }
            i += 1;
        }
        let last = pts.len() - 1;
        let width = |s: usize, e: usize| to_f64(pts[e] - pts[s]);
        if !runs.is_empty() {
            *hit = true;
            runs.sort_by(|p, q| (q.1 - q.0).cmp(&(p.1 - p.0)).then(width(q.0, q.1).total_cmp(&width(p.0, p.1))));
            for &(s, e) in runs.iter().take(self.cfg.branch) {
                if level + 1 == self.times.len() {
                    let best = (s..=e).max_by(|&p, &q| probes[p].margin.total_cmp(&probes[q].margin))?;
                    return Some(pts[best]);
                }
                let (sl, sh) = (pts[s.saturating_sub(1)], pts[(e + 1).min(last)]);
                if let Some(x) = self.level(level + 1, sl, sh) {
                    return Some(x);
                }
            }
            return None;
        }
        if zoom >= self.cfg.max_zoom {
            return None;
        }
        let t = self.boxes[level];
        let dist = |p: &Probe| (t.lo - p.x).max(p.x - t.hi);
        // straddling pairs first, widest first
        let mut windows: Vec<(usize, usize)> = (0..last)
            .filter(|&s| {
                let (p, q) = (&probes[s], &probes[s + 1]);
                p.prev_ok && q.prev_ok && ((p.x < t.lo && q.x > t.hi) || (p.x > t.hi && q.x < t.lo))
            })
            .map(|s| (s, s + 1))
            .collect();
        windows.sort_by(|p, q| width(q.0, q.1).total_cmp(&width(p.0, p.1)));
        windows.truncate(self.cfg.branch);
        // then folds whose sampled extremum stops short of the box, closest first,
        // as long as zooming keeps bringing the extremum closer
        let closest = probes.iter().filter(|p| p.prev_ok).map(dist).fold(f64::INFINITY, f64::min);
        let mut folds: Vec<usize> = (1..last)
            .filter(|&s| {
                let (p, q, r) = (&probes[s - 1], &probes[s], &probes[s + 1]);
                q.prev_ok && dist(q) <= dist(p) && dist(q) <= dist(r) && closest < 0.5 * parent_dist
            })
            .collect();
        folds.sort_by(|&p, &q| dist(&probes[p]).total_cmp(&dist(&probes[q])));
        windows.extend(folds.into_iter().take(self.cfg.branch).map(|s| (s - 1, s + 1)));
        for (s, e) in windows {
            if let Some(x) = self.run(level, pts[s], pts[e], zoom + 1, closest, hit) {
                return Some(x);
            }
        }
        None
    }
}

fn check_inputs(bits: &[u8], rule: &RateRule, b: f64, family: &NestedFamily, cfg: &SearchConfig) -> Result<()> {
    if b == 0.5 {
        return domain("b = 1/2 is excluded from symbolic tracking");
    }
    if bits.is_empty() || bits.len() > family.v.len() {
        return domain(format!("need 1..={} bits, got {}", family.v.len(), bits.len()));
    }
    if bits.iter().any(|&c| c > 1) {
        return domain("bits must be 0 or 1");
    }
    if (family.base.rate - rule.limit_rate()).abs() > 1e-12 || family.base.equilibrium != b {
        return domain("family must be built at (g(0), b)");
    }
    if !cfg.seed.contains_interior(b) || cfg.seed.lo <= 0.0 || cfg.seed.hi >= 1.0 {
        return domain(format!("seed {} must be interior and contain b", cfg.seed));
    }
    Ok(())
}

fn search(
    bits: &[u8],
    rule: &RateRule,
    b: f64,
    family: &NestedFamily,
    cfg: &SearchConfig,
    times: Vec<usize>,
    max_delay: usize,
) -> Result<SymbolicSchedule> {
    let boxes: Vec<Interval> = bits.iter().enumerate().map(|(i, &c)| family.target(i, c)).collect();
    let delays = vec![0; bits.len()];
    let mut search = Search { rule, b: dd(b), times, delays, max_delay, boxes: &boxes, cfg, passes: 0 };
    let x0 = search.level(0, dd(cfg.seed.lo), dd(cfg.seed.hi)).ok_or_else(|| Error::NotTracked {
        level: bits.len(),
        detail: format!("refinement stalled after {} passes, times {:?}", search.passes, search.times),
    })?;
    let (times, passes) = (search.times, search.passes);
    let mut sched = SymbolicSchedule { bits: bits.to_vec(), times, x0, boxes, margins: vec![], passes };
    sched.margins = verify_schedule(&sched, rule, b).margins;
    Ok(sched)
}

/// Finds `x0` in `cfg.seed` whose adaptive orbit visits `A_i = V^i` (bit 0) or
/// `U^i` (bit 1) at times `n_0 < n_1 < …`, where `n_0` is the burn-in and each
/// `n_i − n_{i−1} − 2i` is even and nonnegative, as small as the search allows.
pub fn track_symbolic(
    bits: &[u8],
    rule: &RateRule,
    b: f64,
    family: &NestedFamily,
    cfg: &SearchConfig,
) -> Result<SymbolicSchedule> {
    check_inputs(bits, rule, b, family, cfg)?;
    let n0 = adaptive_burn_in(family, rule, b, cfg).ok_or_else(|| Error::NotTracked {
        level: 0,
        detail: format!("seed image never covers J ∪ K within {} steps", cfg.max_burn_in),
    })?;
    let mut times = vec![n0];
    for i in 1..bits.len() {
        times.push(times[i - 1] + 2 * i);
    }
    search(bits, rule, b, family, cfg, times, cfg.max_delay)
}

/// Like [`track_symbolic`] with the visit times fixed in advance.
pub fn track_symbolic_at(
    bits: &[u8],
    rule: &RateRule,
    b: f64,
    family: &NestedFamily,
    cfg: &SearchConfig,
    times: &[usize],
) -> Result<SymbolicSchedule> {
    check_inputs(bits, rule, b, family, cfg)?;
    if times.len() != bits.len() {
        return domain(format!("{} times for {} bits", times.len(), bits.len()));
    }
    for i in 1..times.len() {
        if times[i] < times[i - 1] + 2 * i || !(times[i] - times[i - 1]).is_multiple_of(2) {
            return domain(format!("time {} = {} is not admissible after {}", i, times[i], times[i - 1]));
        }
    }
    search(bits, rule, b, family, cfg, times.to_vec(), 0)
}

/// Tracks two bit strings on one shared schedule. The string with more ones is
/// tracked freely and the other on its times; if that fails the roles swap.
pub fn track_symbolic_pair(
    s: &[u8],
    t: &[u8],
    rule: &RateRule,
    b: f64,
    family: &NestedFamily,
    cfg: &SearchConfig,
) -> Result<(SymbolicSchedule, SymbolicSchedule)> {
    if s.len() != t.len() {
        return domain("bit strings have different lengths");
    }
    let ones = |v: &[u8]| v.iter().filter(|&&c| c == 1).count();
    let swap = ones(t) > ones(s);
    let (p, q) = if swap { (t, s) } else { (s, t) };
    let lead = track_symbolic(p, rule, b, family, cfg)?;
    let (x, y) = match track_symbolic_at(q, rule, b, family, cfg, &lead.times) {
        Ok(other) => (lead, other),
        Err(_) => {
            let lead = track_symbolic(q, rule, b, family, cfg)?;
            let other = track_symbolic_at(p, rule, b, family, cfg, &lead.times)?;
            (other, lead)
        }
    };
    Ok(if swap { (y, x) } else { (x, y) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub positions: Vec<f64>,
    pub margins: Vec<f64>,
    pub hits: Vec<bool>,
}

impl Verification {
    pub fn all_hit(&self) -> bool {
        self.hits.iter().all(|&h| h)
    }
}

/// Fresh forward run of `x0` through the adaptive system, checked against every box.
pub fn verify_schedule(s: &SymbolicSchedule, rule: &RateRule, b: f64) -> Verification {
    let positions: Vec<f64> = positions_at(s.x0, rule, b, &s.times).into_iter().map(to_f64).collect();
    let margins: Vec<f64> = positions.iter().zip(&s.boxes).map(|(&x, t)| box_margin(x, t)).collect();
    let hits = margins.iter().map(|&m| m >= 0.0).collect();
    Verification { positions, margins, hits }
}

fn positions_at(x0: Dd, rule: &RateRule, b: f64, times: &[usize]) -> Vec<Dd> {
    let (bd, mut x, mut sum) = (dd(b), x0, Dd::ZERO);
    let mut a = precise::rate(rule, Dd::ZERO);
    let mut out = Vec::with_capacity(times.len());
    let mut n = 0;
    for &t in times {
        while n < t {
            sum = sum.add_accurate(a * x.sub_accurate(bd));
            x = precise::map(x, a, bd);
            n += 1;
            a = precise::rate(rule, sum / dd(n as f64));
        }
        out.push(x);
    }
    out
}

/// `|x_{n_i}(x0) − x_{n_i}(y0)|` at the shared schedule times, in double-double.
pub fn schedule_gaps(s: &SymbolicSchedule, t: &SymbolicSchedule, rule: &RateRule, b: f64) -> Result<Vec<f64>> {
    if s.times != t.times {
        return domain("schedules have different times");
    }
    let p = positions_at(s.x0, rule, b, &s.times);
    let q = positions_at(t.x0, rule, b, &t.times);
    Ok(p.iter().zip(&q).map(|(&x, &y)| to_f64(x.sub_accurate(y)).abs()).collect())
}
