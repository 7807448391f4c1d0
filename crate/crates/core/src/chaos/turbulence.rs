use super::periodic::{bisect_root, period3_find};
use crate::dynamics::{critical_points, map, map_n, MapParams};
use crate::error::{Error, Result};
use crate::geometry::{envelope, image_n_raw};
use crate::interval::Interval;

/// Anchor search cap.
const ANCHOR_STEPS: usize = 60;
/// Samples per level when locating crossing windows of `f^{2k+2}`.
const WINDOW_SAMPLES: usize = 4096;
/// Smallest diameter at which a nested level is still accepted.
const MIN_DIAM: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurbulentPair {
    pub j: Interval,
    pub k: Interval,
    pub rate: f64,
    pub equilibrium: f64,
    pub period3_witness: [f64; 3],
    /// Cover margin of `f²(J)` over the hull of `J ∪ K`.
    pub margin_j: f64,
    /// Cover margin of `f²(K)` over the hull of `J ∪ K`.
    pub margin_k: f64,
}

impl TurbulentPair {
    pub fn params(&self) -> MapParams {
        MapParams { a: self.rate, b: self.equilibrium }
    }

    pub fn hull(&self) -> Interval {
        self.j.hull(&self.k)
    }

    pub fn gap(&self) -> f64 {
        self.j.gap(&self.k)
    }

    pub fn margin(&self) -> f64 {
        self.margin_j.min(self.margin_k)
    }

    fn reflect(&self) -> TurbulentPair {
        TurbulentPair {
            j: self.j.reflect(),
            k: self.k.reflect(),
            rate: self.rate,
            equilibrium: 1.0 - self.equilibrium,
            period3_witness: self.period3_witness.map(|v| 1.0 - v),
            ..*self
        }
    }
}

/// Shrinks `off` by halves from its start until `ok(anchor(off))`.
fn anchor(start: f64, place: impl Fn(f64) -> f64, ok: impl Fn(f64) -> bool) -> Option<f64> {
    let mut off = start;
    for _ in 0..ANCHOR_STEPS {
        let t = place(off);
        if ok(t) {
            return Some(t);
        }
        off *= 0.5;
    }
    None
}

/// Construction for an orbit `w = f²(x) < x < y = f(x)`.
fn construct(a: f64, b: f64, x: f64) -> Result<(Interval, Interval)> {
    let f = |t: f64| map(t, a, b);
    let f2 = |t: f64| map_n(t, a, b, 2);
    let (y, w) = (f(x), f2(x));
    if !(w < x && x < y) {
        return Err(Error::NotFound("orbit does not have the shape f²(x) < x < f(x)".into()));
    }
    let fail = |what: &str| Error::NotFound(format!("anchor {what} not found within {ANCHOR_STEPS} halvings"));
    let d = bisect_root(|t| f(t) - x, x, y);
    if !(x < d && d < y && d < f2(d)) {
        return Err(fail("d"));
    }
    let z = anchor((x - w) / 4.0, |o| w + o, |t| f2(t) > d).ok_or_else(|| fail("z"))?;
    let q = anchor((x - z) / 4.0, |o| x - o, |t| f2(t) < z).ok_or_else(|| fail("q"))?;
    let c = anchor((d - x) / 4.0, |o| x + o, |t| f2(t) < z).ok_or_else(|| fail("c"))?;
    if !(z < q && q < c && c < d) {
        return Err(Error::NotFound("anchors out of order".into()));
    }
    Ok((Interval::new(z, q), Interval::new(c, d)))
}

pub fn build_turbulent_pair(p: &MapParams) -> Result<TurbulentPair> {
    let p = MapParams::new(p.a, p.b)?;
    if p.b > 0.5 {
        return build_turbulent_pair(&p.mirrored()).map(|t| t.reflect());
    }
    let orbit = period3_find(&p)?;
    let x = orbit.points[0];
    let (j, k) = if orbit.standard_shape() {
        construct(p.a, p.b, x)?
    } else {
        let (j, k) = construct(p.a, 1.0 - p.b, 1.0 - x)?;
        (j.reflect(), k.reflect())
    };
    let hull = j.hull(&k);
    let margin_j = image_n_raw(j, p.a, p.b, 2).cover_margin(&hull);
    let margin_k = image_n_raw(k, p.a, p.b, 2).cover_margin(&hull);
    let set = envelope(&p)?.perpetual();
    if !(margin_j > 0.0 && margin_k > 0.0) {
        return Err(Error::NotFound(format!(
            "double images do not cover J ∪ K (margins {margin_j}, {margin_k})"
        )));
    }
    if !(j.gap(&k) >= 1e-9 && set.contains_interior(hull.lo) && set.contains_interior(hull.hi)) {
        return Err(Error::NotFound("J, K not disjoint inside the interior of F(a)".into()));
    }
    Ok(TurbulentPair { j, k, rate: p.a, equilibrium: p.b, period3_witness: orbit.points, margin_j, margin_k })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NestedFamily {
    pub base: TurbulentPair,
    /// `V⁰ = K ⊇ V¹ ⊇ ...`
    pub v: Vec<Interval>,
    /// `U⁰ = J ⊇ U¹ ⊇ ...`
    pub u: Vec<Interval>,
    /// Cover margin of `f^{2k+2}(Vᵏ)` over the hull of `J ∪ K`.
    pub v_margins: Vec<f64>,
    pub u_margins: Vec<f64>,
    pub depth: usize,
}

impl NestedFamily {
    /// Box for bit `c` at level `i`: `Vⁱ` for 0, `Uⁱ` for 1.
    pub fn target(&self, i: usize, bit: u8) -> Interval {
        if bit == 0 {
            self.v[i]
        } else {
            self.u[i]
        }
    }

    fn reflect(&self) -> NestedFamily {
        NestedFamily {
            base: self.base.reflect(),
            v: self.v.iter().map(Interval::reflect).collect(),
            u: self.u.iter().map(Interval::reflect).collect(),
            ..self.clone()
        }
    }
}

fn logit(x: f64) -> f64 {
    x.ln() - (-x).ln_1p()
}

fn expit(z: f64) -> f64 {
    crate::dynamics::sigmoid(z)
}

/// `m + 1` points from `lo` to `hi`, uniform in logit coordinates.
pub(crate) fn logit_points(i: Interval, m: usize) -> Vec<f64> {
    let (l0, l1) = (logit(i.lo), logit(i.hi));
    let mut pts: Vec<f64> = (0..=m).map(|s| expit(l0 + (l1 - l0) * s as f64 / m as f64)).collect();
    pts[0] = i.lo;
    pts[m] = i.hi;
    for s in 1..=m {
        pts[s] = pts[s].clamp(pts[s - 1], i.hi);
    }
    pts
}

/// Index pairs `(i, j)`: samples `i` and `j` lie on opposite sides of `t` and
/// every sample strictly between them is inside `t`.
pub(crate) fn crossing_windows(vals: &[f64], t: &Interval) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut last: Option<(usize, bool)> = None;
    for (i, &v) in vals.iter().enumerate() {
        let side = if v < t.lo {
            Some(false)
        } else if v > t.hi {
            Some(true)
        } else {
            None
        };
        if let Some(above) = side {
            if let Some((k, prev)) = last {
                if prev != above {
                    out.push((k, i));
                }
            }
            last = Some((i, above));
        }
    }
    out
}

/// One refinement step: the smaller of two disjoint pieces of `v`, one whose
/// `f^{steps}` image crosses `k_box` and one whose image crosses `j_box`.
fn split_level(v: Interval, a: f64, b: f64, steps: usize, j_box: &Interval, k_box: &Interval) -> Option<Interval> {
    let pts = logit_points(v, WINDOW_SAMPLES);
    let vals: Vec<f64> = pts.iter().map(|&x| map_n(x, a, b, steps)).collect();
    let wk = crossing_windows(&vals, k_box);
    let wj = crossing_windows(&vals, j_box);
    let mid = v.mid();
    let mut best: Option<Interval> = None;
    for &x in &wk {
        for &y in &wj {
            let (left, right) = if x.1 < y.0 {
                (x, y)
            } else if y.1 < x.0 {
                (y, x)
            } else {
                continue;
            };
            let (l_hi, r_lo) = (pts[left.1], pts[right.0]);
            if !(l_hi < r_lo) {
                continue;
            }
            let cut = mid.clamp(l_hi, r_lo);
            let slack = (r_lo - l_hi) * 1e-3;
            let cl = (cut - slack).max(l_hi);
            let cr = (cut + slack).min(r_lo);
            if !(cl < cr) {
                continue;
            }
            let (zl, zr) = (Interval::new(v.lo, cl), Interval::new(cr, v.hi));
            let small = if zl.diam() <= zr.diam() { zl } else { zr };
            if best.is_none_or(|bst| small.diam() > bst.diam()) {
                best = Some(small);
            }
        }
    }
    best
}

/// Cover margin of `f^{steps}(s)` over `hull`, by exact interval images.
fn level_margin(s: Interval, a: f64, b: f64, steps: usize, hull: &Interval) -> f64 {
    image_n_raw(s, a, b, steps).cover_margin(hull)
}

pub fn refine_nested(pair: &TurbulentPair, depth: usize) -> Result<NestedFamily> {
    if pair.equilibrium > 0.5 {
        return refine_nested(&pair.reflect(), depth).map(|f| f.reflect());
    }
    let (a, b) = (pair.rate, pair.equilibrium);
    critical_points(a)?;
    let hull = pair.hull();
    let mut fam = NestedFamily {
        base: *pair,
        v: vec![pair.k],
        u: vec![pair.j],
        v_margins: vec![level_margin(pair.k, a, b, 2, &hull)],
        u_margins: vec![level_margin(pair.j, a, b, 2, &hull)],
        depth: 0,
    };
    if !(fam.v_margins[0] > 0.0 && fam.u_margins[0] > 0.0) {
        return Err(Error::PrecisionExhausted { level: 0, detail: "base pair does not cover J ∪ K".into() });
    }
    for k in 0..depth {
        let steps = 2 * k + 2;
        let mut next = [Interval::point(0.0); 2];
        let mut margins = [0.0; 2];
        for (s, prev) in [fam.v[k], fam.u[k]].into_iter().enumerate() {
            let exhausted = |detail: String| Error::PrecisionExhausted { level: k + 1, detail };
            let z = split_level(prev, a, b, steps, &pair.j, &pair.k)
                .ok_or_else(|| exhausted(format!("no disjoint crossing windows inside {prev}")))?;
            if z.diam() < MIN_DIAM {
                return Err(exhausted(format!("diameter {} below {MIN_DIAM}", z.diam())));
            }
            let m = level_margin(z, a, b, steps + 2, &hull);
            if !(m > 0.0) {
                return Err(exhausted(format!("image of {z} under {} steps misses J ∪ K", steps + 2)));
            }
            next[s] = z;
            margins[s] = m;
        }
        fam.v.push(next[0]);
        fam.u.push(next[1]);
        fam.v_margins.push(margins[0]);
        fam.u_margins.push(margins[1]);
        fam.depth = k + 1;
    }
    Ok(fam)
}
