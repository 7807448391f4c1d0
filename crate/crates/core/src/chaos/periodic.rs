use crate::dynamics::{map, map_n, MapParams};
use crate::error::{Error, Result};
use crate::geometry::envelope;

/// Cells in the uniform sign-change scan on [0, 1].
pub const SCAN_CELLS: usize = 10_000;

/// Bisection on a sign change of `h` over `[lo, hi]`, run until the bracket
/// cannot shrink further in f64.
pub fn bisect_root(h: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut h_lo = h(lo);
    if h_lo == 0.0 {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let h_mid = h(mid);
        if h_mid == 0.0 {
            return mid;
        }
        if (h_mid < 0.0) == (h_lo < 0.0) {
            lo = mid;
            h_lo = h_mid;
        } else {
            hi = mid;
        }
    }
    if h(hi).abs() < h_lo.abs() {
        hi
    } else {
        lo
    }
}

/// All roots of `h` found by a uniform sign-change scan plus bisection.
fn scan_roots(h: &impl Fn(f64) -> f64, cells: usize) -> Vec<f64> {
    let xs: Vec<f64> = (0..=cells).map(|i| i as f64 / cells as f64).collect();
    let vs: Vec<f64> = xs.iter().map(|&x| h(x)).collect();
    let mut roots = Vec::new();
    for i in 0..cells {
        if vs[i] == 0.0 {
            roots.push(xs[i]);
        } else if vs[i + 1] != 0.0 && (vs[i] < 0.0) != (vs[i + 1] < 0.0) {
            roots.push(bisect_root(h, xs[i], xs[i + 1]));
        }
    }
    if vs[cells] == 0.0 {
        roots.push(xs[cells]);
    }
    roots
}

/// Period-2 pairs `(x_l, x_r)` with `x_l < b < x_r = f(x_l)`.
///
/// Roots of γ_{a,b}(x) = (2b − x − 1)x + (2b − x)(1 − x)e^{a(x−b)} are located through
/// γ / (x + (1 − x)e^{a(x−b)}) = 2b − x − f(x), which has the same sign and roots and
/// does not overflow.
pub fn period2_points(p: &MapParams) -> Result<Vec<(f64, f64)>> {
    let MapParams { a, b } = MapParams::new(p.a, p.b)?;
    let h = |x: f64| 2.0 * b - x - map(x, a, b);
    let mut out: Vec<(f64, f64)> = scan_roots(&h, SCAN_CELLS)
        .into_iter()
        .filter(|&x| x > 0.0 && x < b && (x - b).abs() > 1e-9)
        .map(|x| (x, map(x, a, b)))
        .filter(|&(l, r)| (r - l).abs() > 1e-9)
        .collect();
    out.dedup_by(|p, q| (p.0 - q.0).abs() <= 1e-15);
    Ok(out)
}

/// Re-bisects a root known to f64 accuracy inside a bracket of a few ulps.
fn polish(h: &impl Fn(f64) -> f64, x: f64) -> f64 {
    let mut w = x.abs().max(1e-300) * 1e-13;
    for _ in 0..8 {
        let (lo, hi) = (x - w, x + w);
        if (h(lo) < 0.0) != (h(hi) < 0.0) {
            return bisect_root(h, lo, hi);
        }
        w *= 8.0;
    }
    x
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Period3Orbit {
    /// `(x, f(x), f²(x))` starting from the middle point of the orbit.
    pub points: [f64; 3],
    /// `|f³(x) − x|`
    pub residual: f64,
    /// A point with `f³(w) < w < f(w)` (mirrored for b > 1/2).
    pub witness: f64,
    pub rate: f64,
    pub equilibrium: f64,
}

impl Period3Orbit {
    /// `f²(x) < x < f(x)`
    pub fn standard_shape(&self) -> bool {
        let [x, y, w] = self.points;
        w < x && x < y
    }

    pub(crate) fn reflect(&self) -> Period3Orbit {
        Period3Orbit {
            points: self.points.map(|v| 1.0 - v),
            residual: self.residual,
            witness: 1.0 - self.witness,
            rate: self.rate,
            equilibrium: 1.0 - self.equilibrium,
        }
    }
}

pub fn period3_find(p: &MapParams) -> Result<Period3Orbit> {
    let p = MapParams::new(p.a, p.b)?;
    if p.b > 0.5 {
        return period3_find(&p.mirrored())
            .map(|o| Period3Orbit { equilibrium: p.b, ..o.reflect() })
            .map_err(|_| Error::NotFound(format!("no period-3 orbit at a = {}, b = {}", p.a, p.b)));
    }
    let MapParams { a, b } = p;
    let f = |x: f64| map(x, a, b);
    let lo = (3.0 * b - 1.0).max(0.0);
    let witness = (1..SCAN_CELLS)
        .map(|i| lo + (b - lo) * i as f64 / SCAN_CELLS as f64)
        .find(|&x| {
            let y = f(x);
            x < y && map_n(y, a, b, 2) < x
        })
        .ok_or_else(|| Error::NotFound(format!("no period-3 witness at a = {a}, b = {b}")))?;
    let interior = envelope(&p)
        .map(|e| e.perpetual())
        .map_err(|_| Error::NotFound(format!("no perpetual set at a = {a}")))?;
    let h = |x: f64| map_n(x, a, b, 3) - x;
    let mut orbits: Vec<[f64; 3]> = Vec::new();
    for r in scan_roots(&h, SCAN_CELLS) {
        let (r1, r2) = (f(r), map_n(r, a, b, 2));
        let proper = (r1 - r).abs() >= 1e-6 && (r2 - r).abs() >= 1e-6 && (r2 - r1).abs() >= 1e-6;
        if !proper || h(r).abs() > 1e-10 {
            continue;
        }
        let mut pts = [r, r1, r2];
        pts.sort_by(f64::total_cmp);
        if !pts.iter().all(|&v| interior.contains_interior(v)) {
            continue;
        }
        let mid = if pts[1] == r { r } else { polish(&h, pts[1]) };
        if h(mid).abs() > 1e-10 || orbits.iter().any(|o| (o[0] - mid).abs() <= 1e-9) {
            continue;
        }
        orbits.push([mid, f(mid), map_n(mid, a, b, 2)]);
    }
    let in_range = |o: &[f64; 3]| o[0] > lo && o[0] < b && o[2] < o[0] && o[0] < o[1];
    let best = orbits
        .iter()
        .find(|o| in_range(o))
        .or_else(|| orbits.first())
        .ok_or_else(|| Error::NotFound(format!("no period-3 root at a = {a}, b = {b}")))?;
    Ok(Period3Orbit {
        points: *best,
        residual: h(best[0]).abs(),
        witness,
        rate: a,
        equilibrium: b,
    })
}
