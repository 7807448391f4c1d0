//! `cobweb`: staircase segments of an adaptive orbit over the limit map.

use serde_json::{Map, Value};

use mwu_chaos::dynamics::map;

use super::{format, Format};
use crate::config::{Key, Params};
use crate::error::Result;
use crate::output::{fmt, num, write_csv, write_json, write_text, Svg};

/// Samples of the limit-map curve.
pub const CURVE_POINTS: usize = 1000;

pub const KEYS: &[Key] = &[
    ("x0", None, "initial share of route 1"),
    ("n", Some("100"), "steps to draw"),
    ("burn-in", Some("0"), "leading steps left out"),
    ("svg", None, "also write an SVG here"),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub from: (f64, f64),
    pub to: (f64, f64),
    pub kind: &'static str,
}

impl Segment {
    pub fn len(&self) -> f64 {
        (self.to.0 - self.from.0).hypot(self.to.1 - self.from.1)
    }
}

/// Orbit staircase, then the curve `f(·, a*, b)`, then the diagonal.
pub fn segments(p: &Params) -> Result<Vec<Segment>> {
    let t = super::simulate::trace(p)?;
    let b = super::equilibrium(p)?;
    let a_star = p.rule()?.limit_rate();
    let xs: Vec<f64> = t.shares().collect();
    let mut out = Vec::with_capacity(2 * xs.len() + CURVE_POINTS);
    for w in xs.windows(2) {
        let (x, y) = (w[0], w[1]);
        out.push(Segment { from: (x, x), to: (x, y), kind: "vertical" });
        out.push(Segment { from: (x, y), to: (y, y), kind: "horizontal" });
    }
    let grid: Vec<(f64, f64)> = (0..CURVE_POINTS)
        .map(|i| {
            let x = i as f64 / (CURVE_POINTS - 1) as f64;
            (x, map(x, a_star, b))
        })
        .collect();
    out.extend(grid.windows(2).map(|w| Segment { from: w[0], to: w[1], kind: "curve" }));
    out.push(Segment { from: (0.0, 0.0), to: (1.0, 1.0), kind: "diagonal" });
    Ok(out)
}

pub fn run(p: &Params) -> Result<()> {
    let segs = segments(p)?;
    let manifest = p.manifest();
    let out = p.out();
    let draw = || {
        let mut svg = Svg::new((0.0, 1.0), (0.0, 1.0));
        for kind in ["diagonal", "curve"] {
            let pts: Vec<(f64, f64)> = segs.iter().filter(|s| s.kind == kind).flat_map(|s| [s.from, s.to]).collect();
            svg.polyline(pts, 1.0, if kind == "curve" { "steelblue" } else { "gray" });
        }
        let mut stair: Vec<(f64, f64)> = Vec::new();
        for s in segs.iter().filter(|s| s.kind == "vertical" || s.kind == "horizontal") {
            if stair.is_empty() {
                stair.push(s.from);
            }
            stair.push(s.to);
        }
        svg.polyline(stair, 0.6, "firebrick");
        svg.render("cobweb", &manifest)
    };
    match format(p)? {
        Format::Csv => {
            let rows = segs
                .iter()
                .map(|s| vec![fmt(s.from.0), fmt(s.from.1), fmt(s.to.0), fmt(s.to.1), s.kind.to_string()]);
            write_csv(out.as_deref(), &manifest, &["x_from", "y_from", "x_to", "y_to", "kind"], rows)?;
        }
        Format::Json => {
            let rows = segs
                .iter()
                .map(|s| {
                    let mut m = Map::new();
                    m.insert("x_from".into(), num(s.from.0));
                    m.insert("y_from".into(), num(s.from.1));
                    m.insert("x_to".into(), num(s.to.0));
                    m.insert("y_to".into(), num(s.to.1));
                    m.insert("kind".into(), Value::from(s.kind));
                    Value::Object(m)
                })
                .collect();
            let mut body = Map::new();
            body.insert("segments".into(), Value::Array(rows));
            write_json(out.as_deref(), &manifest, body)?;
        }
        Format::Svg => write_text(out.as_deref(), &draw())?,
    }
    if let Some(path) = p.svg() {
        write_text(Some(&path), &draw())?;
    }
    Ok(())
}
