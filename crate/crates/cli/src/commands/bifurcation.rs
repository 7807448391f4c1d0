//! `bifurcation`: long-run share clouds over a one-parameter grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{Map, Value};

use mwu_chaos::dynamics::{AdaptiveState, RateRule, RuleKind};

use super::{format, share, Format};
use crate::config::{Key, Params};
use crate::error::{usage, Result};
use crate::output::{fmt, nums, sibling, write_csv, write_json, write_text, Svg};

/// Values closer than this count as one limit value.
pub const CLUSTER_RES: f64 = 1e-4;

pub const KEYS: &[Key] = &[
    ("axis", Some("equilibrium_b"), "equilibrium_b, rate_a or rate_envelope_amax"),
    ("lo", Some("0.05"), "first grid value"),
    ("hi", Some("0.95"), "last grid value"),
    ("points", Some("181"), "grid points"),
    ("burn-in", Some("10000"), "steps discarded per grid point"),
    ("keep", Some("200"), "steps kept per grid point"),
    ("x0-policy", Some("fixed"), "fixed or seeded_random_interior"),
    ("x0", Some("0.1234"), "initial share under the fixed policy (off the default b-grid)"),
    ("svg", None, "also write an SVG scatter here"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    EquilibriumB,
    RateA,
    RateEnvelopeAmax,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum X0Policy {
    Fixed(f64),
    /// Uniform on [0.01, 0.99], one ChaCha8 stream per grid index.
    SeededRandomInterior,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub axis: Axis,
    pub grid: (f64, f64, usize),
    pub burn_in: usize,
    pub keep: usize,
    /// Rule for `equilibrium_b`; supplies `a_min` and κ for `rate_envelope_amax`.
    pub rule: Option<RateRule>,
    /// Fixed equilibrium for the two rate axes.
    pub b: Option<f64>,
    pub seed: u64,
    pub x0: X0Policy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scan {
    pub params: Vec<f64>,
    pub clouds: Vec<Vec<f64>>,
    pub counts: Vec<usize>,
}

impl ScanConfig {
    pub fn from_params(p: &Params) -> Result<ScanConfig> {
        let axis = match p.get::<String>("axis")?.as_str() {
            "equilibrium_b" => Axis::EquilibriumB,
            "rate_a" => Axis::RateA,
            "rate_envelope_amax" => Axis::RateEnvelopeAmax,
            a => return usage(format!("unknown axis `{a}`")),
        };
        let x0 = match p.get::<String>("x0-policy")?.as_str() {
            "fixed" => X0Policy::Fixed(share(p, "x0")?),
            "seeded_random_interior" => X0Policy::SeededRandomInterior,
            x => return usage(format!("unknown x0 policy `{x}`")),
        };
        let has_rule = ["a", "amin", "amax", "table"].iter().any(|k| p.has(k));
        let rule = match axis {
            Axis::RateA if has_rule => return usage("axis rate_a takes no rate rule"),
            Axis::RateA => None,
            Axis::RateEnvelopeAmax => {
                if p.has("amax") || p.has("a") || p.has("table") {
                    return usage("axis rate_envelope_amax takes --amin and --kappa only");
                }
                let amin: f64 = p.get("amin")?;
                Some(RateRule::gaussian_bump(amin, amin, p.get("kappa")?)?)
            }
            Axis::EquilibriumB => Some(p.rule()?),
        };
        let b = match axis {
            Axis::EquilibriumB if p.has("b") => return usage("axis equilibrium_b scans b; drop --b"),
            Axis::EquilibriumB => None,
            _ => Some(super::equilibrium(p)?),
        };
        let cfg = ScanConfig {
            axis,
            grid: (p.get("lo")?, p.get("hi")?, p.get("points")?),
            burn_in: p.get("burn-in")?,
            keep: p.get("keep")?,
            rule,
            b,
            seed: p.get("seed")?,
            x0,
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        let (lo, hi, points) = self.grid;
        if lo >= hi || lo.is_nan() || hi.is_nan() || points < 2 || self.keep < 1 {
            return usage("need lo < hi, points >= 2 and keep >= 1");
        }
        if let X0Policy::Fixed(x) = self.x0 {
            if !(0.0..=1.0).contains(&x) {
                return usage(format!("x0 = {x} outside [0, 1]"));
            }
        }
        Ok(())
    }

    pub fn grid_values(&self) -> Vec<f64> {
        let (lo, hi, n) = self.grid;
        // weighted form keeps lo + hi − x_i equal to x_{n−1−i} on symmetric grids
        let m = (n - 1) as f64;
        (0..n).map(|i| (lo * (m - i as f64) + hi * i as f64) / m).collect()
    }

    fn system(&self, param: f64) -> Result<(RateRule, f64)> {
        Ok(match self.axis {
            Axis::EquilibriumB => (self.rule.clone().expect("rule set"), param),
            Axis::RateA => (RateRule::constant(param)?, self.b.expect("b set")),
            Axis::RateEnvelopeAmax => {
                let t = self.rule.as_ref().expect("rule set");
                let RuleKind::GaussianBump { sharpness } = t.kind else { unreachable!() };
                (RateRule::gaussian_bump(t.a_min, param, sharpness)?, self.b.expect("b set"))
            }
        })
    }

    fn x0(&self, index: usize) -> f64 {
        match self.x0 {
            X0Policy::Fixed(x) => x,
            X0Policy::SeededRandomInterior => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(index as u64);
                rng.gen_range(0.01..0.99)
            }
        }
    }
}

/// Sorted cluster centers (means) at resolution `res`.
pub fn cluster_centers(values: &[f64], res: f64) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=v.len() {
        if i == v.len() || v[i] - v[i - 1] > res {
            out.push(v[start..i].iter().sum::<f64>() / (i - start) as f64);
            start = i;
        }
    }
    out
}

pub fn scan(cfg: &ScanConfig) -> Result<Scan> {
    cfg.check()?;
    let params = cfg.grid_values();
    let clouds = params
        .par_iter()
        .enumerate()
        .map(|(i, &param)| {
            let (rule, b) = cfg.system(param)?;
            mwu_chaos::dynamics::MapParams::new(rule.a_min, b)?;
            let mut st = AdaptiveState::new(cfg.x0(i), &rule);
            for _ in 0..cfg.burn_in {
                st.advance(&rule, b);
            }
            let mut xs = Vec::with_capacity(cfg.keep);
            for _ in 0..cfg.keep {
                xs.push(st.share);
                st.advance(&rule, b);
            }
            Ok(xs)
        })
        .collect::<Result<Vec<_>>>()?;
    let counts = clouds.iter().map(|c| cluster_centers(c, CLUSTER_RES).len()).collect();
    Ok(Scan { params, clouds, counts })
}

fn label(axis: Axis) -> &'static str {
    match axis {
        Axis::EquilibriumB => "b",
        Axis::RateA => "a",
        Axis::RateEnvelopeAmax => "a_max",
    }
}

fn svg(s: &Scan, cfg: &ScanConfig, manifest: &[(String, String)]) -> String {
    let mut svg = Svg::new((cfg.grid.0, cfg.grid.1), (0.0, 1.0));
    let pts = s.params.iter().zip(&s.clouds).flat_map(|(&p, c)| c.iter().map(move |&x| (p, x)));
    svg.scatter(pts, 0.6, "black");
    svg.render(&format!("x against {}", label(cfg.axis)), manifest)
}

pub fn run(p: &Params) -> Result<()> {
    let cfg = ScanConfig::from_params(p)?;
    let s = scan(&cfg)?;
    let manifest = p.manifest();
    let out = p.out();
    match format(p)? {
        Format::Csv => {
            let rows = s
                .params
                .iter()
                .zip(&s.clouds)
                .flat_map(|(&param, c)| c.iter().map(move |&x| vec![fmt(param), fmt(x)]));
            write_csv(out.as_deref(), &manifest, &["param", "x"], rows)?;
            if let Some(path) = &out {
                let rows = s.params.iter().zip(&s.counts).map(|(&param, &n)| vec![fmt(param), n.to_string()]);
                write_csv(Some(&sibling(path, ".counts.csv")), &manifest, &["param", "count"], rows)?;
            }
        }
        Format::Json => {
            let mut body = Map::new();
            body.insert("param".into(), nums(&s.params));
            body.insert("count".into(), Value::from(s.counts.clone()));
            body.insert("x".into(), Value::Array(s.clouds.iter().map(|c| nums(c)).collect()));
            write_json(out.as_deref(), &manifest, body)?;
        }
        Format::Svg => write_text(out.as_deref(), &svg(&s, &cfg, &manifest))?,
    }
    if let Some(path) = p.svg() {
        write_text(Some(&path), &svg(&s, &cfg, &manifest))?;
    }
    Ok(())
}
