//! `simulate`: one orbit, written as a `step,x,a,r` trace.

use serde_json::{Map, Value};

use mwu_chaos::dynamics::{iterate_adaptive, OrbitTrace};

use super::{equilibrium, format, share, Format};
use crate::config::{Key, Params};
use crate::error::Result;
use crate::output::{fmt, num, sibling, write_csv, write_json, write_text, Svg};

pub const KEYS: &[Key] = &[
    ("x0", None, "initial share of route 1"),
    ("n", Some("1000"), "steps to run"),
    ("burn-in", Some("0"), "leading steps left out of the trace"),
];

pub fn trace(p: &Params) -> Result<OrbitTrace> {
    let b = equilibrium(p)?;
    let rule = p.rule()?;
    let n: usize = p.get("n")?;
    let burn_in: usize = p.get("burn-in")?;
    Ok(iterate_adaptive(share(p, "x0")?, &rule, b, n, burn_in)?)
}

pub fn run(p: &Params) -> Result<()> {
    let t = trace(p)?;
    let manifest = p.manifest();
    let out = p.out();
    match format(p)? {
        Format::Csv => {
            let rows = t
                .records
                .iter()
                .map(|r| vec![r.step.to_string(), fmt(r.share), fmt(r.rate), fmt(r.pseudo_regret)]);
            write_csv(out.as_deref(), &manifest, &["step", "x", "a", "r"], rows)?;
            if let Some(path) = &out {
                write_json(Some(&sibling(path, ".manifest.json")), &manifest, Map::new())?;
            }
        }
        Format::Json => {
            let records = t
                .records
                .iter()
                .map(|r| {
                    let mut m = Map::new();
                    m.insert("step".into(), Value::from(r.step));
                    m.insert("x".into(), num(r.share));
                    m.insert("a".into(), num(r.rate));
                    m.insert("r".into(), num(r.pseudo_regret));
                    Value::Object(m)
                })
                .collect();
            let mut body = Map::new();
            body.insert("records".into(), Value::Array(records));
            write_json(out.as_deref(), &manifest, body)?;
        }
        Format::Svg => {
            let first = t.records.first().map_or(0, |r| r.step) as f64;
            let last = t.records.last().map_or(1, |r| r.step) as f64;
            let mut svg = Svg::new((first, last), (0.0, 1.0));
            svg.polyline(t.records.iter().map(|r| (r.step as f64, r.share)), 0.8, "steelblue");
            write_text(out.as_deref(), &svg.render("x_n", &manifest))?;
        }
    }
    Ok(())
}
