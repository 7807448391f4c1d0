//! `thresholds`: grid estimates of the rate thresholds at one equilibrium.

use serde_json::{Map, Value};

use mwu_chaos::geometry::estimate_thresholds;

use super::{equilibrium, format, Format};
use crate::config::{Key, Params};
use crate::error::{usage, Result};
use crate::output::{fmt, num, write_csv, write_json};

pub const KEYS: &[Key] = &[
    ("lo", Some("4.5"), "smallest rate on the grid"),
    ("hi", Some("40"), "largest rate on the grid"),
    ("step", Some("0.5"), "grid spacing"),
];

pub fn run(p: &Params) -> Result<()> {
    let b = equilibrium(p)?;
    let t = estimate_thresholds(b, p.get("lo")?, p.get("hi")?, p.get("step")?)?;
    let manifest = p.manifest();
    let out = p.out();
    match format(p)? {
        Format::Csv => {
            let rows = t.entries.iter().map(|e| {
                vec![
                    e.name.name().to_string(),
                    e.estimate.map(fmt).unwrap_or_default(),
                    e.violations.to_string(),
                    e.note.clone().unwrap_or_default(),
                ]
            });
            write_csv(out.as_deref(), &manifest, &["name", "estimate", "violations", "note"], rows)?;
        }
        Format::Json => {
            let entries = t
                .entries
                .iter()
                .map(|e| {
                    let mut m = Map::new();
                    m.insert("name".into(), Value::from(e.name.name()));
                    m.insert("estimate".into(), e.estimate.map_or(Value::Null, num));
                    m.insert("violations".into(), Value::from(e.violations));
                    m.insert("note".into(), e.note.clone().map_or(Value::Null, Value::from));
                    Value::Object(m)
                })
                .collect();
            let mut body = Map::new();
            body.insert("entries".into(), Value::Array(entries));
            write_json(out.as_deref(), &manifest, body)?;
        }
        Format::Svg => return usage("thresholds has no SVG rendering"),
    }
    Ok(())
}
