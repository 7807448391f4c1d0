pub mod analyze;
pub mod bifurcation;
pub mod cobweb;
pub mod simulate;
pub mod thresholds;

use crate::config::Params;
use crate::error::{usage, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

pub fn format(p: &Params) -> Result<Format> {
    match p.raw("format").unwrap_or("csv") {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        "svg" => Ok(Format::Svg),
        f => usage(format!("unknown format `{f}` (csv, json or svg)")),
    }
}

pub(crate) fn share(p: &Params, key: &str) -> Result<f64> {
    let x: f64 = p.get(key)?;
    if !(0.0..=1.0).contains(&x) {
        return usage(format!("--{key} = {x} outside [0, 1]"));
    }
    Ok(x)
}

pub(crate) fn equilibrium(p: &Params) -> Result<f64> {
    let b: f64 = p.get("b")?;
    if !(b > 0.0 && b < 1.0) {
        return usage(format!("--b = {b} outside (0, 1)"));
    }
    Ok(b)
}
