//! CSV, JSON and SVG writers. Every payload carries the run manifest.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::{Map, Number, Value};

use crate::error::Result;

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON number with the same rendering as [`fmt`]; non-finite values become strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&fmt(x)).expect("formatted float parses"))
    } else {
        Value::String(x.to_string())
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

/// `path` with `suffix` appended to the file name (`scan.csv` → `scan.csv.counts.csv`).
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Manifest as `# key = value` comment lines, then a header and rows.
pub fn write_csv<I>(path: Option<&Path>, manifest: &[(String, String)], header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = sink(path)?;
    for (k, v) in manifest {
        writeln!(w, "# {k} = {v}")?;
    }
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(header)?;
    for r in rows {
        csv.write_record(&r)?;
    }
    csv.flush()?;
    Ok(())
}

pub fn manifest_value(manifest: &[(String, String)]) -> Value {
    Value::Object(manifest.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect())
}

/// Object with `manifest` first, then `body` in insertion order.
pub fn write_json(path: Option<&Path>, manifest: &[(String, String)], body: Map<String, Value>) -> Result<()> {
    let mut obj = Map::new();
    obj.insert("manifest".into(), manifest_value(manifest));
    obj.extend(body);
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, &Value::Object(obj)).map_err(io::Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    let mut w = sink(path)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

/// Plot in data coordinates mapped onto a fixed canvas.
pub struct Svg {
    x: (f64, f64),
    y: (f64, f64),
    body: String,
}

const W: f64 = 800.0;
const H: f64 = 600.0;
const PAD: f64 = 40.0;

fn span(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

impl Svg {
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        Svg { x: span(x.0, x.1), y: span(y.0, y.1), body: String::new() }
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        let u = PAD + (x - self.x.0) / (self.x.1 - self.x.0) * (W - 2.0 * PAD);
        let v = H - PAD - (y - self.y.0) / (self.y.1 - self.y.0) * (H - 2.0 * PAD);
        (u, v)
    }

    pub fn scatter(&mut self, pts: impl IntoIterator<Item = (f64, f64)>, r: f64, color: &str) {
        for (x, y) in pts {
            let (u, v) = self.px(x, y);
            let _ = writeln!(self.body, r#"<circle cx="{u:.2}" cy="{v:.2}" r="{r}" fill="{color}"/>"#);
        }
    }

    pub fn polyline(&mut self, pts: impl IntoIterator<Item = (f64, f64)>, width: f64, color: &str) {
        let coords: Vec<String> = pts
            .into_iter()
            .map(|(x, y)| {
                let (u, v) = self.px(x, y);
                format!("{u:.2},{v:.2}")
            })
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{width}"/>"#,
            coords.join(" ")
        );
    }

    pub fn render(&self, title: &str, manifest: &[(String, String)]) -> String {
        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
        s.push_str("<!--\n");
        for (k, v) in manifest {
            let _ = writeln!(s, "{k} = {}", v.replace("--", "- -"));
        }
        s.push_str("-->\n");
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            W - 2.0 * PAD,
            H - 2.0 * PAD
        );
        let _ = writeln!(s, r#"<text x="{PAD}" y="{}" font-family="sans-serif" font-size="14">{title}</text>"#, PAD - 10.0);
        for (x, anchor, y) in [(PAD, "start", self.x.0), (W - PAD, "end", self.x.1)] {
            let _ = writeln!(
                s,
                r#"<text x="{x}" y="{}" font-family="sans-serif" font-size="11" text-anchor="{anchor}">{}</text>"#,
                H - PAD + 15.0,
                short(y)
            );
        }
        for (y, v) in [(H - PAD, self.y.0), (PAD + 10.0, self.y.1)] {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{y}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
                PAD - 4.0,
                short(v)
            );
        }
        s.push_str(&self.body);
        s.push_str("</svg>\n");
        s
    }
}

fn short(x: f64) -> String {
    format!("{x:.4}")
}
