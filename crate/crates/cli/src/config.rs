//! Parameter resolution: command-line flags over a config file over defaults.
//! The resolved set doubles as the run manifest embedded in every output.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use mwu_chaos::dynamics::RateRule;
use serde_json::Value;

use crate::error::{usage, CliError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Keys that never enter the manifest: they name files, not computations.
const LOCAL_KEYS: [&str; 3] = ["out", "config", "svg"];

/// Flag name, default, help.
pub type Key = (&'static str, Option<&'static str>, &'static str);

/// Flags accepted by every subcommand.
pub const COMMON: &[Key] = &[
    ("b", None, "equilibrium share of route 1, in (0, 1)"),
    ("a", None, "fixed learning rate"),
    ("amin", None, "lower rate of the Gaussian-bump rule"),
    ("amax", None, "peak rate g(0) of the Gaussian-bump rule"),
    ("kappa", Some("10"), "sharpness of the Gaussian-bump rule"),
    ("table", None, "piecewise-linear rule as r:a,r:a,..."),
    ("seed", Some("0"), "seed for every random draw"),
    ("format", Some("csv"), "csv, json or svg"),
    ("out", None, "output path (stdout when absent)"),
    ("config", None, "key = value file, or an earlier output, to start from"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub command: String,
    values: BTreeMap<String, String>,
}

fn canon(key: &str) -> String {
    key.trim().trim_start_matches("--").replace('_', "-")
}

/// Reads `key = value` lines (`#` starts a comment) or a JSON object, either a
/// flat map or an output bundle carrying a `manifest` member.
pub fn read_config(path: &Path) -> Result<(Option<String>, BTreeMap<String, String>)> {
    let text = fs::read_to_string(path)?;
    let mut out = BTreeMap::new();
    if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let obj = v.get("manifest").unwrap_or(&v);
        let Some(map) = obj.as_object() else {
            return usage(format!("{}: expected a JSON object", path.display()));
        };
        let mut command = None;
        for (k, v) in map {
            let s = match v {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                Value::Bool(b) => b.to_string(),
                _ => return usage(format!("{}: value of {k} is not a scalar", path.display())),
            };
            match k.as_str() {
                "command" => command = Some(s),
                "version" => {}
                _ => {
                    out.insert(canon(k), s);
                }
            }
        }
        return Ok((command, out));
    }
    if text.starts_with("# command = ") {
        // a CSV output: the manifest is its leading comment block
        let mut command = None;
        for line in text.lines().map_while(|l| l.strip_prefix("# ")) {
            let Some((k, v)) = line.split_once(" = ") else { break };
            match k {
                "command" => command = Some(v.to_string()),
                "version" => {}
                _ => {
                    out.insert(canon(k), v.to_string());
                }
            }
        }
        return Ok((command, out));
    }
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return usage(format!("{}:{}: expected key = value", path.display(), no + 1));
        };
        out.insert(canon(k), v.trim().to_string());
    }
    Ok((None, out))
}

impl Params {
    /// `explicit` holds flags given on the command line, as raw strings.
    pub fn resolve(
        command: &str,
        keys: &[Key],
        explicit: BTreeMap<String, String>,
    ) -> Result<Params> {
        let known = |k: &str| COMMON.iter().chain(keys).any(|(n, _, _)| *n == k);
        let mut values = BTreeMap::new();
        for (k, d, _) in COMMON.iter().chain(keys) {
            if let Some(d) = d {
                values.insert(k.to_string(), d.to_string());
            }
        }
        if let Some(path) = explicit.get("config") {
            let (cmd, file) = read_config(Path::new(path))?;
            if let Some(c) = cmd.filter(|c| c != command) {
                return usage(format!("config was written by `{c}`, not `{command}`"));
            }
            for (k, v) in file {
                if !known(&k) {
                    return usage(format!("unknown key `{k}` in {path}"));
                }
                values.insert(k, v);
            }
        }
        for (k, v) in explicit {
            values.insert(canon(&k), v);
        }
        Ok(Params { command: command.to_string(), values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn opt<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("cannot parse --{key} value `{s}`"))),
        }
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        self.opt(key)?.ok_or_else(|| CliError::Usage(format!("--{key} is required")))
    }

    pub fn out(&self) -> Option<PathBuf> {
        self.raw("out").map(PathBuf::from)
    }

    pub fn svg(&self) -> Option<PathBuf> {
        self.raw("svg").map(PathBuf::from)
    }

    /// `command`, `version` and every resolved computational key, sorted.
    pub fn manifest(&self) -> Vec<(String, String)> {
        let mut m = vec![("command".to_string(), self.command.clone()), ("version".to_string(), VERSION.to_string())];
        m.extend(
            self.values
                .iter()
                .filter(|(k, _)| !LOCAL_KEYS.contains(&k.as_str()))
                .map(|(k, v)| (k.clone(), v.clone())),
        );
        m
    }

    /// `--a` gives a constant rate, `--amin/--amax[/--kappa]` a Gaussian bump,
    /// `--table r:a,r:a,...` a piecewise-linear table.
    pub fn rule(&self) -> Result<RateRule> {
        let fixed = self.has("a");
        let bump = self.has("amin") || self.has("amax");
        let table = self.has("table");
        match (fixed, bump, table) {
            (true, false, false) => Ok(RateRule::constant(self.get("a")?)?),
            (false, true, false) => {
                Ok(RateRule::gaussian_bump(self.get("amin")?, self.get("amax")?, self.get("kappa")?)?)
            }
            (false, false, true) => {
                let knots = self
                    .get::<String>("table")?
                    .split(',')
                    .map(|kv| {
                        let (r, a) = kv
                            .split_once(':')
                            .ok_or_else(|| CliError::Usage(format!("table entry `{kv}` is not r:a")))?;
                        let p = |s: &str| {
                            s.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad number `{s}` in table")))
                        };
                        Ok((p(r)?, p(a)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(RateRule::lookup_table(knots)?)
            }
            (false, false, false) => usage("give --a, or --amin and --amax, or --table"),
            _ => usage("--a, --amin/--amax and --table are mutually exclusive"),
        }
    }
}
