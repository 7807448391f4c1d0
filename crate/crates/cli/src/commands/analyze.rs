//! `analyze`: a JSON bundle of sub-analyses, each recorded with its own status.

use serde_json::{Map, Value};

use mwu_chaos::chaos::{
    build_turbulent_pair, lyapunov, period2_points, period3_find, refine_nested, schedule_gaps, scrambled_metrics,
    track_symbolic_pair, verify_schedule, NestedFamily, SearchConfig, SymbolicSchedule, TurbulentPair,
};
use mwu_chaos::diagnostics::{convergence_suite, ConvergenceReport, SampleSet};
use mwu_chaos::dynamics::{map, MapParams, RateRule};
use mwu_chaos::geometry::{
    absorption_time_adaptive, absorption_time_fixed, check_perpetual, envelope, volume_expansion_adaptive,
    volume_expansion_fixed,
};
use mwu_chaos::{Error, Interval};

use super::{equilibrium, share};
use crate::config::{Key, Params};
use crate::error::{usage, CliError, Result};
use crate::output::{num, nums, write_json};

pub const KEYS: &[Key] = &[
    ("suite", Some("all"), "fixed, adaptive, chaos, convergence or all"),
    ("x0", Some("0.3"), "start for Lyapunov and scrambling runs"),
    ("eps", Some("0.5"), "rate slack for adaptive expansion"),
    ("depth", Some("12"), "depth of the nested interval family"),
    ("bits", Some("0000"), "first itinerary to track"),
    ("bits2", Some("0101"), "second itinerary, tracked on the same schedule"),
    ("horizons", Some("1000,10000,100000"), "convergence horizons"),
    ("k", Some("2"), "lag of the strong-convergence gap"),
    ("lyapunov-n", Some("200000"), "steps in each Lyapunov estimate"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// The analysis ran and found that the object does not exist here.
    Negative,
    /// The analysis could not reach a verdict within its budget.
    Failed,
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Negative => "negative",
            Status::Failed => "failed",
        }
    }

    fn of(e: &Error) -> Status {
        match e {
            Error::Domain(_) | Error::NoCriticalPoints { .. } | Error::NotFound(_) => Status::Negative,
            Error::NotAbsorbed { .. }
            | Error::NotExpanded { .. }
            | Error::PrecisionExhausted { .. }
            | Error::NotTracked { .. } => Status::Failed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub name: String,
    pub status: Status,
    pub body: Value,
}

impl Entry {
    fn json(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), Value::from(self.name.clone()));
        m.insert("status".into(), Value::from(self.status.name()));
        m.insert("result".into(), self.body.clone());
        Value::Object(m)
    }
}

fn record(out: &mut Vec<Entry>, name: &str, r: mwu_chaos::Result<Value>) {
    let (status, body) = match r {
        Ok(v) => (Status::Ok, v),
        Err(e) => {
            let mut m = Map::new();
            m.insert("kind".into(), Value::from(e.kind()));
            m.insert("message".into(), Value::from(e.to_string()));
            (Status::of(&e), Value::Object(m))
        }
    };
    out.push(Entry { name: name.to_string(), status, body });
}

fn skip(out: &mut Vec<Entry>, name: &str, why: &str) {
    let mut m = Map::new();
    m.insert("kind".into(), Value::from("skipped"));
    m.insert("message".into(), Value::from(why));
    out.push(Entry { name: name.to_string(), status: Status::Negative, body: Value::Object(m) });
}

fn obj<const N: usize>(fields: [(&str, Value); N]) -> Value {
    Value::Object(fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

fn iv(i: &Interval) -> Value {
    nums(&[i.lo, i.hi])
}

fn bits(p: &Params, key: &str) -> Result<Vec<u8>> {
    p.get::<String>(key)?
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => usage(format!("--{key} must be a string of 0 and 1")),
        })
        .collect()
}

struct Ctx {
    rule: RateRule,
    b: f64,
    x0: f64,
    lyapunov_n: usize,
}

fn fixed(c: &Ctx, out: &mut Vec<Entry>) {
    let a = c.rule.limit_rate();
    let b = c.b;
    let p = MapParams { a, b };
    record(out, "envelope", envelope(&p).map(|e| {
        obj([
            ("rate", num(e.rate)),
            ("x_max", num(e.x_max)),
            ("x_min", num(e.x_min)),
            ("f_max", num(e.f_max)),
            ("f_min", num(e.f_min)),
            ("ordered", Value::from(e.ordered)),
        ])
    }));
    record(out, "perpetual", check_perpetual(&p).map(|r| {
        obj([
            ("set", iv(&r.set)),
            ("image", iv(&r.image)),
            ("forward_invariant", Value::from(r.forward_invariant)),
            ("surjective", Value::from(r.surjective)),
            ("margin", num(r.margin)),
        ])
    }));
    record(
        out,
        "absorption",
        absorption_time_fixed(&Interval::new(0.01, 0.02), &p, 10_000)
            .map(|n| obj([("interval", nums(&[0.01, 0.02])), ("n", Value::from(n))])),
    );
    let near = Interval::new((b - 1e-3).max(1e-12), (b + 1e-3).min(1.0 - 1e-12));
    record(
        out,
        "volume_expansion",
        volume_expansion_fixed(&near, &p, 1000).map(|n| obj([("interval", iv(&near)), ("n", Value::from(n))])),
    );
    record(out, "period2", period2_points(&p).map(|v| {
        Value::Array(v.iter().map(|&(l, r)| nums(&[l, r])).collect())
    }));
    record(out, "period3", period3_find(&p).map(|o| {
        obj([
            ("points", nums(&o.points)),
            ("residual", num(o.residual)),
            ("witness", num(o.witness)),
        ])
    }));
    record(
        out,
        "lyapunov",
        RateRule::constant(a).and_then(|r| lyapunov(c.x0, &r, b, c.lyapunov_n, 1000)).map(num),
    );
    // settles on b within 1e-9 from 0.9, or reports that it does not
    let (mut x, mut n) = (0.9, 0);
    while n < 100_000 && (x - b).abs() > 1e-9 {
        x = map(x, a, b);
        n += 1;
    }
    record(
        out,
        "convergence_to_b",
        Ok(obj([("x0", num(0.9)), ("converged", Value::from((x - b).abs() <= 1e-9)), ("steps", Value::from(n))])),
    );
}

fn adaptive(c: &Ctx, eps: f64, out: &mut Vec<Entry>) {
    let (rule, b) = (&c.rule, c.b);
    let wide = Interval::new(0.05, 0.95);
    record(out, "adaptive_absorption", absorption_time_adaptive(&wide, rule, b, 512, 100_000).map(|r| {
        obj([
            ("interval", iv(&wide)),
            ("n", Value::from(r.n)),
            ("delta", nums(&[r.delta.lo, r.delta.hi])),
            ("delta_monotone", Value::from(r.delta.monotone)),
            ("interiority", num(r.interiority)),
            ("reentries", Value::from(r.reentries)),
            ("samples", Value::from(r.samples)),
        ])
    }));
    let near = Interval::new(b - 0.05, b + 0.05);
    record(out, "adaptive_expansion", volume_expansion_adaptive(&near, rule, b, eps, 1 << 14, 10_000).map(|r| {
        obj([
            ("interval", iv(&near)),
            ("n", Value::from(r.n)),
            ("target", iv(&r.target)),
            ("resolution", num(r.resolution)),
            ("covers_amin", r.covers_amin.map_or(Value::Null, Value::from)),
        ])
    }));
    record(out, "adaptive_lyapunov", lyapunov(c.x0, rule, b, c.lyapunov_n, 1000).map(num));
}

fn schedule(s: &SymbolicSchedule, rule: &RateRule, b: f64) -> Value {
    let v = verify_schedule(s, rule, b);
    obj([
        ("bits", Value::from(s.bits.iter().map(|c| char::from(b'0' + c)).collect::<String>())),
        ("times", Value::from(s.times.clone())),
        ("x0", nums(&[s.x0.0, s.x0.1])),
        ("boxes", Value::Array(s.boxes.iter().map(iv).collect())),
        ("positions", nums(&v.positions)),
        ("margins", nums(&v.margins)),
        ("all_hit", Value::from(v.all_hit())),
    ])
}

fn chaos(c: &Ctx, depth: usize, pair: (&[u8], &[u8]), out: &mut Vec<Entry>) {
    let (rule, b) = (&c.rule, c.b);
    let a_star = rule.limit_rate();
    let p = MapParams { a: a_star, b };
    if !out.iter().any(|e| e.name == "period3") {
        record(out, "period3", period3_find(&p).map(|o| obj([("points", nums(&o.points)), ("residual", num(o.residual))])));
    }
    let tp = build_turbulent_pair(&p);
    let base: Option<TurbulentPair> = tp.as_ref().ok().copied();
    record(out, "turbulent_pair", tp.map(|t| {
        obj([
            ("j", iv(&t.j)),
            ("k", iv(&t.k)),
            ("gap", num(t.gap())),
            ("margin", num(t.margin())),
        ])
    }));
    let fam: Option<NestedFamily> = match base {
        Some(t) => {
            let r = refine_nested(&t, depth);
            let f = r.as_ref().ok().cloned();
            record(out, "nested_family", r.map(|f| {
                obj([
                    ("depth", Value::from(f.depth)),
                    ("v", Value::Array(f.v.iter().map(iv).collect())),
                    ("u", Value::Array(f.u.iter().map(iv).collect())),
                    ("v_margins", nums(&f.v_margins)),
                    ("u_margins", nums(&f.u_margins)),
                ])
            }));
            f
        }
        None => {
            skip(out, "nested_family", "no turbulent pair at the limit rate");
            None
        }
    };
    if b == 0.5 {
        skip(out, "tracking", "b = 1/2 is outside the scope of the tracking construction");
    } else if rule.is_constant() {
        skip(out, "tracking", "tracking needs an adaptive rule");
    } else if let Some(f) = fam {
        let r = track_symbolic_pair(pair.0, pair.1, rule, b, &f, &SearchConfig::default()).and_then(|(s, t)| {
            let gaps = schedule_gaps(&s, &t, rule, b)?;
            Ok(obj([
                ("first", schedule(&s, rule, b)),
                ("second", schedule(&t, rule, b)),
                ("gaps", nums(&gaps)),
                ("gap_jk", num(f.base.gap())),
            ]))
        });
        record(out, "tracking", r);
    } else {
        skip(out, "tracking", "no nested family at the limit rate");
    }
    let y0 = c.x0 + 1e-9;
    record(out, "scrambled", scrambled_metrics(c.x0, y0, rule, b, 100_000, 0.5).map(|g| {
        obj([("x0", num(c.x0)), ("y0", num(y0)), ("min_gap", num(g.min_gap)), ("max_gap", num(g.max_gap))])
    }));
}

fn report(r: &ConvergenceReport) -> Value {
    obj([
        ("horizon", Value::from(r.horizon)),
        ("sup", num(r.sup_value)),
        ("reference", num(r.reference)),
        ("argmax", Value::from(r.argmax)),
        ("bound_violations", r.bound_violations.map_or(Value::Null, Value::from)),
        ("per_sample", nums(&r.per_sample)),
    ])
}

fn convergence(c: &Ctx, seed: u64, k: usize, horizons: &[usize], out: &mut Vec<Entry>) {
    let r = SampleSet::standard(Interval::new(0.1, 0.9), seed)
        .and_then(|s| convergence_suite(&s, &c.rule, c.b, k, horizons))
        .map(|s| {
            obj([
                ("k", Value::from(s.k)),
                ("pseudo_regret", Value::Array(s.pseudo_regret.iter().map(report).collect())),
                ("rate_gap", Value::Array(s.rate_gap.iter().map(report).collect())),
                ("cesaro_mean", Value::Array(s.cesaro_mean.iter().map(report).collect())),
                ("strong_gap", Value::Array(s.strong_gap.iter().map(report).collect())),
                ("regret_trend", nums(&s.regret_trend())),
            ])
        });
    record(out, "convergence", r);
}

pub fn entries(p: &Params) -> Result<Vec<Entry>> {
    let suite: String = p.get("suite")?;
    let (f, a, ch, cv) = match suite.as_str() {
        "fixed" => (true, false, false, false),
        "adaptive" => (false, true, false, false),
        "chaos" => (false, false, true, false),
        "convergence" => (false, false, false, true),
        "all" => (true, true, true, true),
        s => return usage(format!("unknown suite `{s}`")),
    };
    let c = Ctx { rule: p.rule()?, b: equilibrium(p)?, x0: share(p, "x0")?, lyapunov_n: p.get("lyapunov-n")? };
    let (s1, s2) = (bits(p, "bits")?, bits(p, "bits2")?);
    let horizons = p
        .get::<String>("horizons")?
        .split(',')
        .map(|h| h.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("bad horizon `{h}`"))))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    if f {
        fixed(&c, &mut out);
    }
    if a {
        adaptive(&c, p.get("eps")?, &mut out);
    }
    if ch {
        chaos(&c, p.get("depth")?, (&s1, &s2), &mut out);
    }
    if cv {
        convergence(&c, p.get("seed")?, p.get("k")?, &horizons, &mut out);
    }
    Ok(out)
}

/// Writes the bundle, then fails with exit code 3 if any entry failed.
pub fn run(p: &Params) -> Result<()> {
    if p.raw("format") == Some("svg") {
        return usage("analyze writes JSON only");
    }
    let es = entries(p)?;
    let mut body = Map::new();
    body.insert("suite".into(), Value::from(p.get::<String>("suite")?));
    body.insert("entries".into(), Value::Array(es.iter().map(Entry::json).collect()));
    write_json(p.out().as_deref(), &p.manifest(), body)?;
    let failed: Vec<&str> = es.iter().filter(|e| e.status == Status::Failed).map(|e| e.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Analysis(format!("failed entries: {}", failed.join(", "))))
    }
}
