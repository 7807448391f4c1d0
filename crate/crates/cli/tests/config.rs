use std::collections::BTreeMap;
use std::fs;

use mwu_chaos::dynamics::RuleKind;
use mwu_scan::commands::bifurcation::cluster_centers;
use mwu_scan::config::{read_config, Params};
use mwu_scan::CliError;
use tempfile::TempDir;

const KEYS: &[mwu_scan::config::Key] = &[("n", Some("1000"), ""), ("burn-in", Some("0"), "")];

fn flags(kv: &[(&str, &str)]) -> BTreeMap<String, String> {
    kv.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

#[test]
fn flags_beat_file_beat_defaults() {
    let d = TempDir::new().unwrap();
    let f = d.path().join("run.conf");
    fs::write(&f, "b = 0.3\nn = 50  # short\nburn_in = 5\n").unwrap();
    let p = Params::resolve("simulate", KEYS, flags(&[("config", f.to_str().unwrap()), ("n", "7")])).unwrap();
    assert_eq!(p.get::<usize>("n").unwrap(), 7);
    assert_eq!(p.get::<usize>("burn-in").unwrap(), 5);
    assert_eq!(p.get::<f64>("b").unwrap(), 0.3);
    assert_eq!(p.raw("kappa"), Some("10"));
    let keys: Vec<String> = p.manifest().into_iter().map(|(k, _)| k).collect();
    assert_eq!(&keys[..2], ["command", "version"]);
    assert!(!keys.iter().any(|k| k == "config" || k == "out"));
}

#[test]
fn manifests_read_back_from_json_and_csv() {
    let d = TempDir::new().unwrap();
    let j = d.path().join("m.json");
    fs::write(&j, r#"{"manifest": {"command": "cobweb", "version": "0.1.0", "b": "0.4", "x0": "0.2"}, "segments": []}"#).unwrap();
    let (cmd, kv) = read_config(&j).unwrap();
    assert_eq!(cmd.as_deref(), Some("cobweb"));
    assert_eq!(kv.get("x0").map(String::as_str), Some("0.2"));
    assert!(!kv.contains_key("version"));

    let c = d.path().join("t.csv");
    fs::write(&c, "# command = simulate\n# version = 0.1.0\n# a = 25\n# burn-in = 3\nstep,x,a,r\n0,1,2,3\n").unwrap();
    let (cmd, kv) = read_config(&c).unwrap();
    assert_eq!(cmd.as_deref(), Some("simulate"));
    assert_eq!(kv.len(), 2);
    assert_eq!(kv["burn-in"], "3");

    let err = Params::resolve("simulate", KEYS, flags(&[("config", j.to_str().unwrap())])).unwrap_err();
    assert!(matches!(err, CliError::Usage(_)));
}

#[test]
fn unknown_keys_are_usage_errors() {
    let d = TempDir::new().unwrap();
    let f = d.path().join("bad.conf");
    fs::write(&f, "b = 0.4\nwidth = 3\n").unwrap();
    let err = Params::resolve("simulate", KEYS, flags(&[("config", f.to_str().unwrap())])).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    fs::write(&f, "just words\n").unwrap();
    assert!(Params::resolve("simulate", KEYS, flags(&[("config", f.to_str().unwrap())])).is_err());
}

#[test]
fn rule_flags() {
    let rule = |kv: &[(&str, &str)]| Params::resolve("simulate", KEYS, flags(kv)).unwrap().rule();
    assert!(rule(&[("a", "25")]).unwrap().is_constant());
    let r = rule(&[("amin", "20"), ("amax", "30")]).unwrap();
    assert_eq!((r.a_min, r.a_max, r.kind), (20.0, 30.0, RuleKind::GaussianBump { sharpness: 10.0 }));
    let t = rule(&[("table", "-1:20, 0:30, 1:20")]).unwrap();
    assert_eq!(t.g(0.5), 25.0);
    assert!(matches!(rule(&[("a", "25"), ("amin", "20")]), Err(CliError::Usage(_))));
    assert!(matches!(rule(&[]), Err(CliError::Usage(_))));
    assert!(matches!(rule(&[("a", "-1")]), Err(CliError::Usage(_))));
    assert!(matches!(rule(&[("table", "1-20")]), Err(CliError::Usage(_))));
}

#[test]
fn clusters_merge_within_resolution() {
    assert_eq!(cluster_centers(&[0.5, 0.5 + 5e-5, 0.2], 1e-4).len(), 2);
    assert_eq!(cluster_centers(&[0.2, 0.4, 0.6, 0.8], 1e-4), vec![0.2, 0.4, 0.6, 0.8]);
    // chains of close values merge even when the ends are far apart
    let chain: Vec<f64> = (0..100).map(|i| 0.1 + i as f64 * 9e-5).collect();
    assert_eq!(cluster_centers(&chain, 1e-4).len(), 1);
    assert!(cluster_centers(&[], 1e-4).is_empty());
}
