//! Front end for the `chaos-mwu` binary: simulations, bifurcation scans,
//! cobweb exports, analysis bundles and threshold tables.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::collections::BTreeMap;
use std::ffi::OsString;

use clap::{Arg, ArgMatches, Command};

use config::{Key, Params, COMMON};
pub use error::{CliError, Result};

type Runner = fn(&Params) -> Result<()>;

const COMMANDS: [(&str, &str, &[Key], Runner); 5] = [
    ("simulate", "write one orbit as a step,x,a,r trace", commands::simulate::KEYS, commands::simulate::run),
    ("bifurcation", "scan long-run shares over b, a or a_max", commands::bifurcation::KEYS, commands::bifurcation::run),
    ("cobweb", "export cobweb segments of an orbit", commands::cobweb::KEYS, commands::cobweb::run),
    ("analyze", "run analysis suites into a JSON bundle", commands::analyze::KEYS, commands::analyze::run),
    ("thresholds", "estimate rate thresholds at one b", commands::thresholds::KEYS, commands::thresholds::run),
];

fn arg(k: &Key) -> Arg {
    let help = match k.1 {
        Some(d) => format!("{} [default: {d}]", k.2),
        None => k.2.to_string(),
    };
    Arg::new(k.0).long(k.0).value_name("VALUE").help(help).allow_hyphen_values(true)
}

pub fn cli() -> Command {
    let mut cmd = Command::new("chaos-mwu")
        .version(config::VERSION)
        .about("MWU dynamics in two-route linear congestion games")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for (name, about, keys, _) in COMMANDS {
        let sub = Command::new(name).about(about).args(COMMON.iter().chain(keys).map(arg));
        cmd = cmd.subcommand(sub);
    }
    cmd
}

fn explicit(m: &ArgMatches) -> BTreeMap<String, String> {
    m.ids()
        .filter_map(|id| m.get_one::<String>(id.as_str()).map(|v| (id.to_string(), v.clone())))
        .collect()
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let m = match cli().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(e.render().to_string().trim_start_matches("error: ").trim_end().to_string())),
    };
    let (name, sub) = m.subcommand().expect("subcommand required");
    let (_, _, keys, runner) = COMMANDS.iter().find(|c| c.0 == name).expect("known subcommand");
    let params = Params::resolve(name, keys, explicit(sub))?;
    runner(&params)
}
