//! `cmachine`: steady states, regime diagrams, power/efficiency curves and
//! collision runs for the three-level coherent thermal machine.
//!
//! Exit codes: 0 success, 1 invalid configuration, 2 solver failure,
//! 3 failed validation.

mod commands;
mod config;
mod validate;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{value_parser, Arg, ArgAction, ArgMatches, Command};

use commands::Failure;
use config::{load_config, normalize_key, RunConfig, KEYS};

const SUBCOMMANDS: &[(&str, &str)] = &[
    ("ness", "Steady state, currents and regime as JSON"),
    ("classify", "Operating regime label of the configured point"),
    (
        "diagram",
        "Regime diagram over a level spacing and one coherence amplitude (CSV)",
    ),
    ("curve", "Power and efficiency along a level spacing (CSV)"),
    (
        "collide",
        "Repeated collisions with per-step bookkeeping (CSV)",
    ),
    (
        "validate",
        "Check the physical invariants at the configured point",
    ),
    (
        "transitions",
        "Closed-form transition amplitudes for each reservoir (CSV)",
    ),
];

fn cli() -> Command {
    let mut cmd = Command::new("cmachine")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Three-level thermal machine driven by collisional reservoirs with coherent units")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(
            Arg::new("config")
                .long("config")
                .global(true)
                .value_name("FILE")
                .value_parser(value_parser!(PathBuf))
                .help("Flat `key = value` file; flags override its values"),
        )
        .arg(
            Arg::new("natural_units")
                .long("natural-units")
                .global(true)
                .action(ArgAction::SetTrue)
                .help("Report powers in natural units instead of T1 gamma1 / 2"),
        );
    for k in KEYS {
        let mut arg = Arg::new(k.name)
            .long(k.name.replace('_', "-"))
            .global(true)
            .value_name("VALUE")
            .allow_negative_numbers(true)
            .help(k.help);
        if k.name == "output" {
            arg = arg.short('o').value_name("FILE");
        }
        cmd = cmd.arg(arg);
    }
    for (name, about) in SUBCOMMANDS {
        cmd = cmd.subcommand(Command::new(*name).about(*about));
    }
    cmd
}

fn overrides(m: &ArgMatches) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for k in KEYS {
        if let Some(v) = m.get_one::<String>(k.name) {
            out.insert(normalize_key(k.name), v.clone());
        }
    }
    if m.get_flag("natural_units") {
        out.insert("units".into(), "natural".into());
    }
    out
}

fn write_to(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::Config(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(name: &str, m: &ArgMatches) -> Result<(), Failure> {
    let file = match m.get_one::<PathBuf>("config") {
        Some(path) => load_config(path)?,
        None => BTreeMap::new(),
    };
    let cfg = RunConfig::build(file, overrides(m))?;
    let out = cfg.output.as_deref();
    match name {
        "ness" => write_to(out, &commands::ness(&cfg)?),
        "classify" => write_to(out, &commands::classify_point(&cfg)?),
        "transitions" => write_to(out, &commands::transitions(&cfg)?),
        "collide" => write_to(out, &commands::collide(&cfg)?),
        "diagram" => {
            let d = commands::diagram(&cfg)?;
            if let Some(path) = cfg.str("overlay_output") {
                write_to(Some(Path::new(path)), &d.overlay)?;
            }
            write_to(out, &d.grid)
        }
        "curve" => {
            let c = commands::curve(&cfg)?;
            if let Some(line) = &c.maximum {
                eprintln!("{line}");
            }
            write_to(out, &c.table)
        }
        "validate" => {
            let mut report = String::new();
            let mut failed = 0;
            for (check, outcome) in validate::run_checks(&cfg.params, cfg.eps) {
                let (tag, detail) = match outcome {
                    Ok(d) => ("PASS", d),
                    Err(d) => {
                        failed += 1;
                        ("FAIL", d)
                    }
                };
                report.push_str(&format!("{tag} {check}: {detail}\n"));
            }
            write_to(out, &report)?;
            if failed > 0 {
                return Err(Failure::Validation(format!("{failed} check(s) failed")));
            }
            Ok(())
        }
        other => unreachable!("unknown subcommand {other}"),
    }
}

fn main() -> ExitCode {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    match run(name, sub) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
