//! Argument parsing and dispatch.

use crate::commands::CommandRegistry;
use crate::config::ExperimentConfig;
use crate::error::{exit, CliError};
use crate::output::{write_run, Artifacts, RunManifest, VERSION};
use crate::report::merge;
use crate::validate::validate;
use clap::{value_parser, Arg, ArgMatches};
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

pub fn cli(registry: &CommandRegistry) -> clap::Command {
    let mut app = clap::Command::new("birkdist")
        .version(VERSION)
        .about("Birkhoff sum experiments over expanding interval maps and toral automorphisms")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(
            Arg::new("config")
                .long("config")
                .env("BIRKDIST_CONFIG")
                .global(true)
                .value_parser(value_parser!(PathBuf))
                .help("TOML experiment config; built-in defaults when absent"),
        )
        .arg(
            Arg::new("out")
                .long("out")
                .env("BIRKDIST_OUT")
                .global(true)
                .value_parser(value_parser!(PathBuf))
                .help("Output directory"),
        )
        .arg(
            Arg::new("seed")
                .long("seed")
                .env("BIRKDIST_SEED")
                .global(true)
                .value_parser(value_parser!(u64))
                .help("Seed for every random stream"),
        )
        .arg(
            Arg::new("threads")
                .long("threads")
                .env("BIRKDIST_THREADS")
                .global(true)
                .value_parser(value_parser!(usize))
                .help("Worker threads, 0 for all cores"),
        );
    for c in registry.iter() {
        app = app.subcommand(clap::Command::new(c.name()).about(c.about()));
    }
    app.subcommand(clap::Command::new("validate").about("Check a config and print its normalized form")).subcommand(
        clap::Command::new("report").about("Merge the verdicts of run manifests").arg(
            Arg::new("manifests").num_args(0..).value_parser(value_parser!(PathBuf)).help("manifest.json files"),
        ),
    )
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))
}

fn load_config(m: &ArgMatches) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match m.get_one::<PathBuf>("config") {
        Some(p) => ExperimentConfig::from_toml(&read(p)?)?,
        None => ExperimentConfig::default(),
    };
    if let Some(&s) = m.get_one::<u64>("seed") {
        cfg.seed = s;
    }
    if let Some(&t) = m.get_one::<usize>("threads") {
        cfg.threads = t;
    }
    if let Some(o) = m.get_one::<PathBuf>("out") {
        cfg.out = o.to_string_lossy().into_owned();
    }
    Ok(cfg.normalized())
}

fn run_command(registry: &CommandRegistry, name: &str, cfg: &ExperimentConfig) -> Result<RunManifest, CliError> {
    if cfg.threads > 0 {
        // A second build in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global();
    }
    let hash = cfg.hash()?;
    let mut artifacts: Artifacts = registry.get(name)?.run(cfg)?;
    artifacts.files.push(("config.toml".into(), cfg.canonical_toml()?.into_bytes()));
    let manifest = RunManifest::new(name, hash, cfg.seed, &artifacts);
    write_run(Path::new(&cfg.out), &artifacts, &manifest)?;
    Ok(manifest)
}

fn dispatch(registry: &CommandRegistry, m: &ArgMatches) -> Result<(), CliError> {
    let (name, sub) = m.subcommand().expect("a subcommand is required");
    match name {
        "report" => {
            let paths: Vec<&PathBuf> = sub.get_many::<PathBuf>("manifests").map(|v| v.collect()).unwrap_or_default();
            let manifests = paths
                .iter()
                .map(|p| {
                    let m = serde_json::from_str(&read(p)?)
                        .map_err(|e| CliError::Report(format!("{} is not a run manifest: {e}", p.display())))?;
                    Ok((p.display().to_string(), m))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let summary = merge(&manifests)?;
            println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
        }
        "validate" => {
            let cfg = validate(load_config(m)?)?;
            print!("{}", cfg.to_toml()?);
        }
        _ => {
            let manifest = run_command(registry, name, &load_config(m)?)?;
            println!("{}", serde_json::to_string_pretty(&manifest.verdicts).expect("verdicts serialize"));
        }
    }
    Ok(())
}

/// Parses `args`, runs, and returns the process exit code.
pub fn main_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let registry = CommandRegistry::default();
    let matches = match cli(&registry).try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&registry, &matches) {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
