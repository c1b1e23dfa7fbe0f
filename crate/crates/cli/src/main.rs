// SPDX-License-Identifier: Apache-2.0

//! `dapt`: infidelity curves, adiabaticity checks and parameter sweeps from flat
//! config files.
//!
//! Exit status is 0 on success, 2 for configuration problems and 3 when the
//! numerics fail.

mod config;
mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use config::{resolve, ConfigError, Experiment, RawConfig};
use dapt_core::experiment::{run_conditions, run_infidelity, Model};
use dapt_core::DaptError;

#[derive(Parser, Debug)]
#[command(
    name = "dapt",
    version,
    about = "Degenerate adiabatic perturbation theory experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output file for `run` and `check`, output directory for `sweep`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Highest correction order; overrides `p_max` in the config.
    #[arg(long, global = true)]
    p_max: Option<usize>,

    /// Internal grid steps; overrides `n_steps` in the config.
    #[arg(long, global = true)]
    n_steps: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Infidelity of each truncation order against the reference solution.
    Run { config: PathBuf },
    /// Necessary and sufficient condition values with a verdict line.
    Check { config: PathBuf },
    /// One `run` per value of a field plus a summary table.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        field: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
}

enum Failure {
    Config(ConfigError),
    Numeric(DaptError),
    Io(String),
}

impl Failure {
    fn report(&self) -> ExitCode {
        match self {
            Failure::Config(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
            Failure::Numeric(e) => {
                eprintln!("error: {e}");
                ExitCode::from(3)
            }
            Failure::Io(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<DaptError> for Failure {
    fn from(e: DaptError) -> Self {
        Failure::Numeric(e)
    }
}

fn load(path: &Path, cli: &Cli) -> Result<RawConfig, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut raw = RawConfig::parse(&text)?;
    if let Some(p) = cli.p_max {
        raw.set("p_max", p.to_string());
    }
    if let Some(n) = cli.n_steps {
        raw.set("n_steps", n.to_string());
    }
    Ok(raw)
}

fn emit(target: Option<&Path>, text: &str) -> Result<(), Failure> {
    match target {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

fn target<'a>(cli: &'a Cli, exp: &'a Experiment) -> Option<&'a Path> {
    cli.out.as_deref().or(exp.output.as_deref())
}

/// Config key a sweep field writes to for the given model.
fn sweep_key(field: &str, raw: &RawConfig) -> Result<&'static str, ConfigError> {
    let quadratic = raw.get("model") == Some("quadratic");
    match field {
        "v" => Ok("v"),
        "w" => Ok("w"),
        "E0" => Ok("E0"),
        "theta" if quadratic => Ok("theta0"),
        "theta" => Ok("theta"),
        other => Err(ConfigError {
            field: other.to_string(),
            message: "cannot sweep; use v, E0, w or theta".into(),
        }),
    }
}

fn sweep(cli: &Cli, raw: &RawConfig, field: &str, values: &[String]) -> Result<(), Failure> {
    let key = sweep_key(field, raw)?;
    let runs = values
        .iter()
        .map(|value| {
            let x: f64 = value.trim().parse().map_err(|_| ConfigError {
                field: field.to_string(),
                message: format!("`{value}` is not a number"),
            })?;
            let mut r = raw.clone();
            r.set(key, value.trim());
            Ok((value.trim().to_string(), x, resolve(&r)?))
        })
        .collect::<Result<Vec<_>, ConfigError>>()?;

    let dir = cli
        .out
        .clone()
        .or_else(|| raw.get("output").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)
        .map_err(|e| Failure::Io(format!("cannot create {}: {e}", dir.display())))?;

    let tables = runs
        .par_iter()
        .map(|(name, _, exp)| {
            let table = run_infidelity(&exp.model, &exp.settings)?;
            emit(
                Some(&dir.join(format!("{field}={name}.csv"))),
                &report::infidelity_csv(&table),
            )?;
            Ok(table)
        })
        .collect::<Result<Vec<_>, Failure>>()?;

    let rows: Vec<_> = runs
        .iter()
        .zip(&tables)
        .map(|((_, x, _), t)| (*x, t))
        .collect();
    emit(Some(&dir.join("summary.csv")), &report::summary_csv(&rows))
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Run { config } => {
            let exp = resolve(&load(config, cli)?)?;
            let table = run_infidelity(&exp.model, &exp.settings)?;
            emit(target(cli, &exp), &report::infidelity_csv(&table))
        }
        Command::Check { config } => {
            let exp = resolve(&load(config, cli)?)?;
            let model: &Model = &exp.model;
            let result = run_conditions(model, &exp.settings)?;
            emit(target(cli, &exp), &report::check_csv(&result))
        }
        Command::Sweep {
            config,
            field,
            values,
        } => sweep(cli, &load(config, cli)?, field, values),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}
