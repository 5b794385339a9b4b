mod analyze;
mod certify;
mod check;
mod error;
mod gen;
mod input;
mod repro;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use padic_forge::certify::{CertifyOptions, Limits};
use serde::Serialize;

use crate::analyze::AnalyzeArgs;
use crate::certify::{ClassArg, PropertyArg};
use crate::error::{CliError, CliResult};
use crate::gen::GenArgs;
use crate::input::Target;

/// Nonlinear congruential generators over Z/p^k: brute-force checks, certificates,
/// keystream generation and linear-complexity analysis.
#[derive(Debug, Parser)]
#[command(name = "padic-forge", version)]
struct Cli {
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Largest number of states a brute-force walk may visit (overrides PADIC_FORGE_CAP)
    #[arg(long, global = true)]
    cap_states: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Brute-force compatibility, bijectivity and transitivity mod p^k or m
    Check(Target),
    /// Certify a property on all of Z_p for each prime of the modulus
    Certify {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_enum, default_value_t = PropertyArg::Ergodic)]
        property: PropertyArg,
        /// Override the inferred function class
        #[arg(long, value_enum)]
        class: Option<ClassArg>,
        /// Exponent used for brute-force-only verdicts
        #[arg(long)]
        brute_k: Option<u32>,
    },
    /// Emit a keystream; bytes go to stdout and the report to stderr
    Gen(GenArgs),
    /// Period, linear complexity and bit-plane periods of a generator or a word file
    Analyze(AnalyzeArgs),
    /// Re-run the table of worked examples
    Repro {
        /// Restrict to one section or row id
        #[arg(long)]
        only: Option<String>,
    },
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce(&T) -> String) -> CliResult<String> {
    Ok(if json {
        serde_json::to_string_pretty(value).map_err(|e| CliError::Failed(e.to_string()))? + "\n"
    } else {
        text(value)
    })
}

fn run(cli: Cli) -> CliResult<()> {
    let mut limits = Limits::from_env();
    if let Some(cap) = cli.cap_states {
        limits.states = cap;
    }
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Check(target) => {
            let report = check::run(&target, &limits)?;
            stdout.write_all(emit(cli.json, &report, check::render)?.as_bytes())?;
        }
        Command::Certify { target, property, class, brute_k } => {
            let opts = CertifyOptions { limits, brute_k };
            let certs = certify::run(&target, property, class, &opts)?;
            stdout.write_all(emit(cli.json, &certs, |c| certify::render(c))?.as_bytes())?;
            certify::outcome(&certs)?;
        }
        Command::Gen(args) => {
            let opts = CertifyOptions { limits, brute_k: None };
            let report = gen::run(&args, &opts, &mut stdout)?;
            eprint!("{}", emit(cli.json, &report, gen::render)?);
        }
        Command::Analyze(args) => {
            let report = analyze::run(&args, &limits)?;
            stdout.write_all(emit(cli.json, &report, analyze::render)?.as_bytes())?;
        }
        Command::Repro { only } => {
            if let Some(o) = &only {
                if !repro::sections().contains(&o.as_str()) && !repro::row_ids().contains(&o.as_str()) {
                    return Err(CliError::Parse(format!("unknown section or row `{o}`")));
                }
            }
            let report = repro::run(only.as_deref(), &limits);
            stdout.write_all(emit(cli.json, &report, repro::render)?.as_bytes())?;
            if report.failed > 0 {
                return Err(CliError::Failed(format!("{} of {} rows failed", report.failed, report.rows.len())));
            }
        }
    }
    stdout.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("padic-forge: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
