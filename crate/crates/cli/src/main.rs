//! `mls`: periodic orbits, length spectra, barriers and the limit checks for
//! convex billiards.
//!
//! Exit codes: 0 success, 1 invalid input, 2 solver failure, 3 a check ran
//! but failed.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mls_core::numerics::{Dd, Precision};
use mls_core::verifier::VerifyOptions;

use commands::{Failure, Outcome, VerifyPaths};
use config::{required, resolve_common, Common, FileConfig};

#[derive(Parser, Debug)]
#[command(name = "mls", version, about = "Marked length spectrum and Peierls barrier for convex billiards")]
struct Cli {
    /// Builtin domain (circle, ellipse, generic) or path to a JSON domain spec.
    #[arg(long, global = true)]
    domain: Option<String>,
    /// `double` or `extended`; overrides MLS_PRECISION and the config file.
    #[arg(long, global = true)]
    precision: Option<Precision>,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for the multi-start phase jitter.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for independent fractions.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Maximal periodic orbit of rotation number p/q.
    Orbit {
        #[arg(short)]
        p: Option<u64>,
        #[arg(short)]
        q: Option<u64>,
        /// Write the orbit as JSON here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Spectrum table over the Farey fractions with denominator up to q_max.
    Spectrum {
        #[arg(long)]
        q_max: Option<u64>,
        /// CSV destination (stdout when absent).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Peierls barrier from a truncated heteroclinic segment.
    Barrier {
        #[arg(short)]
        p: Option<u64>,
        #[arg(short)]
        q: Option<u64>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        /// Also compute the barrier from the right derivative of β, sweeping
        /// N up to this value.
        #[arg(long)]
        prop2: Option<usize>,
    },
    /// Perimeter-difference sweep with limit, rate and genericity checks.
    Verify {
        #[arg(short)]
        p: Option<u64>,
        #[arg(short)]
        q: Option<u64>,
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        /// Directory for the report, CSV and plot script.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// File stem for the outputs.
        #[arg(long, default_value = "verify")]
        name: String,
    },
    /// Remainder orders of the billiard map in Lazutkin coordinates.
    LazutkinCheck,
    /// Builds the domain and reports its length and convexity margin.
    DomainCheck,
}

fn dispatch<F64, FDd>(common: &Common, f64_run: F64, dd_run: FDd) -> Outcome
where
    F64: FnOnce() -> Outcome,
    FDd: FnOnce() -> Outcome,
{
    match common.precision {
        Precision::Double => f64_run(),
        Precision::Extended => dd_run(),
    }
}

fn run(cli: Cli) -> Outcome {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let common = resolve_common(&file, cli.domain.as_deref(), cli.precision, cli.seed, cli.jobs)?;
    let c = &common;
    match cli.command {
        Command::Orbit { p, q, output } => {
            let p = required(p, file.p, "p")?;
            let q = required(q, file.q, "q")?;
            let out = output.or(file.output.clone());
            let out = out.as_deref();
            dispatch(
                c,
                || commands::orbit::<f64>(c, p, q, out),
                || commands::orbit::<Dd>(c, p, q, out),
            )
        }
        Command::Spectrum { q_max, output } => {
            let q_max = required(q_max, file.q_max, "q_max")?;
            let out = output.or(file.output.clone());
            let out = out.as_deref();
            dispatch(
                c,
                || commands::spectrum::<f64>(c, q_max, out),
                || commands::spectrum::<Dd>(c, q_max, out),
            )
        }
        Command::Barrier { p, q, k, m, prop2 } => {
            let p = required(p, file.p, "p")?;
            let q = required(q, file.q, "q")?;
            let window = match (k.or(file.k), m.or(file.m)) {
                (Some(k), Some(m)) => Some((k, m)),
                (None, None) => None,
                _ => return Err(Failure::Config(anyhow::anyhow!("give both k and m, or neither"))),
            };
            dispatch(
                c,
                || commands::barrier::<f64>(c, p, q, window, prop2),
                || commands::barrier::<Dd>(c, p, q, window, prop2),
            )
        }
        Command::Verify {
            p,
            q,
            n_min,
            n_max,
            out_dir,
            name,
        } => {
            let p = required(p, file.p, "p")?;
            let q = required(q, file.q, "q")?;
            let defaults = VerifyOptions::default();
            let opts = VerifyOptions {
                n_min: n_min.or(file.n_min).unwrap_or(defaults.n_min),
                n_max: n_max.or(file.n_max).unwrap_or(defaults.n_max),
                thresholds: file.thresholds.unwrap_or_default(),
                solve: c.solve,
            };
            let paths = VerifyPaths {
                dir: out_dir.or(file.out_dir.clone()).unwrap_or_else(|| PathBuf::from(".")),
                stem: name,
            };
            dispatch(
                c,
                || commands::verify_cmd::<f64>(c, p, q, &opts, &paths),
                || commands::verify_cmd::<Dd>(c, p, q, &opts, &paths),
            )
        }
        Command::LazutkinCheck => dispatch(
            c,
            || commands::lazutkin_check::<f64>(c),
            || commands::lazutkin_check::<Dd>(c),
        ),
        Command::DomainCheck => dispatch(
            c,
            || commands::domain_check::<f64>(c),
            || commands::domain_check::<Dd>(c),
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("solver failure: {e}");
            ExitCode::from(2)
        }
    }
}
