//! Command-line front end for phase-space region operators: build and cache
//! operator matrices, compute spectra and bounds, run tiling traces, verify
//! the library's guarantees, and evaluate region expressions.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use regionops_cli::commands;
use regionops_cli::config::{load_file_config, Overrides, RunConfig};
use regionops_cli::errors::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "regionops",
    version,
    about = "Phase-space region operators: build, analyze, tile, verify",
    long_about = None
)]
struct Cli {
    /// TOML config file with RunConfig fields and an optional expression.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Truncation dimension (number states 0..dim).
    #[arg(long, global = true, value_name = "N")]
    dim: Option<usize>,
    /// Leading block certified by map and sum checks (default dim/2).
    #[arg(long = "effective-dim", global = true, value_name = "N")]
    effective_dim: Option<usize>,
    /// Starting Gauss-Legendre order for region quadrature.
    #[arg(long = "quad-order", global = true, value_name = "N")]
    quad_order: Option<usize>,
    /// Hermiticity tolerance for spectra.
    #[arg(long, global = true, value_name = "X")]
    tol: Option<f64>,
    /// Output directory for generated files.
    #[arg(long = "out", global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// Region expression, e.g. "disk(0,0,2)" (see README for the grammar).
    #[arg(long, global = true, value_name = "EXPR")]
    expr: Option<String>,
    /// Number of doubling steps for `tile`.
    #[arg(long, global = true, value_name = "N")]
    steps: Option<usize>,
    /// Random seed for seeded diagnostics.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the region operator and persist it (content-hash cached).
    Build,
    /// Write the full eigenvalue list of the region operator.
    Spectrum,
    /// Print the extreme quasiprobability masses of the region operator.
    Bounds,
    /// Run a doubling tiling trace and emit record and plot data.
    Tile,
    /// Run the named verification suite; nonzero exit if any check fails.
    Verify,
    /// Parse an expression, build its operator, and summarize it.
    Eval,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => Some(load_file_config(path)?),
        None => None,
    };
    let overrides = Overrides {
        dim: cli.dim,
        effective_dim: cli.effective_dim,
        quad_order: cli.quad_order,
        tol: cli.tol,
        out_dir: cli.out_dir,
        seed: cli.seed,
        expr: cli.expr,
        steps: cli.steps,
    };
    let cfg = RunConfig::resolve(file, overrides)?;
    match cli.command {
        Command::Build => commands::cmd_build(&cfg),
        Command::Spectrum => commands::cmd_spectrum(&cfg),
        Command::Bounds => commands::cmd_bounds(&cfg),
        Command::Tile => commands::cmd_tile(&cfg),
        Command::Verify => commands::cmd_verify(&cfg),
        Command::Eval => commands::cmd_eval(&cfg),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's default usage exit code is 2; the contract reserves 2
            // for numerical preconditions and places usage errors at 1
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
