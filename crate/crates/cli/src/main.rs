//! `gkz` command-line tool.

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gkz_cli::{
    cmd_build, cmd_check, cmd_dualize, cmd_oracle, cmd_solve, cmd_verify, load_instance,
    parse_beta, CliError, Report, RunOptions,
};

#[derive(Parser)]
#[command(
    name = "gkz",
    version,
    about = "Exact GKZ systems and Frobenius series for nef partitions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Built-in instance name (p1-elliptic, p3-8planes) or path to an instance JSON file.
    #[arg(long, global = true, default_value = "p3-8planes")]
    instance: String,
    /// Series truncation order (default 4 for n <= 2, else 2).
    #[arg(long, global = true)]
    order: Option<u32>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true, value_name = "OUT")]
    json: Option<std::path::PathBuf>,
    /// Override beta with comma-separated rationals, e.g. `-1/2,-1/2,0,0`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta: Option<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Dual nef partition, reflexivity and lattice cover checks.
    Dualize,
    /// Print the matrix A, beta and column labels.
    Build,
    /// Facet form, non-resonance, holonomic rank and cone union checks.
    Check,
    /// Frobenius solution basis as JSON.
    Solve,
    /// Annihilation, oracle comparison and independence checks.
    Verify,
    /// Binomial period expansion and independent volume.
    Oracle,
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let inst = load_instance(&cli.instance)?;
    let opts = RunOptions {
        order: cli.order,
        seed: cli.seed,
        beta: cli.beta.as_deref().map(parse_beta).transpose()?,
    };
    match cli.command {
        Command::Dualize => cmd_dualize(&inst),
        Command::Build => cmd_build(&inst, &opts),
        Command::Check => cmd_check(&inst, &opts),
        Command::Solve => cmd_solve(&inst, &opts),
        Command::Verify => cmd_verify(&inst, &opts),
        Command::Oracle => cmd_oracle(&inst, &opts),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = serde_json::to_string_pretty(&report.value).expect("report serializes");
    match &cli.json {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text + "\n") {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => println!("{text}"),
    }
    if let Some(w) = report.value.get("warning").and_then(|w| w.as_str()) {
        eprintln!("warning: {w}");
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        eprintln!("FAIL: one or more checks did not pass");
        ExitCode::from(1)
    }
}
