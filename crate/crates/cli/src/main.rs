use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dampwave::commands;
use dampwave::config::{CommonArgs, RunConfig};

#[derive(Parser)]
#[command(
    name = "dampwave",
    version,
    about = "Spectral experiments for the damped wave equation with a logarithmic mass term"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Thresholds δ, δ₀, δ₁, rates α, β and the sign table of f.
    Roots(CommonArgs),
    /// Norm time series over the grid.
    Norms(CommonArgs),
    /// Power-law and log-law fits of the norm series.
    Rates(CommonArgs),
    /// Run every check for one configuration.
    Verify(CommonArgs),
    /// Checks of the auxiliary inequalities.
    Lemmas(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, run): (
        &CommonArgs,
        fn(&RunConfig) -> anyhow::Result<commands::Outcome>,
    ) = match &cli.command {
        Command::Roots(a) => (a, commands::roots),
        Command::Norms(a) => (a, commands::norms),
        Command::Rates(a) => (a, commands::rates),
        Command::Verify(a) => (a, commands::verify),
        Command::Lemmas(a) => (a, commands::lemmas),
    };
    let cfg = match RunConfig::from_args(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let written = match &args.output {
        Some(path) => std::fs::write(path, &outcome.text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(outcome.text.as_bytes())
        }
    };
    if let Err(e) = written {
        eprintln!("error: writing report: {e}");
        return ExitCode::from(1);
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
