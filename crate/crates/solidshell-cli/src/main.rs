//! Command-line driver: benchmark sweeps as CSV tables and a verification
//! suite for the element formulations.

mod run;
mod verify;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "solidshell",
    about = "Solid-shell benchmark sweeps and formulation verification",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Runs benchmark sweeps and prints one CSV row per case.
    Run(run::RunArgs),
    /// Runs the formulation property checks and reports pass/fail.
    Verify,
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run(args) => run::command(args),
        Command::Verify => verify::command(),
    };
    std::process::exit(code);
}
