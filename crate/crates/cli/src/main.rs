use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use retpot_cli::{run_file, Command};

/// Retarded potentials and fields of finite-support sources.
#[derive(Parser)]
#[command(version, about)]
struct Args {
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, value_enum)]
    command: Command,
    /// Directory for output files.
    #[arg(long, default_value = ".")]
    output: PathBuf,
    /// Suppress the summary on stdout.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run_file(&args.scenario, args.command, &args.output) {
        Ok(outcome) => {
            if !args.quiet {
                println!("{}", outcome.summary);
            }
            if !outcome.passed {
                eprintln!("tolerance exceeded");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
