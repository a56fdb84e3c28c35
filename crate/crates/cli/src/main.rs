use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "abcd",
    about = "Asynchronous block coordinate descent: simulate, sweep, verify, report",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one simulation from a configuration file.
    Run {
        /// Path to the run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config's output.dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one simulation per value of a swept parameter.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Parameter to vary: B, gamma, n or seed.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named property suite: lemmas, pl, grad, schedule or theorem.
    Check {
        #[arg(long)]
        suite: String,
    },
    /// Regenerate the gap chart from an existing trace CSV.
    Report {
        /// Trace CSV produced by `run`.
        #[arg(long = "in")]
        input: PathBuf,
        /// Where to write the SVG.
        #[arg(long)]
        svg: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config, out } => abcd_cli::cmd_run(&config, out.as_deref()),
        Command::Sweep { config, param, values, out } => match abcd_cli::SweepParam::parse(&param) {
            Some(p) => abcd_cli::cmd_sweep(&config, p, &values, out.as_deref()),
            None => {
                eprintln!("error: unknown sweep parameter '{param}' (expected B, gamma, n or seed)");
                abcd_cli::EXIT_CONFIG
            }
        },
        Command::Check { suite } => abcd_cli::cmd_check(&suite),
        Command::Report { input, svg } => abcd_cli::cmd_report(&input, &svg),
    };
    ExitCode::from(code as u8)
}
