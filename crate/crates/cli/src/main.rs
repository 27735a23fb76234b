use std::path::PathBuf;
use std::process::ExitCode;

use bloch_cli::commands::{
    cmd_bands, cmd_construct_exotic, cmd_entire_graph, cmd_isospectral, cmd_verify,
};
use bloch_cli::error::EXIT_USAGE;
use bloch_cli::{CliResult, GlobalOptions, Outcome, Suite};
use clap::{Parser, Subcommand};

/// Band structure, Bloch variety factorization and exotic potentials for
/// discrete periodic Schrödinger operators.
///
/// Exit codes: 0 success or positive verdict, 1 negative verdict,
/// 2 usage or input error, 3 numerical failure.
#[derive(Debug, Parser)]
#[command(name = "bloch", version)]
struct Cli {
    /// Seed for every randomized routine.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Relative tolerance of the randomized polynomial identity tests.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Band table as CSV plus spectrum and gap summary (real potentials).
    Bands {
        file: PathBuf,
        /// Grid points per axis; one value applies to every axis.
        #[arg(long, num_args = 1..)]
        resolution: Vec<usize>,
        /// CSV destination; without it the CSV goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Whether the Bloch variety contains the graph of an entire function.
    EntireGraph { file: PathBuf },
    /// Whether two potentials are Floquet isospectral.
    Isospectral { file_a: PathBuf, file_b: PathBuf },
    /// Writes one potential file per exotic potential with shift l.
    ConstructExotic {
        #[arg(long, num_args = 1.., required = true)]
        periods: Vec<usize>,
        #[arg(long, num_args = 1.., required = true)]
        l: Vec<usize>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Runs a named invariant suite and prints one line per check.
    Verify {
        #[arg(long)]
        suite: Suite,
        /// Periods for the counting suite (default 2).
        #[arg(long, num_args = 1..)]
        periods: Vec<usize>,
    },
}

fn run(cli: Cli) -> CliResult<Outcome> {
    let opts = GlobalOptions {
        seed: cli.seed,
        tolerance: cli.tolerance,
    };
    match cli.command {
        Command::Bands {
            file,
            resolution,
            out,
        } => cmd_bands(&file, &resolution, out.as_deref(), &opts),
        Command::EntireGraph { file } => cmd_entire_graph(&file, &opts),
        Command::Isospectral { file_a, file_b } => cmd_isospectral(&file_a, &file_b, &opts),
        Command::ConstructExotic { periods, l, out } => {
            cmd_construct_exotic(&periods, &l, &out, &opts)
        }
        Command::Verify { suite, periods } => cmd_verify(suite, &periods, &opts),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(outcome) => {
            for line in &outcome.summary {
                eprintln!("{line}");
            }
            let report = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
            match &outcome.stdout_data {
                Some(data) => {
                    print!("{data}");
                    eprintln!("{report}");
                }
                None => println!("{report}"),
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
