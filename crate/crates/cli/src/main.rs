use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use splitep_cli::{solve_command, validate_command, verify_command, EXIT_FAILURE};

#[derive(Parser)]
#[command(name = "splitep")]
#[command(about = "Shrinking projection solver for split equilibrium and fixed-point problems")]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the solver. Exit 0 converged, 2 max_iter, 3 infeasible, 4 diverged
    Solve {
        file: PathBuf,

        /// Write the per-step CSV trace here
        #[arg(long)]
        trace: Option<PathBuf>,

        /// Write the summary here instead of stdout
        #[arg(long)]
        summary: Option<PathBuf>,

        /// Override the seed in the file
        #[arg(long)]
        seed: Option<u64>,
    },

    /// Sample the bifunction axioms and mapping classes; exit 0 iff all hold
    Verify {
        file: PathBuf,

        #[arg(long)]
        seed: Option<u64>,
    },

    /// Load the file and check the parameter conditions
    Validate { file: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = io::stdout().lock();
    let result = match &cli.command {
        Command::Solve {
            file,
            trace,
            summary,
            seed,
        } => solve_command(file, trace.as_deref(), summary.as_deref(), *seed, &mut out),
        Command::Verify { file, seed } => verify_command(file, *seed, &mut out),
        Command::Validate { file } => validate_command(file, &mut out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
