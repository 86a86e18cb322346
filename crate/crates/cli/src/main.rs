//! `frameloop`: run the eigenframe-loop degeneracy test from the command line.

mod commands;
mod report;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "frameloop", version, about = "Detect enclosed degeneracies from eigenvector loops")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify one or more loops and print a JSON report.
    Classify {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        loops: LoopArgs,
        #[command(flatten)]
        config: ConfigArgs,
        /// Worker threads when several loop files are given.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Write rotation angle and axis along the loop (n = 3, or the reduced loop for n = 4).
    Figure {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        loops: LoopArgs,
        #[command(flatten)]
        config: ConfigArgs,
        /// CSV destination; standard output if omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write the transported frames and eigenvalue tracks; print the sign pattern.
    Transport {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        loops: LoopArgs,
        #[command(flatten)]
        config: ConfigArgs,
        /// CSV destination; standard output if omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Build and verify a gap-open extension of the loop data over the disc.
    Extend {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        loops: LoopArgs,
        #[command(flatten)]
        config: ConfigArgs,
        /// Comma-separated, strictly increasing interior eigenvalues.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        anchors: Option<Vec<f64>>,
        /// Number of radial slices from the centre to the boundary.
        #[arg(long, default_value_t = 64)]
        rho_slices: usize,
        /// Destination of the extension CSV.
        #[arg(long)]
        output: PathBuf,
        /// Destination of the verification JSON; standard output if omitted.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Built-in models and model-file checks.
    Models {
        #[command(subcommand)]
        action: ModelsCommand,
    },
}

#[derive(Subcommand, Debug)]
enum ModelsCommand {
    /// List the built-in models.
    List,
    /// Parse a model file and print it in canonical form.
    Check { path: PathBuf },
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Built-in model: e-epsilon, t-tau2 or g-g.
    #[arg(long, conflicts_with = "model_file", required_unless_present = "model_file")]
    builtin: Option<String>,
    /// Model file in the matrix-entry grammar.
    #[arg(long)]
    model_file: Option<PathBuf>,
    /// Linear coupling of e-epsilon.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    k: f64,
    /// Quadratic coupling of e-epsilon.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    g: f64,
    /// Overall coupling of g-g.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    coupling: f64,
}

#[derive(Args, Debug, Clone)]
struct LoopArgs {
    /// Circle of this radius in the first two parameters (others zero).
    #[arg(long, conflicts_with = "loop_file", required_unless_present = "loop_file")]
    circle: Option<f64>,
    /// Number of samples on the circle.
    #[arg(long, default_value_t = 256)]
    samples: usize,
    /// Loop file (`params <d>` then `t q1 .. qd` lines); repeatable for classify.
    #[arg(long)]
    loop_file: Vec<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct ConfigArgs {
    /// Smallest accepted |overlap| between consecutive eigenvectors.
    #[arg(long, default_value_t = 0.9)]
    overlap_floor: f64,
    /// Largest number of bisections of a single step.
    #[arg(long, default_value_t = 20)]
    max_depth: usize,
    /// Eigenvalue gap treated as a degeneracy on the loop.
    #[arg(long, default_value_t = 1e-9)]
    gap_floor: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { commands::EXIT_OTHER } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
