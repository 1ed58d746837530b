mod commands;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::CliError;

#[derive(Parser)]
#[command(name = "semihilbert", version, about = "Operator theory on semi-Hilbertian spaces, computed on matrices and diagonal models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify T on the space defined by A and report norms, radii and spectra.
    Analyze {
        a: PathBuf,
        t: PathBuf,
        /// Eigenvalues of A at or below this fraction of the largest count as zero.
        #[arg(long, default_value_t = semihilbert::linalg::DEFAULT_RANK_TOL)]
        rank_tol: f64,
        #[arg(long, default_value_t = semihilbert::numrange::DEFAULT_ANGLES)]
        angles: usize,
        #[arg(long)]
        json: bool,
    },
    /// Approximate the A-numerical range; prints the polygons as JSON.
    Range {
        a: PathBuf,
        t: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = semihilbert::numrange::DEFAULT_ANGLES)]
        angles: usize,
        #[arg(long, default_value_t = semihilbert::linalg::DEFAULT_RANK_TOL)]
        rank_tol: f64,
    },
    /// Point, approximate, full and essential A-spectra.
    Spectra {
        a: PathBuf,
        t: PathBuf,
        #[arg(long, default_value_t = semihilbert::linalg::DEFAULT_RANK_TOL)]
        rank_tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Work with an infinite diagonal model described by a JSON file.
    Model {
        path: PathBuf,
        #[command(subcommand)]
        action: ModelAction,
    },
    /// Run a verification suite and print its report.
    Check {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

#[derive(Subcommand)]
enum ModelAction {
    Spectra {
        #[arg(long, default_value_t = semihilbert::model::N_REPORT)]
        report: usize,
        #[arg(long)]
        json: bool,
    },
    Range {
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    Closed {
        #[arg(long)]
        json: bool,
    },
    /// Write a closed finite-rank perturbation next to the input file.
    Close {
        #[arg(long)]
        eps: f64,
        /// Largest index searched for a replacement entry.
        #[arg(long, default_value_t = 1_000_000)]
        search: usize,
        #[arg(long)]
        json: bool,
    },
    Anderson {
        #[arg(long)]
        json: bool,
    },
}

fn configure_threads() {
    let Ok(value) = std::env::var("SEMIHILBERT_THREADS") else {
        return;
    };
    match value.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        _ => eprintln!("warning: ignoring SEMIHILBERT_THREADS={value:?}"),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze { a, t, rank_tol, angles, json } => commands::analyze(&a, &t, rank_tol, angles, json),
        Command::Range { a, t, svg, angles, rank_tol } => commands::range(&a, &t, svg.as_deref(), angles, rank_tol),
        Command::Spectra { a, t, rank_tol, json } => commands::spectra(&a, &t, rank_tol, json),
        Command::Model { path, action } => match action {
            ModelAction::Spectra { report, json } => commands::model_spectra(&path, report, json),
            ModelAction::Range { svg } => commands::model_range(&path, svg.as_deref()),
            ModelAction::Closed { json } => commands::model_closed(&path, json),
            ModelAction::Close { eps, search, json } => commands::model_close(&path, eps, search, json),
            ModelAction::Anderson { json } => commands::model_anderson(&path, json),
        },
        Command::Check { suite, seed, count } => commands::check(&suite, seed, count),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !e.message.is_empty() {
                eprintln!("error: {}", e.message);
            }
            ExitCode::from(e.code)
        }
    }
}
