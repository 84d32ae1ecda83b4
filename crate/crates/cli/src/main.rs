//! Command-line harness: synthetic data, hierarchical and baseline fits,
//! and posterior reports.
//!
//! Exit codes: 0 success, 2 usage, 3 invalid input, 4 file I/O, 5 run failure.

mod error;
mod fit;
mod inputs;
mod report;
mod synth;

use clap::{Parser, Subcommand};

use fit::FitKind;

#[derive(Debug, Parser)]
#[command(
    name = "dphbmu",
    version,
    about = "Hierarchical Bayesian updating of frame joint fixity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic dataset bundle.
    Synth(synth::SynthArgs),
    /// Fit the Dirichlet-process hierarchical model. Worker threads per
    /// chain come from DPHBMU_WORKERS and never change the output.
    Fit(fit::FitArgs),
    /// Fit independent per-observation chains (non-hierarchical baseline).
    FitBaseline(fit::FitArgs),
    /// Summarize one or more traces.
    Report(report::ReportArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Synth(a) => synth::run(a),
        Command::Fit(a) => fit::run(a, FitKind::Dp),
        Command::FitBaseline(a) => fit::run(a, FitKind::Baseline),
        Command::Report(a) => report::run(a),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.category.exit_code());
    }
}
