use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lgl_cli::commands::{run, Outcome};
use lgl_cli::{Experiment, ExperimentConfig, Settings};

/// Lozenge tilings, GUE corners and height-function concentration.
#[derive(Parser)]
#[command(name = "lgl", version)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    /// key = value file mirroring the flags; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
}

#[derive(Subcommand)]
enum Verb {
    /// Exact uniform samples of a region, as JSON lines (and SVG)
    Sample,
    /// All tilings of a small region
    Enumerate,
    /// GUE-corners samples and their Gaussian marginals
    Gue,
    /// Regular hexagon: first levels near the left side against sqrt(3/8) GUE corners
    HexagonGue,
    /// Fixed trapezoid with dents --lambda against GUE corners
    TrapezoidGue,
    /// Centre-height variance ladder and the level-set tree identity
    Concentration,
    /// Exact oracles; exits nonzero on any mismatch
    Oracle,
    /// SVG of the first tiling in --input
    Render,
}

impl Verb {
    fn experiment(&self) -> Experiment {
        match self {
            Verb::Sample => Experiment::Sample,
            Verb::Enumerate => Experiment::Enumerate,
            Verb::Gue => Experiment::Gue,
            Verb::HexagonGue => Experiment::HexagonGue,
            Verb::TrapezoidGue => Experiment::TrapezoidGue,
            Verb::Concentration => Experiment::Concentration,
            Verb::Oracle => Experiment::Oracle,
            Verb::Render => Experiment::Render,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = ExperimentConfig::from_sources(cli.verb.experiment(), cli.config.as_deref(), cli.settings)
        .and_then(|cfg| run(&cfg));
    match result {
        Ok(Outcome::Passed) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => {
            eprintln!("some checks failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
