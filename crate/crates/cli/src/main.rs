//! `clinsynth` command line: generate DR/SDR datasets, composite greenscreen
//! footage, split, augment, evaluate and report dataset statistics.
//!
//! Every flag can also be set through an environment variable named
//! `CLINSYNTH_<FLAG>` (for example `CLINSYNTH_SEED=42`).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod augment;
mod composite;
mod generate;
mod tools;

#[derive(Parser, Debug)]
#[command(name = "clinsynth", version, about = "Synthetic clothed-human dataset engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Render DR or SDR frames with ground truth.
    Generate(generate::GenerateArgs),
    /// Replace greenscreen backgrounds of recorded footage.
    Composite(composite::CompositeArgs),
    /// Assign train / validation / test splits to a manifest.
    Split(tools::SplitArgs),
    /// Mosaic and green-channel augmentation.
    #[command(subcommand)]
    Augment(augment::AugmentCommand),
    /// Score detector predictions against a manifest split.
    Evaluate(tools::EvaluateArgs),
    /// Print per-split frame counts.
    Stats(tools::StatsArgs),
    /// Write a procedural demo asset set and randomization config.
    Scaffold(tools::ScaffoldArgs),
}

/// Flags shared by the seeded subcommands.
#[derive(Args, Debug, Clone)]
pub struct SeedArgs {
    /// Master seed; all randomness derives from it.
    #[arg(long, env = "CLINSYNTH_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct ThreadArgs {
    /// Worker threads (0 = one per core).
    #[arg(long, env = "CLINSYNTH_THREADS", default_value_t = 0)]
    pub threads: usize,
}

impl ThreadArgs {
    pub fn pool(&self) -> anyhow::Result<rayon::ThreadPool> {
        Ok(rayon::ThreadPoolBuilder::new().num_threads(self.threads).build()?)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexFormat {
    Native,
    Coco,
}

/// Output directory flag.
#[derive(Args, Debug, Clone)]
pub struct OutArgs {
    #[arg(long, env = "CLINSYNTH_OUT")]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate::run(a),
        Command::Composite(a) => composite::run(a),
        Command::Split(a) => tools::split(a),
        Command::Augment(a) => augment::run(a),
        Command::Evaluate(a) => tools::evaluate(a),
        Command::Stats(a) => tools::stats(a),
        Command::Scaffold(a) => tools::scaffold(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
