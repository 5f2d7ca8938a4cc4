use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_param, AlgoChoice, RunConfig, Setting};

#[derive(Debug, Parser)]
#[command(name = "symcone", version, about = "Self-play experiments for symmetric cone games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Play an experiment and write per-run CSVs, an aggregate CSV and a manifest.
    Run(RunArgs),
    /// Check gap <= scaled regret sum on every row of a run directory.
    Verify {
        #[arg(long)]
        out: PathBuf,
    },
    /// List experiments, their parameters and the algorithms.
    List,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub experiment: String,
    #[arg(long, value_enum, default_value = "both")]
    pub algo: AlgoChoice,
    /// Step size, or "auto" for the scheduled one [default: the experiment's, else auto].
    #[arg(long)]
    pub eta: Option<Setting<f64>>,
    /// Horizon, or "auto" with --eps [default: the experiment's].
    #[arg(long = "T")]
    pub rounds: Option<Setting<usize>>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Comma-separated run seeds.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub seeds: Vec<u64>,
    #[arg(long, default_value_t = 0)]
    pub master_seed: u64,
    #[arg(long, default_value_t = 1)]
    pub record_every: usize,
    /// Labeled CSV for metric-learning.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Game JSON for game-file.
    #[arg(long)]
    pub game: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Experiment parameter, repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE", value_parser = parse_param)]
    pub params: Vec<(String, String)>,
}

impl From<RunArgs> for RunConfig {
    fn from(a: RunArgs) -> Self {
        RunConfig {
            experiment: a.experiment,
            algo: a.algo,
            eta: a.eta,
            rounds: a.rounds,
            eps: a.eps,
            seeds: a.seeds,
            master_seed: a.master_seed,
            record_every: a.record_every,
            data: a.data,
            game: a.game,
            out: a.out,
            params: a.params.into_iter().collect(),
        }
    }
}
