//! Resolves a run configuration into per-seed plans, plays every
//! (algorithm, seed) pair and renders the output files.

use std::path::{Path, PathBuf};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use symcone::applications::{generate_stream, online_self_play, StreamParams};
use symcone::games::{self_play, self_play_step_size, saddle_schedule_from_log_ranks, SelfPlayOptions};
use symcone::learners::AlgorithmRegistry;
use symcone::{ConeDescriptor, StrategySpace};

use crate::config::{RunConfig, Setting};
use crate::experiments::{BuildContext, Experiment, ExperimentRegistry, Instance, Params};
use crate::error::{CliError, Result};
use crate::report::{aggregate_csv, run_csv, Row};

pub const SEED_SPLIT: &str = "the instance for run seed s draws from ChaCha8 keyed by seed_from_u64(master_seed) \
on stream s, so each seed owns a disjoint counter range; algorithms sharing a seed share the instance; \
learners start at the uniform point";

pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

pub fn run_file_name(algorithm: &str, seed: u64) -> String {
    format!("{algorithm}_seed{seed}.csv")
}

/// Randomness reserved for one seed's instance.
pub fn instance_rng(master_seed: u64, seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(seed);
    rng
}

struct Plan {
    seed: u64,
    instance: Instance,
    space_x: StrategySpace,
    space_y: StrategySpace,
    step_size: f64,
    rounds: usize,
    lipschitz: (f64, f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Explicit,
    Default,
    Auto,
}

#[derive(Debug, Serialize)]
pub struct RunEntry {
    pub algorithm: &'static str,
    pub seed: u64,
    pub file: String,
    pub step_size: f64,
    pub rounds: usize,
    pub lipschitz: [f64; 2],
    pub ranks: [usize; 2],
    pub log_ranks: [f64; 2],
    pub final_duality_gap: Option<f64>,
    pub final_regret_sum_scaled: f64,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub library: &'static str,
    pub version: &'static str,
    pub experiment: String,
    pub params: std::collections::BTreeMap<String, String>,
    pub data: Option<PathBuf>,
    pub game: Option<PathBuf>,
    pub algorithms: Vec<&'static str>,
    /// Shared by every run, or absent when it differs across seeds.
    pub step_size: Option<f64>,
    pub step_size_source: Source,
    pub rounds: Option<usize>,
    pub rounds_source: Source,
    pub eps: Option<f64>,
    pub record_every: usize,
    pub master_seed: u64,
    pub seeds: Vec<u64>,
    pub seed_split: &'static str,
    pub aggregate: &'static str,
    pub runs: Vec<RunEntry>,
}

/// Rendered outputs, not yet on disk.
pub struct RunOutput {
    pub files: Vec<(String, String)>,
    pub manifest: Manifest,
}

impl RunOutput {
    /// Writes the CSVs and the manifest into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let io = |path: &Path, source| CliError::Output {
            path: path.to_path_buf(),
            source,
        };
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let manifest = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes") + "\n";
        let mut written = Vec::new();
        for (name, content) in self.files.iter().map(|(n, c)| (n.as_str(), c)).chain([(MANIFEST_FILE, &manifest)]) {
            let path = dir.join(name);
            std::fs::write(&path, content).map_err(|e| io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

fn ranks(space: &StrategySpace) -> (usize, f64) {
    (space.descriptor().rank(), space.log_rank())
}

fn plan(experiment: &dyn Experiment, cfg: &RunConfig, params: &Params, seed: u64) -> Result<Plan> {
    let instance = experiment.build(BuildContext {
        params,
        data: cfg.data.as_deref(),
        game: cfg.game.as_deref(),
        rng: instance_rng(cfg.master_seed, seed),
    })?;
    let (space_x, space_y, lipschitz) = match &instance {
        Instance::Static { game, .. } => (game.space_x().clone(), game.space_y().clone(), game.lipschitz()),
        Instance::Online { stream } => {
            // the map is rescaled to unit spectral norm
            let sx = StrategySpace::simplex(ConeDescriptor::spin(stream.dim + 1))?;
            let sy = StrategySpace::product_of_simplices(vec![ConeDescriptor::spin(stream.residual_dim + 1)])?;
            (sx, sy, (stream.radius, stream.radius))
        }
    };
    let online = matches!(instance, Instance::Online { .. });
    let (lr_x, lr_y) = (space_x.log_rank(), space_y.log_rank());
    let schedule = |eps: f64| saddle_schedule_from_log_ranks(lipschitz.0, lipschitz.1, lr_x, lr_y, eps);

    let step_size = match cfg.eta.or(experiment.default_step_size().map(Setting::Value)) {
        Some(Setting::Value(eta)) => eta,
        _ if online => self_play_step_size(&[lipschitz.0, lipschitz.1])?,
        _ => schedule(cfg.eps.unwrap_or(1.0))?.step_size,
    };
    let rounds = match cfg.rounds.or(experiment.default_rounds().map(Setting::Value)) {
        Some(Setting::Value(t)) => t,
        Some(Setting::Auto) if online => {
            return Err(CliError::Config(
                "online-fl has no target accuracy; give --T as an integer".into(),
            ))
        }
        Some(Setting::Auto) => {
            let eps = cfg.eps.ok_or_else(|| CliError::Config("--T auto needs --eps".into()))?;
            schedule(eps)?.rounds.max(1)
        }
        None => {
            return Err(CliError::Config(format!(
                "{} needs --T (an integer, or auto with --eps)",
                experiment.name()
            )))
        }
    };
    Ok(Plan {
        seed,
        instance,
        space_x,
        space_y,
        step_size,
        rounds,
        lipschitz,
    })
}

fn play(plan: &Plan, algorithm: &'static str, algorithms: &AlgorithmRegistry, record_every: usize) -> Result<Vec<Row>> {
    let algo = algorithms.get(algorithm)?;
    let cfg_x = algo.configure(plan.space_x.clone(), plan.step_size)?;
    let cfg_y = algo.configure(plan.space_y.clone(), plan.step_size)?;
    let rows: Vec<Row> = match &plan.instance {
        Instance::Static { game, primal } => {
            let mut opts = SelfPlayOptions::new(plan.rounds).record_every(record_every);
            if let Some(f) = primal {
                opts = opts.primal(f.clone());
            }
            self_play(game, &cfg_x, &cfg_y, &opts)?
                .checkpoints
                .iter()
                .map(|c| Row {
                    iteration: c.round,
                    duality_gap: Some(c.gap.gap),
                    regret_sum_scaled: c.regret_sum_scaled(),
                    primal_objective: c.primal_objective,
                })
                .collect()
        }
        Instance::Online { stream } => {
            let params = StreamParams {
                rounds: plan.rounds,
                ..stream.clone()
            };
            let s = generate_stream(&params)?;
            online_self_play(&s, params.radius, &cfg_x, &cfg_y, record_every)?
                .scaled_regret_sums
                .into_iter()
                .map(|(t, r)| Row {
                    iteration: t,
                    duality_gap: None,
                    regret_sum_scaled: r,
                    primal_objective: None,
                })
                .collect()
        }
    };
    let run = || format!("{algorithm} seed {}", plan.seed);
    for row in &rows {
        let checks = [
            ("duality gap", row.duality_gap),
            ("scaled regret sum", Some(row.regret_sum_scaled)),
            ("primal objective", row.primal_objective),
        ];
        if let Some((metric, _)) = checks.iter().find(|(_, v)| v.is_some_and(|v| !v.is_finite())) {
            return Err(CliError::NonFinite {
                metric,
                iteration: row.iteration,
                run: run(),
            });
        }
    }
    Ok(rows)
}

/// Plays every (algorithm, seed) pair in parallel and renders the outputs.
/// Nothing is written here, so a failing run leaves no partial files.
pub fn execute(cfg: &RunConfig, experiments: &ExperimentRegistry, algorithms: &AlgorithmRegistry) -> Result<RunOutput> {
    cfg.validate()?;
    let experiment = experiments.get(&cfg.experiment)?;
    let params = Params::resolve(experiment.params(), &cfg.params, experiment.name())?;
    let names = cfg.algo.names();
    for name in &names {
        algorithms.get(name)?;
    }

    let plans: Vec<Plan> = cfg
        .seeds
        .par_iter()
        .map(|&seed| plan(experiment, cfg, &params, seed))
        .collect::<Result<_>>()?;
    let jobs: Vec<(&'static str, &Plan)> = names
        .iter()
        .flat_map(|a| plans.iter().map(move |p| (*a, p)))
        .collect();
    let results: Vec<Vec<Row>> = jobs
        .par_iter()
        .map(|(a, p)| play(p, a, algorithms, cfg.record_every))
        .collect::<Result<_>>()?;

    let mut files = Vec::new();
    let mut runs = Vec::new();
    for ((algorithm, plan), rows) in jobs.iter().zip(&results) {
        let file = run_file_name(algorithm, plan.seed);
        files.push((file.clone(), run_csv(rows)?));
        let last = rows.last().expect("at least one round");
        let (rx, lrx) = ranks(&plan.space_x);
        let (ry, lry) = ranks(&plan.space_y);
        runs.push(RunEntry {
            algorithm,
            seed: plan.seed,
            file,
            step_size: plan.step_size,
            rounds: plan.rounds,
            lipschitz: [plan.lipschitz.0, plan.lipschitz.1],
            ranks: [rx, ry],
            log_ranks: [lrx, lry],
            final_duality_gap: last.duality_gap,
            final_regret_sum_scaled: last.regret_sum_scaled,
        });
    }
    let grouped: Vec<(&str, Vec<&[Row]>)> = names
        .iter()
        .map(|a| {
            let rows = jobs
                .iter()
                .zip(&results)
                .filter(|((name, _), _)| name == a)
                .map(|(_, r)| r.as_slice())
                .collect();
            (*a, rows)
        })
        .collect();
    files.push((AGGREGATE_FILE.to_string(), aggregate_csv(&grouped)?));

    let shared = |f: &dyn Fn(&Plan) -> f64| {
        let first = f(&plans[0]);
        plans.iter().all(|p| f(p) == first).then_some(first)
    };
    let source = |given: bool, default: bool, auto: bool| match (given, default) {
        _ if auto => Source::Auto,
        (true, _) => Source::Explicit,
        (false, true) => Source::Default,
        (false, false) => Source::Auto,
    };
    let manifest = Manifest {
        library: "symcone",
        version: symcone::VERSION,
        experiment: experiment.name().to_string(),
        params: params.as_map().clone(),
        data: cfg.data.clone(),
        game: cfg.game.clone(),
        algorithms: names,
        step_size: shared(&|p| p.step_size),
        step_size_source: source(
            cfg.eta.is_some(),
            experiment.default_step_size().is_some(),
            cfg.eta == Some(Setting::Auto),
        ),
        rounds: shared(&|p| p.rounds as f64).map(|t| t as usize),
        rounds_source: source(
            cfg.rounds.is_some(),
            experiment.default_rounds().is_some(),
            cfg.rounds == Some(Setting::Auto),
        ),
        eps: cfg.eps,
        record_every: cfg.record_every,
        master_seed: cfg.master_seed,
        seeds: cfg.seeds.clone(),
        seed_split: SEED_SPLIT,
        aggregate: AGGREGATE_FILE,
        runs,
    };
    Ok(RunOutput { files, manifest })
}
