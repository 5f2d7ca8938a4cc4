//! Built-in experiments and the registry the `run` command looks them up in.

mod location;
mod matrix;
mod metric;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use symcone::applications::StreamParams;
use symcone::games::{BilinearZeroSumGame, PrimalEvaluator};

use crate::error::{CliError, Result};

pub use location::{FermatWeber, OnlineLocation};
pub use matrix::{GameFile, MatchingPennies};
pub use metric::MetricLearning;

/// A tunable experiment parameter and its default, as passed by
/// `--param name=value`.
#[derive(Clone, Copy, Debug)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

/// Parameter values after defaults are filled in.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    /// Fills defaults and rejects names the experiment does not declare.
    pub fn resolve(specs: &[ParamSpec], given: &BTreeMap<String, String>, experiment: &str) -> Result<Self> {
        if let Some(unknown) = given.keys().find(|k| !specs.iter().any(|s| s.name == k.as_str())) {
            let known: Vec<_> = specs.iter().map(|s| s.name).collect();
            return Err(CliError::Config(format!(
                "{experiment} has no parameter {unknown:?} (known: {known:?})"
            )));
        }
        Ok(Self(
            specs
                .iter()
                .map(|s| {
                    let v = given.get(s.name).cloned().unwrap_or_else(|| s.default.to_string());
                    (s.name.to_string(), v)
                })
                .collect(),
        ))
    }

    pub fn get<T: FromStr>(&self, name: &str) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        let raw = self
            .0
            .get(name)
            .ok_or_else(|| CliError::Config(format!("missing parameter {name:?}")))?;
        raw.parse()
            .map_err(|e| CliError::Config(format!("parameter {name}={raw:?}: {e}")))
    }

    pub fn as_map(&self) -> &BTreeMap<String, String> {
        &self.0
    }
}

/// What a run plays.
pub enum Instance {
    Static {
        game: BilinearZeroSumGame,
        primal: Option<PrimalEvaluator>,
    },
    /// The stream is generated once the horizon is known.
    Online { stream: StreamParams },
}

/// Inputs an experiment may draw on when building one seed's instance.
pub struct BuildContext<'a> {
    pub params: &'a Params,
    pub data: Option<&'a Path>,
    pub game: Option<&'a Path>,
    /// Stream reserved for this seed's instance.
    pub rng: ChaCha8Rng,
}

pub trait Experiment: Send + Sync {
    fn name(&self) -> &'static str;

    fn summary(&self) -> &'static str;

    fn params(&self) -> &'static [ParamSpec] {
        &[]
    }

    fn default_step_size(&self) -> Option<f64> {
        None
    }

    fn default_rounds(&self) -> Option<usize> {
        None
    }

    fn build(&self, ctx: BuildContext<'_>) -> Result<Instance>;
}

pub struct ExperimentRegistry {
    entries: Vec<Box<dyn Experiment>>,
}

impl ExperimentRegistry {
    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    /// Replaces any experiment registered under the same name.
    pub fn register(&mut self, experiment: Box<dyn Experiment>) {
        self.entries.retain(|e| e.name() != experiment.name());
        self.entries.push(experiment);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Experiment> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(|e| e.as_ref())
            .ok_or_else(|| CliError::Config(format!("unknown experiment {name:?}, expected one of {:?}", self.names())))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Experiment> {
        self.entries.iter().map(|e| e.as_ref())
    }
}

impl Default for ExperimentRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(GameFile));
        r.register(Box::new(MatchingPennies));
        r.register(Box::new(MetricLearning));
        r.register(Box::new(FermatWeber));
        r.register(Box::new(OnlineLocation));
        r
    }
}
