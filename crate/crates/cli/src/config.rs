use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::ValueEnum;

use crate::error::{CliError, Result};

/// A value that is either given or derived from the step-size schedule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Setting<T> {
    Auto,
    Value(T),
}

impl<T: FromStr> FromStr for Setting<T>
where
    T::Err: fmt::Display,
{
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Setting::Auto);
        }
        s.parse()
            .map(Setting::Value)
            .map_err(|e| format!("expected a number or \"auto\": {e}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgoChoice {
    Scmwu,
    Oscmwu,
    Both,
}

impl AlgoChoice {
    pub fn names(self) -> Vec<&'static str> {
        match self {
            AlgoChoice::Scmwu => vec!["scmwu"],
            AlgoChoice::Oscmwu => vec!["oscmwu"],
            AlgoChoice::Both => vec!["scmwu", "oscmwu"],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub experiment: String,
    pub algo: AlgoChoice,
    /// `None` takes the experiment's default, or the schedule if it has none.
    pub eta: Option<Setting<f64>>,
    /// `None` takes the experiment's default horizon.
    pub rounds: Option<Setting<usize>>,
    pub eps: Option<f64>,
    pub seeds: Vec<u64>,
    pub master_seed: u64,
    pub record_every: usize,
    pub data: Option<PathBuf>,
    pub game: Option<PathBuf>,
    pub out: PathBuf,
    pub params: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if let Some(Setting::Value(eta)) = self.eta {
            if !(eta > 0.0 && eta.is_finite()) {
                return bad(format!("--eta must be positive, got {eta}"));
            }
        }
        match self.rounds {
            Some(Setting::Value(0)) => return bad("--T must be at least 1".into()),
            Some(Setting::Auto) if self.eps.is_none() => return bad("--T auto needs --eps".into()),
            _ => {}
        }
        if let Some(eps) = self.eps {
            if !(eps > 0.0 && eps.is_finite()) {
                return bad(format!("--eps must be positive, got {eps}"));
            }
        }
        if self.record_every == 0 {
            return bad("--record-every must be at least 1".into());
        }
        if self.seeds.is_empty() {
            return bad("--seeds needs at least one seed".into());
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return bad("--seeds must not repeat".into());
        }
        Ok(())
    }
}

/// Parses `key=value`.
pub fn parse_param(s: &str) -> std::result::Result<(String, String), String> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(format!("expected key=value, got {s:?}")),
    }
}
