//! Experiment runner: resolves run configurations, plays the selected
//! algorithms on built-in or user-supplied games and writes metrics as CSV.

pub mod args;
pub mod config;
pub mod error;
pub mod experiments;
pub mod report;
pub mod run;
pub mod verify;

use serde_json::json;
use symcone::learners::AlgorithmRegistry;

pub use config::RunConfig;
pub use error::{CliError, Result};
use experiments::ExperimentRegistry;

/// Executes a parsed command and returns the JSON summary for stdout.
pub fn dispatch(command: args::Command) -> Result<serde_json::Value> {
    let experiments = ExperimentRegistry::default();
    let algorithms = AlgorithmRegistry::default();
    match command {
        args::Command::Run(a) => {
            let cfg = RunConfig::from(a);
            let output = run::execute(&cfg, &experiments, &algorithms)?;
            let written = output.write(&cfg.out)?;
            Ok(json!({ "out": cfg.out, "files": written }))
        }
        args::Command::Verify { out } => {
            let report = verify::verify(&out)?;
            if !report.violations.is_empty() {
                return Err(CliError::Verify(format!(
                    "{} of {} rows violate the gap bound: {}",
                    report.violations.len(),
                    report.checked,
                    report.violations.join("; ")
                )));
            }
            Ok(serde_json::to_value(report).expect("report serializes"))
        }
        args::Command::List => {
            let list: Vec<_> = experiments
                .iter()
                .map(|e| {
                    let params: Vec<_> = e
                        .params()
                        .iter()
                        .map(|p| json!({ "name": p.name, "default": p.default, "help": p.help }))
                        .collect();
                    json!({
                        "name": e.name(),
                        "summary": e.summary(),
                        "default_eta": e.default_step_size(),
                        "default_T": e.default_rounds(),
                        "params": params,
                    })
                })
                .collect();
            Ok(json!({ "experiments": list, "algorithms": algorithms.names() }))
        }
    }
}
