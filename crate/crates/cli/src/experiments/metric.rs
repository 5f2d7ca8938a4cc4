use symcone::applications::{build_metric_learning_game, LabeledDataset, MetricLearningInstance};

use super::{BuildContext, Experiment, Instance, ParamSpec};
use crate::error::Result;

/// Simplex–spectraplex metric learning on a labeled CSV (`--data`) or, without
/// one, on Gaussian clusters. Features are standardized before pairs are
/// sampled.
pub struct MetricLearning;

const PARAMS: &[ParamSpec] = &[
    ParamSpec {
        name: "similar",
        default: "400",
        help: "number of same-label pairs",
    },
    ParamSpec {
        name: "dissimilar",
        default: "400",
        help: "number of different-label pairs",
    },
    ParamSpec {
        name: "classes",
        default: "3",
        help: "clusters of the synthetic dataset",
    },
    ParamSpec {
        name: "per_class",
        default: "50",
        help: "points per synthetic cluster",
    },
    ParamSpec {
        name: "dim",
        default: "4",
        help: "feature dimension of the synthetic dataset",
    },
];

impl Experiment for MetricLearning {
    fn name(&self) -> &'static str {
        "metric-learning"
    }

    fn summary(&self) -> &'static str {
        "weights on dissimilar pairs against a trace-one PSD metric"
    }

    fn params(&self) -> &'static [ParamSpec] {
        PARAMS
    }

    fn default_step_size(&self) -> Option<f64> {
        Some(20.0)
    }

    fn default_rounds(&self) -> Option<usize> {
        Some(9000)
    }

    fn build(&self, mut ctx: BuildContext<'_>) -> Result<Instance> {
        let p = ctx.params;
        let mut data = match ctx.data {
            Some(path) => LabeledDataset::from_csv(path)?,
            None => LabeledDataset::synthetic(p.get("classes")?, p.get("per_class")?, p.get("dim")?, &mut ctx.rng),
        };
        data.standardize();
        let inst = MetricLearningInstance::sample(&data, p.get("similar")?, p.get("dissimilar")?, &mut ctx.rng)?;
        let (game, _ridge) = build_metric_learning_game(&inst)?;
        Ok(Instance::Static { game, primal: None })
    }
}
