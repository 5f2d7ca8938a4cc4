use rand_chacha::rand_core::RngCore;
use symcone::applications::{build_fermat_weber_game, synthetic_fermat_weber, StreamParams};

use super::{BuildContext, Experiment, Instance, ParamSpec};
use crate::error::Result;

/// Sum of distances to random targets, solved as a second-order-cone game.
pub struct FermatWeber;

const FW_PARAMS: &[ParamSpec] = &[
    ParamSpec {
        name: "d",
        default: "20",
        help: "location dimension",
    },
    ParamSpec {
        name: "p",
        default: "50",
        help: "number of targets",
    },
    ParamSpec {
        name: "radius",
        default: "5",
        help: "radius of the feasible ball",
    },
];

impl Experiment for FermatWeber {
    fn name(&self) -> &'static str {
        "fermat-weber"
    }

    fn summary(&self) -> &'static str {
        "facility location: minimize the sum of distances over a ball"
    }

    fn params(&self) -> &'static [ParamSpec] {
        FW_PARAMS
    }

    fn default_step_size(&self) -> Option<f64> {
        Some(0.07)
    }

    fn default_rounds(&self) -> Option<usize> {
        Some(10_000)
    }

    fn build(&self, mut ctx: BuildContext<'_>) -> Result<Instance> {
        let p = ctx.params;
        let inst = synthetic_fermat_weber(p.get("d")?, p.get("p")?, p.get("radius")?, &mut ctx.rng)?;
        let (game, primal) = build_fermat_weber_game(&inst)?;
        Ok(Instance::Static {
            game,
            primal: Some(primal),
        })
    }
}

/// Facility location against a correlated stream of targets.
pub struct OnlineLocation;

const ONLINE_PARAMS: &[ParamSpec] = &[
    ParamSpec {
        name: "d",
        default: "10",
        help: "location dimension",
    },
    ParamSpec {
        name: "m",
        default: "10",
        help: "residual dimension",
    },
    ParamSpec {
        name: "radius",
        default: "1",
        help: "radius of the feasible ball",
    },
    ParamSpec {
        name: "rho",
        default: "0.6",
        help: "correlation of consecutive targets",
    },
    ParamSpec {
        name: "sigma",
        default: "0.12",
        help: "innovation standard deviation",
    },
];

impl Experiment for OnlineLocation {
    fn name(&self) -> &'static str {
        "online-fl"
    }

    fn summary(&self) -> &'static str {
        "online facility location with AR(1) targets"
    }

    fn params(&self) -> &'static [ParamSpec] {
        ONLINE_PARAMS
    }

    fn default_step_size(&self) -> Option<f64> {
        Some(10.0)
    }

    fn default_rounds(&self) -> Option<usize> {
        Some(20_000)
    }

    fn build(&self, mut ctx: BuildContext<'_>) -> Result<Instance> {
        let p = ctx.params;
        let stream = StreamParams {
            dim: p.get("d")?,
            residual_dim: p.get("m")?,
            radius: p.get("radius")?,
            rho: p.get("rho")?,
            sigma: p.get("sigma")?,
            rounds: 1,
            seed: ctx.rng.next_u64(),
        };
        stream.validate()?;
        Ok(Instance::Online { stream })
    }
}
