//! Symmetric cone games and the optimistic symmetric-cone multiplicative
//! weights learner.
//!
//! Strategies live in generalized simplices (trace-one slices of symmetric
//! cones). The crate provides the Jordan-algebra arithmetic behind them, the
//! entropic geometry of the simplices, the SCMWU/OSCMWU learners, bilinear
//! zero-sum game drivers and builders for the metric-learning and
//! Fermat–Weber location games.
//!
//! ```
//! use nalgebra::DMatrix;
//! use symcone::games::{saddle_schedule, self_play, DenseOperator, SelfPlayOptions};
//! use symcone::learners::LearnerConfig;
//! use symcone::ConeDescriptor;
//!
//! # fn main() -> symcone::Result<()> {
//! let m = DMatrix::from_row_slice(2, 3, &[1.0, -0.5, 0.2, -0.3, 0.8, -0.6]);
//! let game = DenseOperator::new(ConeDescriptor::orthant(3), ConeDescriptor::orthant(2), m)?.into_game(None)?;
//! let (l1, l2) = game.lipschitz();
//! let schedule = saddle_schedule(l1, l2, 3, 2, 0.01)?;
//! let cx = LearnerConfig::oscmwu(game.space_x().clone(), schedule.step_size)?;
//! let cy = LearnerConfig::oscmwu(game.space_y().clone(), schedule.step_size)?;
//! let trace = self_play(&game, &cx, &cy, &SelfPlayOptions::new(schedule.rounds))?;
//! assert!(trace.last().gap.gap <= 0.01);
//! # Ok(())
//! # }
//! ```

pub mod applications;
pub mod eja;
pub mod entropy;
mod error;
pub mod games;
pub mod learners;

pub use eja::{ConeDescriptor, EjaElement};
pub use entropy::{SimplexPoint, StrategySpace};
pub use error::{Error, Result};

/// Version of this library, as recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
