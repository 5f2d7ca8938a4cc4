//! Bilinear two-player zero-sum games over generalized simplices,
//! duality-gap certificates, step-size schedules and self-play drivers.
//!
//! The payoff is `f(x, y) = <y, A(x)> + <b, x> + <c, y>`; `x` minimizes and
//! `y` maximizes. All pairings are the canonical Jordan-algebra inner
//! products.

mod dense;
mod schedule;
mod selfplay;

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::eja::{ConeDescriptor, EjaElement};
use crate::entropy::{SimplexPoint, StrategySpace};
use crate::error::{mismatch, Error, Result};

pub use dense::{DenseOperator, LipschitzBound};
pub use schedule::{
    regret_sum_bound, self_play_step_size, saddle_schedule, saddle_schedule_from_log_ranks,
    Schedule,
};
pub use selfplay::{
    n_player_self_play, self_play, Checkpoint, NPlayerTrace, PrimalEvaluator, SelfPlayOptions,
    SelfPlayTrace, GAP_REGRET_SLACK,
};

/// A linear map between two Jordan algebras together with its adjoint under
/// the canonical inner products.
pub trait LinearMap: Send + Sync {
    fn domain(&self) -> &ConeDescriptor;

    fn codomain(&self) -> &ConeDescriptor;

    fn apply(&self, x: &EjaElement) -> EjaElement;

    fn adjoint(&self, y: &EjaElement) -> EjaElement;
}

/// Tolerance of the construction-time adjoint check, relative to the size of
/// the pairing.
pub const ADJOINT_TOL: f64 = 1e-9;

#[derive(Clone)]
pub struct BilinearZeroSumGame {
    space_x: StrategySpace,
    space_y: StrategySpace,
    operator: Arc<dyn LinearMap>,
    b: EjaElement,
    c: EjaElement,
    lipschitz: (f64, f64),
}

/// Both halves of a duality gap: `primal = max_y f(x̄, y)`,
/// `dual = min_x f(x, ȳ)`, `gap = primal - dual`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapReport {
    pub gap: f64,
    pub primal: f64,
    pub dual: f64,
}

impl BilinearZeroSumGame {
    /// Validates descriptors and checks `<A x, y> = <x, A* y>` on a few
    /// random pairs.
    pub fn new(
        space_x: StrategySpace,
        space_y: StrategySpace,
        operator: Arc<dyn LinearMap>,
        b: EjaElement,
        c: EjaElement,
        lipschitz: (f64, f64),
    ) -> Result<Self> {
        if operator.domain() != space_x.descriptor() {
            return Err(mismatch(space_x.descriptor(), operator.domain().clone()));
        }
        if operator.codomain() != space_y.descriptor() {
            return Err(mismatch(space_y.descriptor(), operator.codomain().clone()));
        }
        space_x.check(&b)?;
        space_y.check(&c)?;
        if !(b.is_finite() && c.is_finite()) {
            return Err(Error::NonFinite("game offsets"));
        }
        let (l1, l2) = lipschitz;
        if !(l1.is_finite() && l2.is_finite() && l1 >= 0.0 && l2 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Lipschitz constants must be finite and nonnegative, got ({l1}, {l2})"
            )));
        }
        check_adjoint(operator.as_ref())?;
        Ok(Self {
            space_x,
            space_y,
            operator,
            b,
            c,
            lipschitz,
        })
    }

    pub fn space_x(&self) -> &StrategySpace {
        &self.space_x
    }

    pub fn space_y(&self) -> &StrategySpace {
        &self.space_y
    }

    pub fn operator(&self) -> &dyn LinearMap {
        self.operator.as_ref()
    }

    pub fn offset_x(&self) -> &EjaElement {
        &self.b
    }

    pub fn offset_y(&self) -> &EjaElement {
        &self.c
    }

    pub fn lipschitz(&self) -> (f64, f64) {
        self.lipschitz
    }

    fn check_pair(&self, x: &EjaElement, y: &EjaElement) -> Result<()> {
        self.space_x.check(x)?;
        self.space_y.check(y)
    }

    /// `f(x, y)`.
    pub fn value(&self, x: &EjaElement, y: &EjaElement) -> Result<f64> {
        self.check_pair(x, y)?;
        Ok(y.inner_unchecked(&self.operator.apply(x)) + self.b.inner_unchecked(x) + self.c.inner_unchecked(y))
    }

    /// Gain vectors `(-(A* y + b), A x + c)` for the minimizer and maximizer.
    pub fn payoff_vectors(&self, x: &SimplexPoint, y: &SimplexPoint) -> Result<(EjaElement, EjaElement)> {
        self.check_pair(x, y)?;
        Ok(self.payoffs_unchecked(x, y))
    }

    fn payoffs_unchecked(&self, x: &EjaElement, y: &EjaElement) -> (EjaElement, EjaElement) {
        let mut m1 = self.operator.adjoint(y);
        m1.add_scaled_unchecked(1.0, &self.b);
        let m1 = m1.scale(-1.0);
        let mut m2 = self.operator.apply(x);
        m2.add_scaled_unchecked(1.0, &self.c);
        (m1, m2)
    }

    /// Duality gap of `(x̄, ȳ)` from the support functions of both
    /// strategy spaces.
    pub fn duality_gap(&self, x: &SimplexPoint, y: &SimplexPoint) -> Result<GapReport> {
        self.gap_of(x, y)
    }

    pub(crate) fn gap_of(&self, x: &EjaElement, y: &EjaElement) -> Result<GapReport> {
        self.check_pair(x, y)?;
        let (m1, m2) = self.payoffs_unchecked(x, y);
        let primal = self.space_y.support_value(&m2)? + self.b.inner_unchecked(x);
        let dual = -self.space_x.support_value(&m1)? + self.c.inner_unchecked(y);
        Ok(GapReport {
            gap: primal - dual,
            primal,
            dual,
        })
    }
}

impl fmt::Debug for BilinearZeroSumGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BilinearZeroSumGame")
            .field("x", self.space_x.descriptor())
            .field("y", self.space_y.descriptor())
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

fn check_adjoint(op: &dyn LinearMap) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..8 {
        let x = EjaElement::gaussian(op.domain(), &mut rng);
        let y = EjaElement::gaussian(op.codomain(), &mut rng);
        let ax = op.apply(&x);
        let aty = op.adjoint(&y);
        if !ax.has_descriptor(op.codomain()) {
            return Err(mismatch(op.codomain(), ax.descriptor()));
        }
        if !aty.has_descriptor(op.domain()) {
            return Err(mismatch(op.domain(), aty.descriptor()));
        }
        let forward = ax.inner_unchecked(&y);
        let adjoint = x.inner_unchecked(&aty);
        let scale = 1.0f64.max(ax.norm() * y.norm()).max(x.norm() * aty.norm());
        let consistent = (forward - adjoint).abs() <= ADJOINT_TOL * scale;
        if !consistent {
            return Err(Error::AdjointMismatch { forward, adjoint });
        }
    }
    Ok(())
}
