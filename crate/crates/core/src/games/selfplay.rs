use std::fmt;
use std::sync::Arc;

use super::{BilinearZeroSumGame, GapReport};
use crate::eja::EjaElement;
use crate::entropy::SimplexPoint;
use crate::error::{Error, Result};
use crate::learners::{Learner, LearnerConfig, RegretLedger};

/// Absolute slack of the per-checkpoint assertion
/// `gap(x̄_T, ȳ_T) <= (r1(T) + r2(T)) / T`. It is scaled up by the size of
/// the primal and dual values when those exceed one.
pub const GAP_REGRET_SLACK: f64 = 1e-9;

/// Objective of the original problem at a min-player strategy.
pub type PrimalEvaluator = Arc<dyn Fn(&SimplexPoint) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct SelfPlayOptions {
    pub rounds: usize,
    /// Checkpoints are taken every `record_every` rounds and at the last one.
    pub record_every: usize,
    /// Keep every payoff and iterate in the ledgers.
    pub keep_history: bool,
    pub primal: Option<PrimalEvaluator>,
}

impl SelfPlayOptions {
    pub fn new(rounds: usize) -> Self {
        Self {
            rounds,
            record_every: 1,
            keep_history: false,
            primal: None,
        }
    }

    pub fn record_every(mut self, k: usize) -> Self {
        self.record_every = k;
        self
    }

    pub fn keep_history(mut self) -> Self {
        self.keep_history = true;
        self
    }

    pub fn primal(mut self, f: PrimalEvaluator) -> Self {
        self.primal = Some(f);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::InvalidParameter("self-play needs at least one round".into()));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidParameter("record_every must be at least 1".into()));
        }
        Ok(())
    }

    fn records(&self, t: usize) -> bool {
        t.is_multiple_of(self.record_every) || t == self.rounds
    }
}

impl fmt::Debug for SelfPlayOptions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SelfPlayOptions")
            .field("rounds", &self.rounds)
            .field("record_every", &self.record_every)
            .field("keep_history", &self.keep_history)
            .field("primal", &self.primal.is_some())
            .finish()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub round: usize,
    /// Gap at the average iterates.
    pub gap: GapReport,
    pub regret_x: f64,
    pub regret_y: f64,
    /// Primal objective at the average min-player strategy, if an evaluator
    /// was supplied.
    pub primal_objective: Option<f64>,
}

impl Checkpoint {
    /// `(r1 + r2) / t`.
    pub fn regret_sum_scaled(&self) -> f64 {
        (self.regret_x + self.regret_y) / self.round as f64
    }
}

#[derive(Clone, Debug)]
pub struct SelfPlayTrace {
    pub checkpoints: Vec<Checkpoint>,
    pub average_x: SimplexPoint,
    pub average_y: SimplexPoint,
    pub ledger_x: RegretLedger,
    pub ledger_y: RegretLedger,
}

impl SelfPlayTrace {
    pub fn last(&self) -> &Checkpoint {
        self.checkpoints.last().expect("at least one round is played")
    }
}

/// Simultaneous self-play: each round both players see the gain vectors at
/// the current joint strategy, then both update.
///
/// Every checkpoint asserts that the duality gap of the averages is at most
/// the time-averaged sum of regrets and fails with
/// [`Error::GapBoundViolated`] otherwise.
pub fn self_play(
    game: &BilinearZeroSumGame,
    cfg_x: &LearnerConfig,
    cfg_y: &LearnerConfig,
    opts: &SelfPlayOptions,
) -> Result<SelfPlayTrace> {
    opts.validate()?;
    for (cfg, space) in [(cfg_x, game.space_x()), (cfg_y, game.space_y())] {
        if cfg.space != *space {
            return Err(crate::error::mismatch(space.descriptor(), cfg.space.descriptor().clone()));
        }
    }
    let ledger = |cfg: &LearnerConfig| {
        if opts.keep_history {
            RegretLedger::with_history(cfg.space.clone())
        } else {
            RegretLedger::streaming(cfg.space.clone())
        }
    };
    let (mut lx, mut ly) = (Learner::new(cfg_x.clone()), Learner::new(cfg_y.clone()));
    let (mut ledger_x, mut ledger_y) = (ledger(cfg_x), ledger(cfg_y));
    let mut sum_x = EjaElement::zero(cfg_x.space.descriptor());
    let mut sum_y = EjaElement::zero(cfg_y.space.descriptor());
    let mut checkpoints = Vec::new();

    for t in 1..=opts.rounds {
        let (x, y) = (lx.iterate().clone(), ly.iterate().clone());
        let (m1, m2) = game.payoffs_unchecked(&x, &y);
        ledger_x.record(&m1, &x)?;
        ledger_y.record(&m2, &y)?;
        sum_x.add_scaled_unchecked(1.0, &x);
        sum_y.add_scaled_unchecked(1.0, &y);
        lx.observe(&m1)?;
        ly.observe(&m2)?;

        if opts.records(t) {
            let avg_x = SimplexPoint::new_unchecked(sum_x.scale(1.0 / t as f64));
            let avg_y = SimplexPoint::new_unchecked(sum_y.scale(1.0 / t as f64));
            let gap = game.gap_of(&avg_x, &avg_y)?;
            let cp = Checkpoint {
                round: t,
                gap,
                regret_x: ledger_x.regret()?,
                regret_y: ledger_y.regret()?,
                primal_objective: opts.primal.as_ref().map(|f| f(&avg_x)),
            };
            check_gap_regret(&cp)?;
            checkpoints.push(cp);
        }
    }
    let t = opts.rounds as f64;
    Ok(SelfPlayTrace {
        checkpoints,
        average_x: SimplexPoint::new_unchecked(sum_x.scale(1.0 / t)),
        average_y: SimplexPoint::new_unchecked(sum_y.scale(1.0 / t)),
        ledger_x,
        ledger_y,
    })
}

fn check_gap_regret(cp: &Checkpoint) -> Result<()> {
    let bound = cp.regret_sum_scaled();
    let slack = GAP_REGRET_SLACK * 1f64.max(cp.gap.primal.abs()).max(cp.gap.dual.abs());
    if !cp.gap.gap.is_finite() || !bound.is_finite() {
        return Err(Error::NonFinite("duality gap or regret"));
    }
    if cp.gap.gap > bound + slack {
        return Err(Error::GapBoundViolated {
            round: cp.round,
            gap: cp.gap.gap,
            bound,
        });
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct NPlayerTrace {
    pub ledgers: Vec<RegretLedger>,
    /// `(t, sum_i r_i(t))` at every recorded round.
    pub regret_sums: Vec<(usize, f64)>,
}

/// Simultaneous play of N learners against a payoff oracle that maps the
/// joint strategy to one gain vector per player.
pub fn n_player_self_play<F>(
    mut oracle: F,
    cfgs: &[LearnerConfig],
    rounds: usize,
    record_every: usize,
) -> Result<NPlayerTrace>
where
    F: FnMut(&[SimplexPoint]) -> Result<Vec<EjaElement>>,
{
    SelfPlayOptions::new(rounds).record_every(record_every).validate()?;
    let mut learners: Vec<Learner> = cfgs.iter().cloned().map(Learner::new).collect();
    let mut ledgers: Vec<RegretLedger> = cfgs
        .iter()
        .map(|c| RegretLedger::streaming(c.space.clone()))
        .collect();
    let mut regret_sums = Vec::new();
    for t in 1..=rounds {
        let joint: Vec<SimplexPoint> = learners.iter().map(|l| l.iterate().clone()).collect();
        let payoffs = oracle(&joint)?;
        if payoffs.len() != learners.len() {
            return Err(Error::DimensionMismatch(format!(
                "oracle returned {} payoffs for {} players",
                payoffs.len(),
                learners.len()
            )));
        }
        for ((learner, ledger), (m, x)) in learners
            .iter_mut()
            .zip(ledgers.iter_mut())
            .zip(payoffs.iter().zip(&joint))
        {
            ledger.record(m, x)?;
            learner.observe(m)?;
        }
        if t % record_every == 0 || t == rounds {
            let sum = ledgers.iter().map(|l| l.regret()).sum::<Result<f64>>()?;
            regret_sums.push((t, sum));
        }
    }
    Ok(NPlayerTrace {
        ledgers,
        regret_sums,
    })
}
