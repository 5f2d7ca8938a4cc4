//! SCMWU and OSCMWU: follow-the-regularized-leader with the symmetric cone
//! negative entropy, with or without a one-step optimistic prediction, and
//! per-player regret accounting.
//!
//! Learners maximize `<m, x>`. Players that minimize a loss feed the negated
//! gradient.

use std::fmt;

use crate::eja::EjaElement;
use crate::entropy::{SimplexPoint, StrategySpace};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct LearnerConfig {
    pub space: StrategySpace,
    pub step_size: f64,
    /// Predict the next payoff by the last one (OSCMWU); otherwise predict 0
    /// (SCMWU).
    pub optimistic: bool,
}

impl LearnerConfig {
    pub fn new(space: StrategySpace, step_size: f64, optimistic: bool) -> Result<Self> {
        if !(step_size.is_finite() && step_size > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "step size must be positive and finite, got {step_size}"
            )));
        }
        Ok(Self {
            space,
            step_size,
            optimistic,
        })
    }

    pub fn scmwu(space: StrategySpace, step_size: f64) -> Result<Self> {
        Self::new(space, step_size, false)
    }

    pub fn oscmwu(space: StrategySpace, step_size: f64) -> Result<Self> {
        Self::new(space, step_size, true)
    }
}

/// Replayable learner state. Cumulative payoffs are stored as sums, never as
/// incrementally exponentiated weights.
#[derive(Clone, Debug)]
pub struct LearnerState {
    cumulative_payoff: EjaElement,
    last_payoff: EjaElement,
    iterate: SimplexPoint,
    t: usize,
}

impl LearnerState {
    /// Sum of all payoffs observed so far.
    pub fn cumulative_payoff(&self) -> &EjaElement {
        &self.cumulative_payoff
    }

    pub fn last_payoff(&self) -> &EjaElement {
        &self.last_payoff
    }

    /// The strategy to play in the next round.
    pub fn iterate(&self) -> &SimplexPoint {
        &self.iterate
    }

    /// Number of payoffs observed.
    pub fn rounds(&self) -> usize {
        self.t
    }
}

/// Fresh learner at the entropy minimizer with zero accumulators.
pub fn learner_init(cfg: &LearnerConfig) -> LearnerState {
    let zero = EjaElement::zero(cfg.space.descriptor());
    LearnerState {
        cumulative_payoff: zero.clone(),
        last_payoff: zero,
        iterate: cfg.space.uniform(),
        t: 0,
    }
}

/// Observes payoff `m` and moves to `exp(w) / tr exp(w)` with
/// `w = step * (sum of payoffs + prediction)`.
pub fn learner_step(state: LearnerState, m: &EjaElement, cfg: &LearnerConfig) -> Result<LearnerState> {
    if !m.has_descriptor(cfg.space.descriptor()) {
        return Err(crate::error::mismatch(cfg.space.descriptor(), m.descriptor()));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("payoff vector"));
    }
    let LearnerState {
        mut cumulative_payoff,
        ..
    } = state;
    cumulative_payoff.add_scaled_unchecked(1.0, m);
    let mut w = cumulative_payoff.clone();
    if cfg.optimistic {
        w.add_scaled_unchecked(1.0, m);
    }
    let iterate = cfg.space.exp_normalize(&w.scale(cfg.step_size))?;
    Ok(LearnerState {
        cumulative_payoff,
        last_payoff: m.clone(),
        iterate,
        t: state.t + 1,
    })
}

/// A configured learner together with its state.
#[derive(Clone, Debug)]
pub struct Learner {
    config: LearnerConfig,
    state: LearnerState,
}

impl Learner {
    pub fn new(config: LearnerConfig) -> Self {
        let state = learner_init(&config);
        Self { config, state }
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.config
    }

    pub fn state(&self) -> &LearnerState {
        &self.state
    }

    pub fn iterate(&self) -> &SimplexPoint {
        &self.state.iterate
    }

    /// On error the state is left unchanged.
    pub fn observe(&mut self, m: &EjaElement) -> Result<()> {
        self.state = learner_step(self.state.clone(), m, &self.config)?;
        Ok(())
    }
}

/// Regret against the best fixed strategy in hindsight for linear payoffs:
/// `max_x <sum m_t, x> - sum <m_t, x_t>`.
///
/// Running sums are always kept; the per-round history only on request.
#[derive(Clone, Debug)]
pub struct RegretLedger {
    space: StrategySpace,
    cumulative_payoff: EjaElement,
    realized_gain: f64,
    rounds: usize,
    history: Option<(Vec<EjaElement>, Vec<SimplexPoint>)>,
}

impl RegretLedger {
    /// Ledger keeping only running sums.
    pub fn streaming(space: StrategySpace) -> Self {
        Self {
            cumulative_payoff: EjaElement::zero(space.descriptor()),
            space,
            realized_gain: 0.0,
            rounds: 0,
            history: None,
        }
    }

    /// Ledger that also stores every payoff and iterate.
    pub fn with_history(space: StrategySpace) -> Self {
        Self {
            history: Some((Vec::new(), Vec::new())),
            ..Self::streaming(space)
        }
    }

    pub fn record(&mut self, m: &EjaElement, x: &SimplexPoint) -> Result<()> {
        self.space.check(m)?;
        self.space.check(x)?;
        self.cumulative_payoff.add_scaled_unchecked(1.0, m);
        self.realized_gain += m.inner_unchecked(x);
        self.rounds += 1;
        if let Some((payoffs, iterates)) = &mut self.history {
            payoffs.push(m.clone());
            iterates.push(x.clone());
        }
        Ok(())
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn cumulative_payoff(&self) -> &EjaElement {
        &self.cumulative_payoff
    }

    /// `sum_t <m_t, x_t>`.
    pub fn realized_gain(&self) -> f64 {
        self.realized_gain
    }

    pub fn payoff_history(&self) -> Option<&[EjaElement]> {
        self.history.as_ref().map(|(p, _)| p.as_slice())
    }

    pub fn iterate_history(&self) -> Option<&[SimplexPoint]> {
        self.history.as_ref().map(|(_, x)| x.as_slice())
    }

    pub fn regret(&self) -> Result<f64> {
        if self.rounds == 0 {
            return Err(Error::EmptyLedger);
        }
        Ok(self.space.support_value(&self.cumulative_payoff)? - self.realized_gain)
    }

    /// Regret against one fixed comparator; never exceeds [`Self::regret`].
    pub fn regret_against(&self, comparator: &SimplexPoint) -> Result<f64> {
        if self.rounds == 0 {
            return Err(Error::EmptyLedger);
        }
        Ok(self.cumulative_payoff.inner(comparator)? - self.realized_gain)
    }
}

/// A named learner variant selectable at runtime.
pub trait Algorithm: Send + Sync {
    fn name(&self) -> &'static str;

    fn configure(&self, space: StrategySpace, step_size: f64) -> Result<LearnerConfig>;
}

pub struct Scmwu;

pub struct Oscmwu;

impl Algorithm for Scmwu {
    fn name(&self) -> &'static str {
        "scmwu"
    }

    fn configure(&self, space: StrategySpace, step_size: f64) -> Result<LearnerConfig> {
        LearnerConfig::scmwu(space, step_size)
    }
}

impl Algorithm for Oscmwu {
    fn name(&self) -> &'static str {
        "oscmwu"
    }

    fn configure(&self, space: StrategySpace, step_size: f64) -> Result<LearnerConfig> {
        LearnerConfig::oscmwu(space, step_size)
    }
}

pub struct AlgorithmRegistry {
    entries: Vec<Box<dyn Algorithm>>,
}

impl AlgorithmRegistry {
    pub fn empty() -> Self {
        Self {
            entries: Vec::new(),
        }
    }

    /// Replaces any variant registered under the same name.
    pub fn register(&mut self, algorithm: Box<dyn Algorithm>) {
        self.entries.retain(|a| a.name() != algorithm.name());
        self.entries.push(algorithm);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Algorithm> {
        self.entries
            .iter()
            .find(|a| a.name() == name)
            .map(|a| a.as_ref())
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown algorithm {name:?}, expected one of {:?}",
                    self.names()
                ))
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|a| a.name()).collect()
    }
}

impl Default for AlgorithmRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Scmwu));
        r.register(Box::new(Oscmwu));
        r
    }
}

impl fmt::Debug for AlgorithmRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eja::{BlockRef, ConeDescriptor};
    use nalgebra::{DMatrix, DVector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn space(d: ConeDescriptor) -> StrategySpace {
        StrategySpace::simplex(d).unwrap()
    }

    fn orthant(v: &[f64]) -> EjaElement {
        EjaElement::orthant(v.to_vec()).unwrap()
    }

    #[test]
    fn init_is_uniform() {
        for d in [ConeDescriptor::orthant(2), ConeDescriptor::sym(3), ConeDescriptor::spin(4)] {
            let cfg = LearnerConfig::scmwu(space(d.clone()), 0.3).unwrap();
            let st = learner_init(&cfg);
            assert_eq!(**st.iterate(), *crate::entropy::uniform_point(&d));
            assert_eq!(st.rounds(), 0);
            assert_eq!(st.cumulative_payoff().norm(), 0.0);
        }
    }

    #[test]
    fn rejects_bad_config_and_payoffs() {
        let s = space(ConeDescriptor::orthant(2));
        assert!(LearnerConfig::scmwu(s.clone(), 0.0).is_err());
        assert!(LearnerConfig::scmwu(s.clone(), f64::NAN).is_err());
        let cfg = LearnerConfig::scmwu(s, 1.0).unwrap();
        let st = learner_init(&cfg);
        assert!(learner_step(st.clone(), &orthant(&[1.0, 2.0, 3.0]), &cfg).is_err());
        assert!(learner_step(st, &orthant(&[1.0, f64::INFINITY]), &cfg).is_err());
    }

    #[test]
    fn zero_payoffs_keep_uniform() {
        let cfg = LearnerConfig::oscmwu(space(ConeDescriptor::sym(3)), 2.0).unwrap();
        let mut st = learner_init(&cfg);
        let zero = EjaElement::zero(&ConeDescriptor::sym(3));
        for _ in 0..10 {
            st = learner_step(st, &zero, &cfg).unwrap();
        }
        assert!((&**st.iterate() - &*cfg.space.uniform()).norm() < 1e-15);
    }

    #[test]
    fn single_softmax_step() {
        let cfg = LearnerConfig::scmwu(space(ConeDescriptor::orthant(2)), 1.0).unwrap();
        let st = learner_step(learner_init(&cfg), &orthant(&[1.0, 0.0]), &cfg).unwrap();
        let e = std::f64::consts::E;
        let BlockRef::Orthant(x) = st.iterate().view() else { panic!() };
        assert!((x[0] - e / (e + 1.0)).abs() < 1e-15);
        assert!((x[1] - 1.0 / (e + 1.0)).abs() < 1e-15);
        assert!((x[0] - 0.7311).abs() < 1e-4);
    }

    #[test]
    fn optimism_is_one_step_ahead_for_constant_payoffs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [ConeDescriptor::orthant(3), ConeDescriptor::spin(4), ConeDescriptor::sym(3)] {
            let m = EjaElement::gaussian(&d, &mut rng);
            let opt = LearnerConfig::oscmwu(space(d.clone()), 0.4).unwrap();
            let plain = LearnerConfig::scmwu(space(d.clone()), 0.4).unwrap();
            let mut a = learner_init(&opt);
            let mut b = learner_step(learner_init(&plain), &m, &plain).unwrap();
            for _ in 0..5 {
                a = learner_step(a, &m, &opt).unwrap();
                b = learner_step(b, &m, &plain).unwrap();
                assert!((&**a.iterate() - &**b.iterate()).trace_norm() < 1e-12);
            }
        }
    }

    #[test]
    fn mwu_reduction() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = ConeDescriptor::orthant(4);
        let eta = 0.7;
        let cfg = LearnerConfig::scmwu(space(d.clone()), eta).unwrap();
        let mut st = learner_init(&cfg);
        let mut cum = [0.0; 4];
        for _ in 0..50 {
            let m = EjaElement::gaussian(&d, &mut rng);
            let BlockRef::Orthant(mv) = m.view() else { panic!() };
            for i in 0..4 {
                cum[i] += mv[i];
            }
            st = learner_step(st, &m, &cfg).unwrap();
            let z: f64 = cum.iter().map(|c| (eta * c).exp()).sum();
            let BlockRef::Orthant(x) = st.iterate().view() else { panic!() };
            for i in 0..4 {
                assert!((x[i] - (eta * cum[i]).exp() / z).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mmwu_reduction_with_common_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 3;
        let q = {
            let g = EjaElement::gaussian(&ConeDescriptor::sym(n), &mut rng);
            let BlockRef::Sym(m) = g.view() else { panic!() };
            m.clone().symmetric_eigen().eigenvectors
        };
        let sym_cfg = LearnerConfig::scmwu(space(ConeDescriptor::sym(n)), 0.5).unwrap();
        let vec_cfg = LearnerConfig::scmwu(space(ConeDescriptor::orthant(n)), 0.5).unwrap();
        let (mut s, mut v) = (learner_init(&sym_cfg), learner_init(&vec_cfg));
        for _ in 0..20 {
            let diag = EjaElement::gaussian(&ConeDescriptor::orthant(n), &mut rng);
            let BlockRef::Orthant(dv) = diag.view() else { panic!() };
            let m = &q * DMatrix::from_diagonal(&DVector::from_column_slice(dv)) * q.transpose();
            s = learner_step(s, &EjaElement::sym(m).unwrap(), &sym_cfg).unwrap();
            v = learner_step(v, &diag, &vec_cfg).unwrap();
            let BlockRef::Sym(xs) = s.iterate().view() else { panic!() };
            let BlockRef::Orthant(xv) = v.iterate().view() else { panic!() };
            let expected = &q * DMatrix::from_diagonal(&DVector::from_column_slice(xv)) * q.transpose();
            assert!((xs - expected).amax() < 1e-10);
        }
    }

    #[test]
    fn regret_examples() {
        let s = space(ConeDescriptor::orthant(2));
        let mut ledger = RegretLedger::with_history(s.clone());
        assert!(matches!(ledger.regret(), Err(Error::EmptyLedger)));
        let u = s.uniform();
        ledger.record(&orthant(&[1.0, 0.0]), &u).unwrap();
        assert!((ledger.regret().unwrap() - 0.5).abs() < 1e-15);
        for _ in 1..10 {
            ledger.record(&orthant(&[1.0, 0.0]), &u).unwrap();
        }
        assert!((ledger.regret().unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(ledger.payoff_history().unwrap().len(), 10);
        assert_eq!(ledger.iterate_history().unwrap().len(), 10);

        let mut zero = RegretLedger::streaming(s.clone());
        zero.record(&orthant(&[0.0, 0.0]), &u).unwrap();
        assert_eq!(zero.regret().unwrap(), 0.0);
        assert!(zero.payoff_history().is_none());
    }

    #[test]
    fn regret_dominates_fixed_comparators() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = space(ConeDescriptor::spin(4));
        let mut ledger = RegretLedger::streaming(s.clone());
        for _ in 0..30 {
            let m = EjaElement::gaussian(s.descriptor(), &mut rng);
            let x = s.random_interior(&mut rng);
            ledger.record(&m, &x).unwrap();
        }
        let r = ledger.regret().unwrap();
        for _ in 0..50 {
            let c = s.random_point(&mut rng);
            assert!(ledger.regret_against(&c).unwrap() <= r + 1e-12);
        }
    }

    #[test]
    fn learner_wrapper_keeps_state_on_error() {
        let cfg = LearnerConfig::oscmwu(space(ConeDescriptor::orthant(2)), 1.0).unwrap();
        let mut l = Learner::new(cfg);
        l.observe(&orthant(&[1.0, 0.0])).unwrap();
        let before = l.iterate().clone();
        assert!(l.observe(&orthant(&[f64::NAN, 0.0])).is_err());
        assert_eq!(*l.iterate(), before);
        assert_eq!(l.state().rounds(), 1);
    }

    #[test]
    fn registry_lookup() {
        let r = AlgorithmRegistry::default();
        assert_eq!(r.names(), vec!["scmwu", "oscmwu"]);
        let s = space(ConeDescriptor::orthant(2));
        assert!(r.get("oscmwu").unwrap().configure(s.clone(), 1.0).unwrap().optimistic);
        assert!(!r.get("scmwu").unwrap().configure(s, 1.0).unwrap().optimistic);
        assert!(r.get("hedge").is_err());
    }
}
