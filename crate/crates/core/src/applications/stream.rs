//! Online location: targets arrive as a correlated stream and both players
//! learn against the per-round saddle loss `<A x̄ - b̄_t, y>`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use super::fermat_weber::FermatWeberOperator;
use crate::eja::EjaElement;
use crate::error::{Error, Result};
use crate::games::{n_player_self_play, LinearMap};
use crate::learners::{LearnerConfig, RegretLedger};

#[derive(Clone, Debug, PartialEq)]
pub struct StreamParams {
    /// Location dimension.
    pub dim: usize,
    /// Residual dimension (rows of the map).
    pub residual_dim: usize,
    pub radius: f64,
    /// AR(1) correlation of consecutive targets.
    pub rho: f64,
    /// Innovation standard deviation.
    pub sigma: f64,
    pub rounds: usize,
    pub seed: u64,
}

impl StreamParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.dim == 0 || self.residual_dim == 0 {
            return bad("dimensions must be positive".into());
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return bad(format!("radius must be positive, got {}", self.radius));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return bad(format!("rho must lie in [0, 1), got {}", self.rho));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma must be positive, got {}", self.sigma));
        }
        if self.rounds == 0 {
            return bad("the stream needs at least one round".into());
        }
        Ok(())
    }
}

/// A fixed map and one target per round.
#[derive(Clone, Debug, PartialEq)]
pub struct Stream {
    pub map: DMatrix<f64>,
    pub targets: Vec<DVector<f64>>,
}

impl Stream {
    pub fn new(map: DMatrix<f64>, targets: Vec<DVector<f64>>) -> Result<Self> {
        if map.nrows() == 0 || map.ncols() == 0 || targets.is_empty() {
            return Err(Error::DimensionMismatch("empty stream".into()));
        }
        if targets.iter().any(|t| t.len() != map.nrows()) {
            return Err(Error::DimensionMismatch("targets must match the map's rows".into()));
        }
        Ok(Self { map, targets })
    }
}

/// Map with i.i.d. standard normal entries rescaled to unit spectral norm;
/// targets follow `b_t = rho b_{t-1} + sqrt(1 - rho²) xi_t`,
/// `xi_t ~ N(0, sigma² I)`, each renormalized to unit length, starting from
/// a normalized Gaussian `b_0`. Emits `b_1, ..., b_T`.
pub fn generate_stream(params: &StreamParams) -> Result<Stream> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let (m, d) = (params.residual_dim, params.dim);
    let raw = DMatrix::from_fn(m, d, |_, _| StandardNormal.sample(&mut rng));
    let norm = raw.singular_values().iter().copied().fold(0.0, f64::max);
    let map = if norm > 0.0 { raw / norm } else { raw };

    let unit = |v: DVector<f64>| {
        let n = v.norm();
        if n > 0.0 {
            v / n
        } else {
            v
        }
    };
    let mut b = unit(DVector::from_fn(m, |_, _| StandardNormal.sample(&mut rng)));
    let innovation = Normal::new(0.0, params.sigma).expect("validated sigma");
    let keep = (1.0 - params.rho * params.rho).sqrt();
    let mut targets = Vec::with_capacity(params.rounds);
    for _ in 0..params.rounds {
        let xi = DVector::from_fn(m, |_, _| innovation.sample(&mut rng));
        b = unit(&b * params.rho + xi * keep);
        targets.push(b.clone());
    }
    Stream::new(map, targets)
}

#[derive(Clone, Debug)]
pub struct OnlineTrace {
    /// `(t, (r1(t) + r2(t)) / t)` at every recorded round.
    pub scaled_regret_sums: Vec<(usize, f64)>,
    pub ledger_x: RegretLedger,
    pub ledger_y: RegretLedger,
}

/// Plays the stream: at round `t` the location player gains
/// `-A*(y_t)` and the residual player gains `A x̄_t - b̄_t`.
pub fn online_self_play(
    stream: &Stream,
    radius: f64,
    cfg_x: &LearnerConfig,
    cfg_y: &LearnerConfig,
    record_every: usize,
) -> Result<OnlineTrace> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
    }
    let op = FermatWeberOperator::new(vec![stream.map.clone()], radius);
    for (cfg, desc) in [(cfg_x, op.domain()), (cfg_y, op.codomain())] {
        if cfg.space.descriptor() != desc || !cfg.space.contains(&cfg.space.uniform(), 0.0) {
            return Err(crate::error::mismatch(desc, cfg.space.descriptor().clone()));
        }
    }
    let offsets: Vec<EjaElement> = stream
        .targets
        .iter()
        .map(|t| {
            EjaElement::spin(0.0, (-t).as_slice().to_vec())
                .and_then(|b| EjaElement::product(vec![b]))
        })
        .collect::<Result<_>>()?;
    let mut t = 0;
    let trace = n_player_self_play(
        |joint| {
            let mut m1 = op.adjoint(&joint[1]);
            m1 = m1.scale(-1.0);
            let mut m2 = op.apply(&joint[0]);
            m2.add_scaled(1.0, &offsets[t])?;
            t += 1;
            Ok(vec![m1, m2])
        },
        &[cfg_x.clone(), cfg_y.clone()],
        stream.targets.len(),
        record_every,
    )?;
    let mut ledgers = trace.ledgers.into_iter();
    Ok(OnlineTrace {
        scaled_regret_sums: trace
            .regret_sums
            .into_iter()
            .map(|(t, r)| (t, r / t as f64))
            .collect(),
        ledger_x: ledgers.next().expect("two players"),
        ledger_y: ledgers.next().expect("two players"),
    })
}
