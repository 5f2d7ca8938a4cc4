use crate::error::{Error, Result};

/// Constant step size and horizon for an ε-saddle point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Schedule {
    pub step_size: f64,
    pub rounds: usize,
    /// The horizon before rounding up.
    pub rounds_real: f64,
}

/// `η = 1 / (2 sqrt(2 (L1² + L2²)))`,
/// `T = ceil(2 (ln r1 + ln r2) sqrt(2 (L1² + L2²)) / ε)`.
pub fn saddle_schedule(l1: f64, l2: f64, r1: usize, r2: usize, eps: f64) -> Result<Schedule> {
    if r1 == 0 || r2 == 0 {
        return Err(Error::InvalidParameter("ranks must be at least 1".into()));
    }
    saddle_schedule_from_log_ranks(l1, l2, (r1 as f64).ln(), (r2 as f64).ln(), eps)
}

/// As [`saddle_schedule`] with the entropy ranges given directly, e.g. a
/// sum of `ln r` over the factors of a product of simplices.
pub fn saddle_schedule_from_log_ranks(l1: f64, l2: f64, lr1: f64, lr2: f64, eps: f64) -> Result<Schedule> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {eps}")));
    }
    if !(lr1 >= 0.0 && lr2 >= 0.0 && lr1.is_finite() && lr2.is_finite()) {
        return Err(Error::InvalidParameter("entropy ranges must be finite and nonnegative".into()));
    }
    let s = (2.0 * (l1 * l1 + l2 * l2)).sqrt();
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Lipschitz constants ({l1}, {l2}) give no finite step size"
        )));
    }
    let rounds_real = 2.0 * (lr1 + lr2) * s / eps;
    Ok(Schedule {
        step_size: 1.0 / (2.0 * s),
        rounds: rounds_real.ceil() as usize,
        rounds_real,
    })
}

/// `η = 1 / (2 sqrt(N sum L_i²))`. When every constant is zero the payoffs
/// are constant and any step is admissible; unit constants are used then.
pub fn self_play_step_size(lipschitz: &[f64]) -> Result<f64> {
    let n = lipschitz.len() as f64;
    if lipschitz.is_empty() || lipschitz.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
        return Err(Error::InvalidParameter(format!("bad Lipschitz constants {lipschitz:?}")));
    }
    let mut s: f64 = lipschitz.iter().map(|l| l * l).sum();
    if s == 0.0 {
        s = n;
    }
    Ok(1.0 / (2.0 * (n * s).sqrt()))
}

/// `2 (sum R_i) sqrt(N sum L_i²)` with `R_i` the entropy range of player i.
pub fn regret_sum_bound(log_ranks: &[f64], lipschitz: &[f64]) -> f64 {
    let n = lipschitz.len() as f64;
    let s: f64 = lipschitz.iter().map(|l| l * l).sum();
    2.0 * log_ranks.iter().sum::<f64>() * (n * s).sqrt()
}
