//! Inverse-temperature and non-extensive-index schedules.

use crate::error::{Error, Result};

/// Parameters of the Cauchy β schedule and the linear q schedule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScheduleConfig {
    pub beta0: f64,
    pub alpha: f64,
    pub q0: f64,
    /// Number of generations `T`; q reaches 1 at generation index `T - 1`.
    pub horizon: usize,
    /// Hold q at `q0` instead of decaying it.
    pub constant_q: bool,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            beta0: 200.0,
            alpha: 1.01,
            q0: 1.0,
            horizon: 100,
            constant_q: false,
        }
    }
}

impl ScheduleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta0.is_finite() && self.beta0 > 0.0) {
            return Err(Error::usage(format!(
                "beta0 must be finite and > 0, got {}",
                self.beta0
            )));
        }
        if !(self.alpha.is_finite() && self.alpha > 1.0) {
            return Err(Error::usage(format!(
                "alpha must be > 1, got {}",
                self.alpha
            )));
        }
        if !self.q0.is_finite() {
            return Err(Error::usage(format!("q0 must be finite, got {}", self.q0)));
        }
        if self.horizon == 0 {
            return Err(Error::usage("horizon must be at least one generation"));
        }
        Ok(())
    }

    /// q used at generation index `t`, honouring the constant-q switch.
    pub fn q_at(&self, t: usize) -> Result<f64> {
        if self.constant_q {
            if t >= self.horizon {
                return Err(out_of_horizon(t, self.horizon));
            }
            Ok(self.q0)
        } else {
            linear_q(t, self)
        }
    }
}

fn out_of_horizon(t: usize, horizon: usize) -> Error {
    Error::usage(format!("generation index {t} outside [0, {}]", horizon - 1))
}

/// `β_t = β₀ Σ_{i=1}^{t} i^(-α)` for `t ≥ 1`, by direct summation.
pub fn cauchy_beta(t: usize, cfg: &ScheduleConfig) -> Result<f64> {
    if t == 0 {
        return Err(Error::usage("the beta schedule starts at t = 1"));
    }
    Ok(cfg.beta0 * (1..=t).map(|i| (i as f64).powf(-cfg.alpha)).sum::<f64>())
}

/// Linear decay of q from `q0` at `t = 0` to exactly 1 at `t = T - 1`.
pub fn linear_q(t: usize, cfg: &ScheduleConfig) -> Result<f64> {
    let horizon = cfg.horizon;
    if horizon == 0 || t >= horizon {
        return Err(out_of_horizon(t, horizon.max(1)));
    }
    if horizon == 1 {
        return Ok(cfg.q0);
    }
    if t == horizon - 1 {
        return Ok(1.0);
    }
    Ok(cfg.q0 + (1.0 - cfg.q0) * (t as f64 / (horizon - 1) as f64))
}

/// Incremental β schedule: yields `β_1, β_2, ...` by accumulating terms.
///
/// Agrees with [`cauchy_beta`] to within a few ulps per step.
#[derive(Clone, Debug)]
pub struct CauchyBeta {
    beta0: f64,
    alpha: f64,
    t: usize,
    partial: f64,
}

impl CauchyBeta {
    pub fn new(cfg: &ScheduleConfig) -> Self {
        Self {
            beta0: cfg.beta0,
            alpha: cfg.alpha,
            t: 0,
            partial: 0.0,
        }
    }
}

impl Iterator for CauchyBeta {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        self.t += 1;
        self.partial += (self.t as f64).powf(-self.alpha);
        Some(self.beta0 * self.partial)
    }
}
