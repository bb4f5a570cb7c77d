use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Decay assumptions attached to an experiment: `‖z(t)‖ <= C₀ (1+t)^{-α}` for
/// `t >= T₀`, and the lower bound `‖u(t)‖ >= c₀ (1+t)^{-η}` for `t >= t₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayHypothesis {
    pub alpha: f64,
    pub eta: f64,
    #[serde(rename = "C0")]
    pub c_upper: f64,
    #[serde(rename = "c0")]
    pub c_lower: f64,
    #[serde(rename = "T0")]
    pub t_upper: f64,
    #[serde(rename = "t0")]
    pub t_lower: f64,
}

impl DecayHypothesis {
    pub fn new(alpha: f64, eta: f64, c_upper: f64, c_lower: f64, t_upper: f64, t_lower: f64) -> Result<Self> {
        let h = DecayHypothesis {
            alpha,
            eta,
            c_upper,
            c_lower,
            t_upper,
            t_lower,
        };
        h.validate()?;
        Ok(h)
    }

    /// Hypothesis with `η = α`, unit constants and zero onset times.
    pub fn with_alpha(alpha: f64) -> Result<Self> {
        Self::new(alpha, alpha, 1.0, 1.0, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::invalid("alpha", "must be nonnegative"));
        }
        if !(self.eta.is_finite() && self.eta >= self.alpha) {
            return Err(Error::invalid("eta", "must be at least alpha"));
        }
        if !(self.c_upper > 0.0 && self.c_lower > 0.0) {
            return Err(Error::invalid("C0/c0", "must be positive"));
        }
        if self.c_lower > self.c_upper {
            return Err(Error::invalid("c0", "must not exceed C0"));
        }
        if !(self.t_upper >= 0.0 && self.t_lower >= 0.0) {
            return Err(Error::invalid("T0/t0", "must be nonnegative"));
        }
        Ok(())
    }

    /// `q = η/α`, defined for `α > 0`.
    pub fn q(&self) -> Option<f64> {
        (self.alpha > 0.0).then(|| self.eta / self.alpha)
    }
}
