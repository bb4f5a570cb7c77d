use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Viscosity and coupling constants of the micropolar system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluidParams {
    /// Kinematic viscosity μ.
    pub mu: f64,
    /// Angular viscosity ν.
    pub nu: f64,
    /// Vortex (micro-rotation) viscosity χ.
    pub chi: f64,
    /// Gyroviscosity κ; it has no effect in 2D.
    pub kappa: f64,
}

impl FluidParams {
    pub fn new(mu: f64, nu: f64, chi: f64, kappa: f64) -> Result<Self> {
        let p = FluidParams { mu, nu, chi, kappa };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (key, v) in [("mu", self.mu), ("nu", self.nu), ("chi", self.chi)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(key, format!("must be positive, got {v}")));
            }
        }
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return Err(Error::invalid(
                "kappa",
                format!("must be nonnegative, got {}", self.kappa),
            ));
        }
        Ok(())
    }

    /// `γ = min{μ, ν}`.
    pub fn gamma(&self) -> f64 {
        self.mu.min(self.nu)
    }

    pub fn equal_viscosities(&self) -> bool {
        self.mu == self.nu
    }
}
