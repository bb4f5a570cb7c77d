use serde::{Deserialize, Serialize};

use crate::dynamics::{FluidParams, MicropolarState};
use crate::error::Result;

/// Explicit constants of the monotonicity and smallness thresholds.
pub struct BoundConstants;

impl BoundConstants {
    /// Absolute constant `12^{1/8} / √(6π)` of the 3D smallness condition.
    pub fn k_smallness() -> f64 {
        12f64.powf(0.125) / (6.0 * std::f64::consts::PI).sqrt()
    }
    /// Coefficient of `γ⁻⁵‖z₀‖⁴` in the 3D monotonicity-time bound.
    pub const T_DOUBLESTAR_COEFF_3D: f64 = 0.005;
    /// In 2D, `‖Dz‖` is nonincreasing once `‖z‖ <= 2γ`.
    pub const SMALLNESS_COEFF_2D: f64 = 2.0;
    /// Initial-data threshold `‖z₀‖^{1/2}‖Dz₀‖^{1/2} <= 3.182 · γ`.
    pub const H1_INITDATA_THRESHOLD: f64 = 3.182;
    pub const H_1_2: f64 = 0.5;
    pub const HPRIME_1_N: f64 = 1.0;

    /// `p_n = (n - 2) / 4`.
    pub fn p_n(dim: usize) -> f64 {
        (dim as f64 - 2.0) / 4.0
    }
}

/// Upper bound `0.005 · γ⁻⁵ · ‖z₀‖⁴` on the time after which `‖Dz‖` is monotone in 3D.
pub fn t_doublestar_bound_3d(params: &FluidParams, z0_norm: f64) -> f64 {
    BoundConstants::T_DOUBLESTAR_COEFF_3D * params.gamma().powi(-5) * z0_norm.powi(4)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallnessMargin {
    /// 3D: `K‖z‖^{1/2}‖Dz‖^{1/2}`; 2D: `‖z‖`.
    pub value: f64,
    /// 3D: `γ`; 2D: `2γ`.
    pub threshold: f64,
    pub satisfied: bool,
    /// `‖z‖^{1/2}‖Dz‖^{1/2}`.
    pub h1_value: f64,
    /// `3.182 · γ`.
    pub h1_threshold: f64,
    pub h1_satisfied: bool,
}

/// Evaluates the smallness conditions that switch on monotone decay of `‖Dz‖`.
pub fn smallness_margin(state: &MicropolarState, params: &FluidParams) -> Result<SmallnessMargin> {
    let gamma = params.gamma();
    let z = state.norm();
    let dz = state.seminorm(1)?;
    let h1_value = (z * dz).sqrt();
    let (value, threshold) = if state.dim() == 3 {
        (BoundConstants::k_smallness() * h1_value, gamma)
    } else {
        (z, BoundConstants::SMALLNESS_COEFF_2D * gamma)
    };
    let h1_threshold = BoundConstants::H1_INITDATA_THRESHOLD * gamma;
    Ok(SmallnessMargin {
        value,
        threshold,
        satisfied: value < threshold,
        h1_value,
        h1_threshold,
        h1_satisfied: h1_value <= h1_threshold,
    })
}
