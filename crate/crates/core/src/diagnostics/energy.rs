use serde::{Deserialize, Serialize};

use crate::dynamics::FluidParams;
use crate::error::{Error, Result};
use crate::series::NormSeries;

/// Relative tolerance applied to the energy inequality by default.
pub const ENERGY_TOLERANCE: f64 = 1e-6;

/// Both sides of the integrated energy inequality between two recorded times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyCheck {
    pub s: f64,
    pub t: f64,
    /// `‖z(t)‖² + 2∫ₛᵗ (μ‖Du‖² + ν‖Dw‖²) dτ`.
    pub lhs: f64,
    /// `‖z(s)‖²`.
    pub rhs: f64,
    /// `rhs - lhs`.
    pub slack: f64,
    /// `slack >= -ENERGY_TOLERANCE · rhs`.
    pub pass: bool,
}

impl EnergyCheck {
    pub fn passes(&self, rel_tol: f64) -> bool {
        self.slack >= -rel_tol * self.rhs
    }
}

/// Integrated energy inequality between recorded times `s < t`, with the
/// dissipation integral evaluated by the trapezoidal rule on the recorded samples.
pub fn energy_check(series: &NormSeries, params: &FluidParams, s: f64, t: f64) -> Result<EnergyCheck> {
    if !(s < t) {
        return Err(Error::Series(format!("energy check needs s < t, got s = {s}, t = {t}")));
    }
    let i = series.index_of(s)?;
    let j = series.index_of(t)?;
    energy_check_indices(series, params, i, j)
}

pub(crate) fn energy_check_indices(
    series: &NormSeries,
    params: &FluidParams,
    i: usize,
    j: usize,
) -> Result<EnergyCheck> {
    let times = series.times();
    let energy = series.get("energy")?;
    let du = series.get("dissip_u")?;
    let dw = series.get("dissip_w")?;
    let mut integral = 0.0;
    for k in i..j {
        let f0 = params.mu * du[k] + params.nu * dw[k];
        let f1 = params.mu * du[k + 1] + params.nu * dw[k + 1];
        integral += 0.5 * (times[k + 1] - times[k]) * (f0 + f1);
    }
    let lhs = energy[j] + 2.0 * integral;
    let rhs = energy[i];
    let slack = rhs - lhs;
    Ok(EnergyCheck {
        s: times[i],
        t: times[j],
        lhs,
        rhs,
        slack,
        pass: slack >= -ENERGY_TOLERANCE * rhs,
    })
}

/// Checks every ordered pair of recorded times and returns the worst relative slack
/// `min (slack / rhs)` together with the pair that attains it.
pub fn energy_check_all_pairs(series: &NormSeries, params: &FluidParams) -> Result<(f64, EnergyCheck)> {
    let n = series.len();
    if n < 2 {
        return Err(Error::Series("energy check needs at least two records".into()));
    }
    let times = series.times();
    let energy = series.get("energy")?;
    let du = series.get("dissip_u")?;
    let dw = series.get("dissip_w")?;
    // cumulative trapezoid so every pair is O(1)
    let mut cum = vec![0.0; n];
    for k in 1..n {
        let f0 = params.mu * du[k - 1] + params.nu * dw[k - 1];
        let f1 = params.mu * du[k] + params.nu * dw[k];
        cum[k] = cum[k - 1] + 0.5 * (times[k] - times[k - 1]) * (f0 + f1);
    }
    let mut worst: Option<(f64, usize, usize)> = None;
    for i in 0..n {
        for j in i + 1..n {
            let slack = energy[i] - energy[j] - 2.0 * (cum[j] - cum[i]);
            let rel = if energy[i] > 0.0 { slack / energy[i] } else { slack };
            if worst.is_none_or(|(w, _, _)| rel < w) {
                worst = Some((rel, i, j));
            }
        }
    }
    let (rel, i, j) = worst.expect("at least one pair");
    Ok((rel, energy_check_indices(series, params, i, j)?))
}
