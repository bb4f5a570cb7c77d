use serde::{Deserialize, Serialize};

use super::bounds::BoundConstants;
use super::fit::{fit_decay_exponent, fit_power_law, window_samples};
use super::hypothesis::DecayHypothesis;
use crate::dynamics::{label, FluidParams};
use crate::error::{Error, Result};
use crate::series::NormSeries;
use crate::spectral::Grid;

/// Slope tolerance for nonlinear runs.
pub const SLOPE_TOL_NONLINEAR: f64 = 0.2;
/// Slope tolerance for linear and heat-semigroup runs.
pub const SLOPE_TOL_LINEAR: f64 = 0.05;

/// One pass/fail line of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub predicted: f64,
    pub measured: f64,
    pub tol: f64,
    pub pass: bool,
    pub required: bool,
}

impl CheckRecord {
    /// `|measured - predicted| <= tol`.
    pub fn two_sided(check: impl Into<String>, predicted: f64, measured: f64, tol: f64) -> Self {
        CheckRecord {
            check: check.into(),
            predicted,
            measured,
            tol,
            pass: (measured - predicted).abs() <= tol,
            required: true,
        }
    }

    /// `measured <= predicted + tol`.
    pub fn at_most(check: impl Into<String>, predicted: f64, measured: f64, tol: f64) -> Self {
        CheckRecord {
            check: check.into(),
            predicted,
            measured,
            tol,
            pass: measured <= predicted + tol,
            required: true,
        }
    }

    pub fn informational(mut self) -> Self {
        self.required = false;
        self
    }
}

/// Time interval in which torus runs mimic whole-space algebraic decay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityWindow {
    pub t_min: f64,
    pub t_max: f64,
}

impl ValidityWindow {
    pub fn as_array(&self) -> [f64; 2] {
        [self.t_min, self.t_max]
    }

    pub fn is_empty(&self) -> bool {
        !(self.t_min < self.t_max)
    }

    /// The last decade `[max(t_min, t_max/10), t_max]`.
    pub fn last_decade(&self) -> [f64; 2] {
        [self.t_min.max(self.t_max / 10.0), self.t_max]
    }
}

/// `t_max = 0.1 · L²/(4π²γ)`; `t_min` is the latest of the first local maximum
/// of `‖Dz‖`, the micro-rotation relaxation time `ln 10 / (4χ)` and `t_max / 100`.
/// Both ends are clipped to the recorded range.
pub fn validity_window(series: &NormSeries, grid: &Grid, params: &FluidParams) -> Result<ValidityWindow> {
    let times = series.times();
    if times.is_empty() {
        return Err(Error::Series("empty series".into()));
    }
    let t_max = (0.1 * grid.infrared_time(params.gamma())).min(*times.last().expect("nonempty"));
    let dz = series.get(&label("z", 1))?;
    let mut peak = times[0];
    for i in 1..dz.len() {
        if dz[i] < dz[i - 1] {
            peak = times[i - 1];
            break;
        }
        peak = times[i];
    }
    let relax = 10f64.ln() / (4.0 * params.chi);
    let t_min = peak.max(relax).max(t_max / 100.0).max(times[0]);
    Ok(ValidityWindow { t_min, t_max })
}

/// Options of [`sync_report`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyncOptions {
    pub slope_tol: f64,
    /// Adds the two-sided band check on `‖Dᵐu‖ t^{α+m/2}`.
    pub sandwich: bool,
    /// Largest accepted max/min ratio of the band.
    pub sandwich_band: f64,
    /// Required upper bound on the `ε` over `w` (and `∇·w` over `∇∧w`) slope gap.
    pub gap_bound: f64,
}

impl Default for SyncOptions {
    fn default() -> Self {
        SyncOptions {
            slope_tol: SLOPE_TOL_NONLINEAR,
            sandwich: false,
            sandwich_band: 5.0,
            gap_bound: -0.8,
        }
    }
}

/// Predicted decay exponents (as log-log slopes) for the given dimension and viscosities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Predictions {
    pub alpha: f64,
    pub dim: usize,
    pub equal_viscosities: bool,
}

impl Predictions {
    pub fn u(&self, m: u32) -> f64 {
        -self.alpha - m as f64 / 2.0
    }

    pub fn w(&self, m: u32) -> f64 {
        -self.alpha - (m as f64 + 1.0) / 2.0
    }

    /// Upper bound on the decay slope of `‖Dᵐε‖`.
    pub fn eps(&self, m: u32) -> f64 {
        let m = m as f64;
        if self.equal_viscosities {
            -2.0 * self.alpha - (m + 3.0) / 2.0 - BoundConstants::p_n(self.dim)
        } else {
            -self.alpha - (m + 3.0) / 2.0
        }
    }

    /// Upper bound on the decay slope of `‖∇·w‖` (3D).
    pub fn div_w(&self) -> f64 {
        if self.equal_viscosities {
            -2.0 * self.alpha - 2.0 - 0.25
        } else {
            -self.alpha - 2.0
        }
    }

    pub fn curl_w(&self) -> f64 {
        -self.alpha - 1.0
    }
}

/// Synchronization and decay checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyncReport {
    pub window: ValidityWindow,
    pub records: Vec<CheckRecord>,
    /// `(t, ‖ε‖/‖w‖)` over the window.
    pub ratio: Vec<(f64, f64)>,
}

impl SyncReport {
    pub fn pass(&self) -> bool {
        self.records.iter().filter(|r| r.required).all(|r| r.pass)
    }

    pub fn record(&self, check: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.check == check)
    }
}

/// Compares fitted decay slopes with their predicted values over `window`.
///
/// `u` and `w` slopes are checked two-sided; `ε` and `∇·w` predictions are
/// upper bounds and are checked one-sided (measured ≤ predicted + tol).
pub fn sync_report(
    series: &NormSeries,
    hyp: &DecayHypothesis,
    params: &FluidParams,
    orders: &[u32],
    dim: usize,
    window: ValidityWindow,
    opts: &SyncOptions,
) -> Result<SyncReport> {
    let pred = Predictions {
        alpha: hyp.alpha,
        dim,
        equal_viscosities: params.equal_viscosities(),
    };
    let win = window.as_array();
    let tol = opts.slope_tol;
    let fit = |l: &str| fit_decay_exponent(series, l, win).map(|f| f.slope);
    let mut records = Vec::new();
    for &m in orders {
        let su = fit(&label("u", m))?;
        let sw = fit(&label("w", m))?;
        let se = fit(&label("eps", m))?;
        records.push(CheckRecord::two_sided(format!("slope:u:m={m}"), pred.u(m), su, tol));
        records.push(CheckRecord::two_sided(format!("slope:w:m={m}"), pred.w(m), sw, tol));
        records.push(CheckRecord::at_most(format!("slope:eps:m={m}"), pred.eps(m), se, tol));
        records.push(CheckRecord::two_sided(format!("gap:w-u:m={m}"), -0.5, sw - su, tol));
        records.push(CheckRecord::at_most(
            format!("gap:eps-w:m={m}"),
            opts.gap_bound,
            se - sw,
            0.0,
        ));
    }
    if orders.contains(&0) && orders.contains(&1) {
        let s0 = fit(&label("u", 0))?;
        let s1 = fit(&label("u", 1))?;
        records.push(CheckRecord::two_sided("gap:Du-u", -0.5, s1 - s0, tol));
    }
    if dim == 3 {
        let sd = fit(&label("divw", 0))?;
        let sc = fit(&label("curlw", 0))?;
        records.push(CheckRecord::at_most("slope:divw:m=0", pred.div_w(), sd, tol));
        records.push(CheckRecord::two_sided("slope:curlw:m=0", pred.curl_w(), sc, tol));
        records.push(CheckRecord::at_most("gap:divw-curlw", opts.gap_bound, sd - sc, 0.0));
    }

    let (t, e) = window_samples(series, &label("eps", 0), win)?;
    let (_, w) = window_samples(series, &label("w", 0), win)?;
    let ratio: Vec<(f64, f64)> = t
        .iter()
        .zip(e.iter().zip(&w))
        .map(|(&t, (&e, &w))| (t, if w > 0.0 { e / w } else { 0.0 }))
        .collect();
    records.push(ratio_trend(&ratio, window.last_decade())?);

    if opts.sandwich {
        for &m in orders {
            let (t, v) = window_samples(series, &label("u", m), win)?;
            let scaled: Vec<f64> = t
                .iter()
                .zip(&v)
                .map(|(t, v)| v * t.powf(hyp.alpha + m as f64 / 2.0))
                .collect();
            let band = band_ratio(&scaled)?;
            records.push(CheckRecord::at_most(
                format!("sandwich:u:m={m}"),
                opts.sandwich_band,
                band,
                0.0,
            ));
        }
    }
    Ok(SyncReport {
        window,
        records,
        ratio,
    })
}

/// `max/min` of a positive sequence.
pub fn band_ratio(values: &[f64]) -> Result<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.is_empty() || !(lo > 0.0) {
        return Err(Error::domain("band needs a nonempty positive sequence"));
    }
    Ok(hi / lo)
}

/// The ratio trend check: over `decade`, the log-log slope of the ratio is
/// negative and its last value is below its first.
pub fn ratio_trend(ratio: &[(f64, f64)], decade: [f64; 2]) -> Result<CheckRecord> {
    let (t, r): (Vec<f64>, Vec<f64>) = ratio
        .iter()
        .filter(|(t, _)| *t >= decade[0] && *t <= decade[1])
        .copied()
        .unzip();
    let f = fit_power_law(&t, &r)?;
    let falling = r.last() < r.first();
    let mut rec = CheckRecord::at_most("ratio:eps/w", 0.0, f.slope, 0.0);
    rec.pass = f.slope < 0.0 && falling;
    Ok(rec)
}
