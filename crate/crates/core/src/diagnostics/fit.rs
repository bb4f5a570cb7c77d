use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::NormSeries;

/// Threshold on the log-log second difference above which a series is not a power law.
pub const CURVATURE_THRESHOLD: f64 = 0.05;

/// Minimum number of samples accepted by [`fit_decay_exponent`].
pub const MIN_FIT_SAMPLES: usize = 10;

/// Log-log least-squares fit `log v ≈ intercept + slope · log t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub samples: usize,
    /// Second difference of the best quadratic in `log t` across the window,
    /// taken with step equal to half the window width in `log t`.
    pub curvature: f64,
    /// `|curvature| <= CURVATURE_THRESHOLD`.
    pub power_law: bool,
}

/// Fits a power law to `(t, v)` samples.
pub fn fit_power_law(t: &[f64], v: &[f64]) -> Result<DecayFit> {
    if t.len() != v.len() {
        return Err(Error::structural("time and value arrays differ in length"));
    }
    if t.len() < MIN_FIT_SAMPLES {
        return Err(Error::Series(format!(
            "fit needs at least {MIN_FIT_SAMPLES} samples, got {}",
            t.len()
        )));
    }
    if let Some((ti, vi)) = t.iter().zip(v).find(|(ti, vi)| !(**ti > 0.0 && **vi > 0.0)) {
        return Err(Error::domain(format!(
            "log-log fit needs positive times and values, got v({ti}) = {vi}"
        )));
    }
    let x: Vec<f64> = t.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = v.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("fit window has a single distinct time"));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x
        .iter()
        .zip(&y)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = (ssr / (n - 2.0) / sxx).sqrt();
    let curvature = quadratic_curvature(&x, &y, mx);
    Ok(DecayFit {
        slope,
        stderr,
        intercept,
        samples: x.len(),
        curvature,
        power_law: curvature.abs() <= CURVATURE_THRESHOLD,
    })
}

fn quadratic_curvature(x: &[f64], y: &[f64], mx: f64) -> f64 {
    // least squares y ≈ a + b s + c s², s = x - mx
    let mut m = [[0.0; 3]; 3];
    let mut r = [0.0; 3];
    for (&xi, &yi) in x.iter().zip(y) {
        let s = xi - mx;
        let basis = [1.0, s, s * s];
        for a in 0..3 {
            r[a] += basis[a] * yi;
            for b in 0..3 {
                m[a][b] += basis[a] * basis[b];
            }
        }
    }
    let mat = nalgebra::Matrix3::from_fn(|a, b| m[a][b]);
    let rhs = nalgebra::Vector3::from_row_slice(&r);
    let Some(sol) = mat.lu().solve(&rhs) else {
        return 0.0;
    };
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let h = 0.5 * (hi - lo);
    2.0 * sol[2] * h * h
}

/// Log-log slope of `label` over the recorded times in `[t_a, t_b]`.
pub fn fit_decay_exponent(series: &NormSeries, label: &str, window: [f64; 2]) -> Result<DecayFit> {
    let (t, v) = window_samples(series, label, window)?;
    fit_power_law(&t, &v)
}

pub(crate) fn window_samples(
    series: &NormSeries,
    label: &str,
    window: [f64; 2],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let values = series.get(label)?;
    let [a, b] = window;
    if !(a < b) {
        return Err(Error::Series(format!("empty fit window [{a}, {b}]")));
    }
    let pairs: (Vec<f64>, Vec<f64>) = series
        .times()
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= a && **t <= b)
        .map(|(t, v)| (*t, *v))
        .unzip();
    Ok(pairs)
}
