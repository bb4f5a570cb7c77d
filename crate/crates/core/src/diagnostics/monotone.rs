use crate::error::{Error, Result};
use crate::series::NormSeries;

/// Relative tolerance for "nonincreasing".
pub const MONOTONE_TOLERANCE: f64 = 1e-10;

/// Earliest recorded time after which `values` never increase (relative
/// tolerance [`MONOTONE_TOLERANCE`]); `None` if an increase occurs at the last step.
pub fn monotone_onset_of(times: &[f64], values: &[f64]) -> Result<Option<f64>> {
    if times.len() != values.len() {
        return Err(Error::structural("time and value arrays differ in length"));
    }
    if times.len() < 3 {
        return Err(Error::structural("monotonicity onset needs at least 3 samples"));
    }
    let last_rise = values
        .windows(2)
        .rposition(|w| w[1] > w[0] + MONOTONE_TOLERANCE * w[0].abs());
    Ok(match last_rise {
        None => Some(times[0]),
        Some(j) if j + 1 == values.len() - 1 => None,
        Some(j) => Some(times[j + 1]),
    })
}

/// Monotonicity onset of a labelled series.
pub fn monotonicity_onset(series: &NormSeries, label: &str) -> Result<Option<f64>> {
    monotone_onset_of(series.times(), series.get(label)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decreasing_starts_at_first_time() {
        let t = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(monotone_onset_of(&t, &[4.0, 3.0, 2.0, 1.0]).unwrap(), Some(0.0));
    }

    #[test]
    fn peak_then_decay() {
        let t = [0.0, 1.0, 2.0, 3.0, 4.0];
        let v = [1.0, 2.0, 3.0, 2.5, 2.0];
        assert_eq!(monotone_onset_of(&t, &v).unwrap(), Some(2.0));
    }

    #[test]
    fn oscillation_has_no_onset() {
        let t: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let v: Vec<f64> = t.iter().map(|t| 2.0 + (1.3 * t).sin()).collect();
        let v = if v[19] > v[18] { v } else { t.iter().map(|t| 2.0 - (1.3 * t).sin()).collect() };
        assert_eq!(monotone_onset_of(&t, &v).unwrap(), None);
    }
}
