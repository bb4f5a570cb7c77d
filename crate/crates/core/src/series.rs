use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Time series of named nonnegative diagnostics sampled at strictly increasing times.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NormSeries {
    times: Vec<f64>,
    columns: BTreeMap<String, Vec<f64>>,
}

impl NormSeries {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a series from explicit columns.
    pub fn from_columns(times: Vec<f64>, columns: BTreeMap<String, Vec<f64>>) -> Result<Self> {
        let mut s = NormSeries::new();
        for (i, &t) in times.iter().enumerate() {
            let row: Vec<(&str, f64)> = columns
                .iter()
                .map(|(k, v)| {
                    v.get(i)
                        .map(|&x| (k.as_str(), x))
                        .ok_or_else(|| Error::Series(format!("column `{k}` is too short")))
                })
                .collect::<Result<_>>()?;
            s.push(t, &row)?;
        }
        if columns.values().any(|v| v.len() != times.len()) {
            return Err(Error::Series("column lengths differ from the time axis".into()));
        }
        if times.is_empty() {
            s.columns = columns.into_keys().map(|k| (k, Vec::new())).collect();
        }
        Ok(s)
    }

    /// Appends one record. The first record fixes the label set.
    pub fn push(&mut self, t: f64, values: &[(&str, f64)]) -> Result<()> {
        if !t.is_finite() {
            return Err(Error::Series(format!("non-finite time {t}")));
        }
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(Error::Series(format!(
                    "times must increase strictly: {t} after {last}"
                )));
            }
        }
        for &(label, v) in values {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Series(format!(
                    "value of `{label}` at t = {t} must be finite and nonnegative, got {v}"
                )));
            }
        }
        if self.times.is_empty() {
            self.columns.clear();
            for &(label, _) in values {
                if self.columns.insert(label.to_string(), Vec::new()).is_some() {
                    return Err(Error::Series(format!("duplicate label `{label}`")));
                }
            }
        } else if values.len() != self.columns.len()
            || values.iter().any(|(l, _)| !self.columns.contains_key(*l))
        {
            return Err(Error::Series("record labels differ from the first record".into()));
        }
        for &(label, v) in values {
            self.columns.get_mut(label).expect("checked above").push(v);
        }
        self.times.push(t);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Labels in lexicographic order.
    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.columns.keys().map(|s| s.as_str())
    }

    pub fn has(&self, label: &str) -> bool {
        self.columns.contains_key(label)
    }

    pub fn get(&self, label: &str) -> Result<&[f64]> {
        self.columns
            .get(label)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::structural(format!("series has no label `{label}`")))
    }

    /// Value of `label` at the recorded time closest to `t`.
    pub fn value_at(&self, label: &str, t: f64) -> Result<f64> {
        let i = self.index_of(t)?;
        Ok(self.get(label)?[i])
    }

    /// Index of the recorded time nearest to `t`; errors outside the recorded range.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let (first, last) = match (self.times.first(), self.times.last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => return Err(Error::Series("empty series".into())),
        };
        let slack = 1e-9 * (last - first).abs().max(1e-300);
        if t < first - slack || t > last + slack {
            return Err(Error::Series(format!(
                "time {t} outside the recorded range [{first}, {last}]"
            )));
        }
        let i = self.times.partition_point(|&x| x < t);
        let best = if i == 0 {
            0
        } else if i == self.times.len() || (t - self.times[i - 1]) <= (self.times[i] - t) {
            i - 1
        } else {
            i
        };
        Ok(best)
    }

    /// Inserts (or replaces) a column computed after the fact.
    pub fn insert_column(&mut self, label: &str, values: Vec<f64>) -> Result<()> {
        if values.len() != self.times.len() {
            return Err(Error::Series(format!("column `{label}` has the wrong length")));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Series(format!("column `{label}` has invalid values")));
        }
        self.columns.insert(label.to_string(), values);
        Ok(())
    }

    /// CSV text: header `t,<labels…>`, then one row per record, values with
    /// 17 significant digits.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("t");
        for label in self.columns.keys() {
            out.push(',');
            out.push_str(label);
        }
        out.push('\n');
        for (i, t) in self.times.iter().enumerate() {
            out.push_str(&format!("{t:.16e}"));
            for col in self.columns.values() {
                out.push_str(&format!(",{:.16e}", col[i]));
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_csv_string().as_bytes())
            .map_err(|e| Error::io(path, e))
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Series("empty CSV".into()))?;
        let names: Vec<&str> = header.split(',').map(str::trim).collect();
        if names.first() != Some(&"t") {
            return Err(Error::Series("first CSV column must be `t`".into()));
        }
        let labels = &names[1..];
        let mut series = NormSeries::new();
        for (lineno, line) in lines.enumerate() {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != names.len() {
                return Err(Error::Series(format!(
                    "CSV row {} has {} cells, expected {}",
                    lineno + 2,
                    cells.len(),
                    names.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Series(format!("CSV row {}: bad number `{s}`: {e}", lineno + 2)))
            };
            let t = parse(cells[0])?;
            let row: Vec<(&str, f64)> = labels
                .iter()
                .zip(&cells[1..])
                .map(|(l, c)| parse(c).map(|v| (*l, v)))
                .collect::<Result<_>>()?;
            series.push(t, &row)?;
        }
        if series.is_empty() {
            series.columns = labels.iter().map(|l| (l.to_string(), Vec::new())).collect();
        }
        Ok(series)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&text)
    }
}
