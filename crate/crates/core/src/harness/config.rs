use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{DecayHypothesis, SLOPE_TOL_LINEAR, SLOPE_TOL_NONLINEAR};
use crate::dynamics::{FluidParams, SimConfig};
use crate::error::{Error, Result};
use crate::spectral::Grid;

/// Diagnostics that an experiment can request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Energy,
    Sync,
    Monotonicity,
    EpsilonResidual,
    Oracle,
    Bounds,
}

impl CheckName {
    pub const ALL: [CheckName; 6] = [
        CheckName::Energy,
        CheckName::Sync,
        CheckName::Monotonicity,
        CheckName::EpsilonResidual,
        CheckName::Oracle,
        CheckName::Bounds,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckName::Energy => "energy",
            CheckName::Sync => "sync",
            CheckName::Monotonicity => "monotonicity",
            CheckName::EpsilonResidual => "epsilon_residual",
            CheckName::Oracle => "oracle",
            CheckName::Bounds => "bounds",
        }
    }
}

impl FromStr for CheckName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = CheckName::ALL.iter().map(|c| c.as_str()).collect();
                Error::invalid("checks", format!("unknown check `{s}` (known: {})", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    DecayCharacter,
    TaylorGreen,
    RandomSolenoidal,
}

impl FromStr for InitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "decay_character" => Ok(InitKind::DecayCharacter),
            "taylor_green" => Ok(InitKind::TaylorGreen),
            "random_solenoidal" => Ok(InitKind::RandomSolenoidal),
            _ => Err(Error::invalid(
                "initdata.kind",
                format!("expected decay_character, taylor_green or random_solenoidal, got `{s}`"),
            )),
        }
    }
}

/// Initial-data generator selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitSpec {
    pub kind: InitKind,
    pub alpha: f64,
    pub amplitude: f64,
    pub seed: u64,
    /// Spectral cutoff; `None` selects the generator default.
    pub kc: Option<f64>,
    pub with_w: bool,
    /// `‖w₀‖` when `with_w` is set.
    pub w_amplitude: f64,
    /// Low-wavenumber exponent of `random_solenoidal` data.
    pub r: f64,
    /// Rescale the initial data below the H¹ smallness threshold.
    pub rescale: bool,
}

/// A fully validated experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub id: String,
    pub sim: SimConfig,
    pub initdata: InitSpec,
    pub seed: u64,
    pub hypothesis: Option<DecayHypothesis>,
    /// Include the two-sided band check (set when `hypothesis.c0` is given).
    pub sandwich: bool,
    pub slope_tol: f64,
    pub checks: Vec<CheckName>,
    pub out_dir: PathBuf,
}

/// Every key accepted in a configuration file.
pub const KNOWN_KEYS: &[&str] = &[
    "id",
    "dim",
    "n",
    "box_length",
    "mu",
    "nu",
    "chi",
    "kappa",
    "dt",
    "t_end",
    "record_stride",
    "snapshot_stride",
    "seminorm_orders",
    "dealias",
    "nonlinear",
    "blowup_factor",
    "seed",
    "out_dir",
    "checks",
    "slope_tol",
    "initdata.kind",
    "initdata.alpha",
    "initdata.amplitude",
    "initdata.seed",
    "initdata.kc",
    "initdata.with_w",
    "initdata.r",
    "initdata.w_amplitude",
    "initdata.rescale",
    "hypothesis.alpha",
    "hypothesis.eta",
    "hypothesis.C0",
    "hypothesis.c0",
    "hypothesis.T0",
    "hypothesis.t0",
];

/// Parses `key = value` lines (`#` starts a comment) into a map, rejecting
/// unknown and repeated keys.
pub fn parse_key_values(text: &str, path: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: path.to_string(),
            line: i + 1,
            message,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(err("missing key before `=`".into()));
        }
        if !KNOWN_KEYS.contains(&key) {
            return Err(err(format!("unknown key `{key}`")));
        }
        if map.insert(key.to_string(), value.to_string()).is_some() {
            return Err(err(format!("key `{key}` given twice")));
        }
    }
    Ok(map)
}

struct Values(BTreeMap<String, String>);

impl Values {
    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(|s| s.as_str())
    }

    fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::invalid(key, format!("cannot parse `{v}`"))),
        }
    }

    fn opt<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::invalid(key, format!("cannot parse `{v}`")))
            })
            .transpose()
    }

    fn flag(&self, key: &str, default: bool) -> Result<bool> {
        match self.raw(key) {
            None => Ok(default),
            Some("true" | "yes" | "on" | "1") => Ok(true),
            Some("false" | "no" | "off" | "0") => Ok(false),
            Some(v) => Err(Error::invalid(key, format!("expected true or false, got `{v}`"))),
        }
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse()
                            .map_err(|_| Error::invalid(key, format!("cannot parse list item `{s}`")))
                    })
                    .collect()
            })
            .transpose()
    }
}

/// Builds and validates an experiment from configuration text.
pub fn parse_config(text: &str, path: &str) -> Result<ExperimentSpec> {
    let v = Values(parse_key_values(text, path)?);
    let dim: usize = v
        .opt("dim")?
        .ok_or_else(|| Error::invalid("dim", "is required"))?;
    if dim != 2 && dim != 3 {
        return Err(Error::invalid("dim", format!("must be 2 or 3, got {dim}")));
    }
    let n: usize = v.get("n", if dim == 2 { 64 } else { 32 })?;
    let box_length: f64 = v.get("box_length", 2.0 * std::f64::consts::PI)?;
    if !(box_length.is_finite() && box_length > 0.0) {
        return Err(Error::invalid("box_length", "must be positive"));
    }
    let grid = Grid::new(dim, n, box_length).map_err(|e| Error::invalid("n", e.to_string()))?;
    let params = FluidParams::new(
        v.get("mu", 1.0)?,
        v.get("nu", 1.0)?,
        v.get("chi", 0.5)?,
        v.get("kappa", 0.0)?,
    )?;
    let mut sim = SimConfig::new(grid, params, v.get("dt", 0.01)?, v.get("t_end", 1.0)?);
    sim.record_stride = v.get("record_stride", 1)?;
    sim.snapshot_stride = v.opt("snapshot_stride")?;
    if let Some(orders) = v.list("seminorm_orders")? {
        sim.seminorm_orders = orders;
    }
    sim.dealias = v.flag("dealias", true)?;
    sim.nonlinear = v.flag("nonlinear", true)?;
    sim.blowup_factor = v.get("blowup_factor", 1e6)?;
    sim.validate()?;

    let seed: u64 = v.get("seed", 0)?;
    let kind: InitKind = v.get(
        "initdata.kind",
        if dim == 2 { InitKind::TaylorGreen } else { InitKind::RandomSolenoidal },
    )?;
    let amplitude: f64 = v.get("initdata.amplitude", 1.0)?;
    let initdata = InitSpec {
        kind,
        alpha: v.get("initdata.alpha", 0.25)?,
        amplitude,
        seed: v.get("initdata.seed", seed)?,
        kc: v.opt("initdata.kc")?,
        with_w: v.flag("initdata.with_w", false)?,
        w_amplitude: v.get("initdata.w_amplitude", amplitude)?,
        r: v.get("initdata.r", 0.0)?,
        rescale: v.flag("initdata.rescale", false)?,
    };
    if kind == InitKind::DecayCharacter && !(initdata.alpha > 0.0 && initdata.alpha < 0.5) {
        return Err(Error::invalid("initdata.alpha", "must lie in (0, 1/2)"));
    }
    if kind == InitKind::TaylorGreen && dim != 2 {
        return Err(Error::invalid("initdata.kind", "taylor_green is only available in 2D"));
    }
    if !(initdata.amplitude.is_finite() && initdata.amplitude >= 0.0) {
        return Err(Error::invalid("initdata.amplitude", "must be nonnegative"));
    }
    if !(initdata.w_amplitude.is_finite() && initdata.w_amplitude >= 0.0) {
        return Err(Error::invalid("initdata.w_amplitude", "must be nonnegative"));
    }

    let hyp_keys = ["hypothesis.alpha", "hypothesis.eta", "hypothesis.C0", "hypothesis.c0", "hypothesis.T0", "hypothesis.t0"];
    let hypothesis = if hyp_keys.iter().any(|k| v.raw(k).is_some()) {
        let alpha = v.get("hypothesis.alpha", initdata.alpha)?;
        let c_upper = v.get("hypothesis.C0", 1.0)?;
        Some(DecayHypothesis::new(
            alpha,
            v.get("hypothesis.eta", alpha)?,
            c_upper,
            v.get("hypothesis.c0", c_upper)?,
            v.get("hypothesis.T0", 0.0)?,
            v.get("hypothesis.t0", 0.0)?,
        )?)
    } else {
        None
    };
    let checks: Vec<CheckName> = v.list("checks")?.unwrap_or_default();
    let default_tol = if sim.nonlinear { SLOPE_TOL_NONLINEAR } else { SLOPE_TOL_LINEAR };
    let slope_tol: f64 = v.get("slope_tol", default_tol)?;
    if !(slope_tol > 0.0) {
        return Err(Error::invalid("slope_tol", "must be positive"));
    }
    let id = v.raw("id").map(str::to_string).unwrap_or_else(|| {
        Path::new(path)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "experiment".into())
    });
    Ok(ExperimentSpec {
        id,
        sim,
        initdata,
        seed,
        hypothesis,
        sandwich: v.raw("hypothesis.c0").is_some(),
        slope_tol,
        checks,
        out_dir: PathBuf::from(v.raw("out_dir").unwrap_or("out")),
    })
}

/// Reads and validates a configuration file.
pub fn load_config(path: &Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, &path.display().to_string())
}

/// Parses a hypothesis given as `alpha=… C0=… c0=…` tokens (`α` is accepted for `alpha`).
pub fn parse_hypothesis(tokens: &[String]) -> Result<DecayHypothesis> {
    let mut map: BTreeMap<String, f64> = BTreeMap::new();
    for tok in tokens.iter().flat_map(|t| t.split_whitespace()) {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::invalid("hypothesis", format!("expected key=value, got `{tok}`")))?;
        let key = match k {
            "α" | "alpha" => "alpha",
            "η" | "eta" => "eta",
            "C0" | "c0" | "T0" | "t0" => k,
            _ => return Err(Error::invalid("hypothesis", format!("unknown field `{k}`"))),
        };
        let value = v
            .parse()
            .map_err(|_| Error::invalid("hypothesis", format!("cannot parse `{v}`")))?;
        map.insert(key.to_string(), value);
    }
    let alpha = *map
        .get("alpha")
        .ok_or_else(|| Error::invalid("hypothesis", "alpha is required"))?;
    let c_upper = map.get("C0").copied().unwrap_or(1.0);
    DecayHypothesis::new(
        alpha,
        map.get("eta").copied().unwrap_or(alpha),
        c_upper,
        map.get("c0").copied().unwrap_or(c_upper),
        map.get("T0").copied().unwrap_or(0.0),
        map.get("t0").copied().unwrap_or(0.0),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let s = parse_config("dim = 2\n", "min.cfg").unwrap();
        assert_eq!(s.id, "min");
        assert_eq!(s.sim.grid.points_per_axis(), 64);
        assert_eq!(s.sim.params.mu, 1.0);
        assert!(s.sim.nonlinear && s.sim.dealias);
        assert_eq!(s.initdata.kind, InitKind::TaylorGreen);
        assert!(s.checks.is_empty());
        assert!(s.hypothesis.is_none());
        assert_eq!(s.slope_tol, SLOPE_TOL_NONLINEAR);
    }

    #[test]
    fn zero_chi_is_rejected_by_name() {
        let e = parse_config("dim = 2\nchi = 0\n", "x.cfg").unwrap_err();
        assert!(matches!(&e, Error::Invalid { key, .. } if key == "chi"), "{e}");
    }

    #[test]
    fn unknown_key_is_named_with_line() {
        let e = parse_config("dim = 2\n# comment\nnu_bar = 1\n", "x.cfg").unwrap_err();
        match e {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("nu_bar"));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn hypothesis_tokens() {
        let h = parse_hypothesis(&["α=0.25 C0=2".into(), "c0=0.5".into()]).unwrap();
        assert_eq!((h.alpha, h.c_upper, h.c_lower), (0.25, 2.0, 0.5));
        assert!(parse_hypothesis(&["beta=1".into()]).is_err());
    }
}
