use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{CheckName, ExperimentSpec, InitKind};
use crate::diagnostics::{
    energy_check_all_pairs, epsilon_residual, monotone_onset_of, monotonicity_onset, sync_report,
    t_doublestar_bound_3d, validity_window, BoundConstants, CheckRecord, DecayHypothesis, SyncOptions,
    ValidityWindow, ENERGY_TOLERANCE,
};
use crate::dynamics::{label, simulate, simulate_partial, FluidParams, MicropolarState, SimConfig};
use crate::error::{Error, Result};
use crate::initdata::{
    decay_character_exponent, default_cutoff, linear_oracle_evolve, random_solenoidal, rescale_for_smallness,
    taylor_green, SpectrumEnvelope,
};
use crate::series::NormSeries;
use crate::spectral::Grid;

/// Largest per-mode deviation from the linear oracle, relative to the initial mode size.
pub const ORACLE_TOLERANCE: f64 = 1e-10;
/// Largest `ε`-equation residual relative to `‖ε‖_{H¹}`.
pub const EPSILON_RESIDUAL_TOLERANCE: f64 = 1e-4;

/// What a check needs to know about the run besides the series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunContext {
    pub grid: Grid,
    pub params: FluidParams,
    pub seminorm_orders: Vec<u32>,
    pub hypothesis: Option<DecayHypothesis>,
    pub sandwich: bool,
    pub slope_tol: f64,
}

impl RunContext {
    pub fn from_spec(spec: &ExperimentSpec) -> Self {
        RunContext {
            grid: spec.sim.grid,
            params: spec.sim.params,
            seminorm_orders: spec.sim.seminorm_orders.clone(),
            hypothesis: spec.effective_hypothesis(),
            sandwich: spec.sandwich,
            slope_tol: spec.slope_tol,
        }
    }
}

/// Reproducibility stamp written with every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub crate_version: String,
    pub context: RunContext,
    pub seed: u64,
    pub initdata: super::config::InitSpec,
    /// Factor applied by the smallness rescaling, when enabled.
    pub rescale_factor: Option<f64>,
    pub z0_norm: f64,
    pub dt_requested: f64,
    pub dt_effective: f64,
    pub t_end: f64,
    pub steps_taken: usize,
    pub max_cfl: f64,
    pub dealias: bool,
    pub nonlinear: bool,
    pub validity_window: Option<ValidityWindow>,
}

/// Outcome of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub id: String,
    pub pass: bool,
    pub records: Vec<CheckRecord>,
    pub environment: Environment,
    /// Set when the run stopped early or a check could not be evaluated.
    pub error: Option<String>,
}

impl Report {
    /// Conjunction of the required records; false whenever an error occurred.
    pub fn compute_pass(records: &[CheckRecord], error: Option<&str>) -> bool {
        error.is_none() && records.iter().filter(|r| r.required).all(|r| r.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Report> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: e.line(),
            message: e.to_string(),
        })
    }
}

impl ExperimentSpec {
    /// The configured hypothesis, or for decay-character data the one implied by its `α`.
    pub fn effective_hypothesis(&self) -> Option<DecayHypothesis> {
        self.hypothesis.or_else(|| {
            (self.initdata.kind == InitKind::DecayCharacter)
                .then(|| DecayHypothesis::with_alpha(self.initdata.alpha).ok())
                .flatten()
        })
    }
}

/// Builds the initial state; returns the rescaling factor when one was applied.
pub fn initial_state(spec: &ExperimentSpec) -> Result<(MicropolarState, Option<f64>)> {
    let grid = spec.sim.grid;
    let init = &spec.initdata;
    let kc = init.kc.unwrap_or_else(|| default_cutoff(&grid));
    let envelope = |r: f64, amplitude: f64| SpectrumEnvelope {
        exponent_r: r,
        cutoff_kc: kc,
        amplitude,
        seed: init.seed,
    };
    let mut z0 = match init.kind {
        InitKind::TaylorGreen => {
            let mut z = taylor_green(&grid, init.amplitude)?;
            if init.with_w {
                z.w = random_solenoidal(&grid, &envelope(init.r, init.w_amplitude), true)?.w;
            }
            z
        }
        InitKind::DecayCharacter | InitKind::RandomSolenoidal => {
            let r = match init.kind {
                InitKind::DecayCharacter => decay_character_exponent(init.alpha, grid.dim()),
                _ => init.r,
            };
            let mut z = random_solenoidal(&grid, &envelope(r, init.amplitude), init.with_w)?;
            if init.with_w && init.amplitude > 0.0 {
                z.w = z.w.scaled(init.w_amplitude / init.amplitude);
            }
            z
        }
    };
    let mut factor = None;
    if init.rescale {
        let (scaled, lambda) = rescale_for_smallness(&z0, &spec.sim.params)?;
        z0 = scaled;
        factor = Some(lambda);
    }
    Ok((z0, factor))
}

/// Writes a nonempty series as CSV.
pub fn emit_csv(series: &NormSeries, path: &Path) -> Result<()> {
    if series.is_empty() {
        return Err(Error::Series("refusing to write an empty series".into()));
    }
    series.write_csv(path)
}

/// Evaluates a check that only needs the recorded series.
pub fn series_check(check: CheckName, series: &NormSeries, ctx: &RunContext) -> Result<Vec<CheckRecord>> {
    match check {
        CheckName::Energy => energy_records(series, &ctx.params),
        CheckName::Sync => sync_records(series, ctx),
        CheckName::Monotonicity => monotonicity_records(series, ctx),
        CheckName::Bounds => bounds_records(series, ctx),
        CheckName::EpsilonResidual | CheckName::Oracle => Err(Error::invalid(
            "checks",
            format!("`{}` needs the simulated states and only runs inside `run`", check.as_str()),
        )),
    }
}

fn energy_records(series: &NormSeries, params: &FluidParams) -> Result<Vec<CheckRecord>> {
    let (worst, _) = energy_check_all_pairs(series, params)?;
    Ok(vec![CheckRecord::at_most("energy:deficit", 0.0, -worst, ENERGY_TOLERANCE)])
}

fn sync_records(series: &NormSeries, ctx: &RunContext) -> Result<Vec<CheckRecord>> {
    let hyp = ctx
        .hypothesis
        .ok_or_else(|| Error::invalid("hypothesis.alpha", "the sync check needs a decay hypothesis"))?;
    let window = validity_window(series, &ctx.grid, &ctx.params)?;
    let opts = SyncOptions {
        slope_tol: ctx.slope_tol,
        sandwich: ctx.sandwich,
        ..SyncOptions::default()
    };
    let report = sync_report(
        series,
        &hyp,
        &ctx.params,
        &ctx.seminorm_orders,
        ctx.grid.dim(),
        window,
        &opts,
    )?;
    Ok(report.records)
}

fn monotonicity_records(series: &NormSeries, ctx: &RunContext) -> Result<Vec<CheckRecord>> {
    let times = series.times();
    let z = series.get(&label("z", 0))?;
    let dz = series.get(&label("z", 1))?;
    let horizon = *times.last().ok_or_else(|| Error::Series("empty series".into()))?;
    if ctx.grid.dim() == 3 {
        let bound = t_doublestar_bound_3d(&ctx.params, z[0]);
        let onset = monotonicity_onset(series, &label("z", 1))?.unwrap_or(f64::INFINITY);
        let rec = CheckRecord::at_most("monotonicity:onset", bound, onset, 0.0);
        // the bound says nothing about a run that stops before it
        return Ok(vec![if bound <= horizon { rec } else { rec.informational() }]);
    }
    let threshold = BoundConstants::SMALLNESS_COEFF_2D * ctx.params.gamma();
    let Some(i) = z.iter().position(|&v| v <= threshold) else {
        return Ok(vec![
            CheckRecord::at_most("monotonicity:small", threshold, z[z.len() - 1], 0.0).informational(),
        ]);
    };
    let entry = times[i];
    let rec = if times.len() - i >= 3 {
        let onset = monotone_onset_of(&times[i..], &dz[i..])?.unwrap_or(f64::INFINITY);
        CheckRecord::at_most("monotonicity:onset", entry, onset, 0.0)
    } else {
        CheckRecord::at_most("monotonicity:onset", entry, entry, 0.0).informational()
    };
    Ok(vec![rec])
}

fn bounds_records(series: &NormSeries, ctx: &RunContext) -> Result<Vec<CheckRecord>> {
    let z = series.get(&label("z", 0))?[0];
    let dz = series.get(&label("z", 1))?[0];
    let gamma = ctx.params.gamma();
    let h1 = (z * dz).sqrt();
    let mut out = vec![CheckRecord::at_most(
        "bounds:h1_initdata",
        BoundConstants::H1_INITDATA_THRESHOLD * gamma,
        h1,
        0.0,
    )];
    if ctx.grid.dim() == 3 {
        out.push(CheckRecord::at_most("bounds:smallness", gamma, BoundConstants::k_smallness() * h1, 0.0));
        let bound = t_doublestar_bound_3d(&ctx.params, z);
        out.push(CheckRecord::at_most("bounds:t_doublestar", bound, bound, 0.0).informational());
    } else {
        out.push(CheckRecord::at_most(
            "bounds:smallness",
            BoundConstants::SMALLNESS_COEFF_2D * gamma,
            z,
            0.0,
        ));
    }
    Ok(out)
}

fn epsilon_records(snapshots: &[MicropolarState], params: &FluidParams) -> Result<Vec<CheckRecord>> {
    let res = epsilon_residual(snapshots, params)?;
    let worst = res
        .iter()
        .map(|r| if r.eps_h1 > 0.0 { r.residual / r.eps_h1 } else { r.residual })
        .fold(0.0, f64::max);
    Ok(vec![CheckRecord::at_most("epsilon_residual", 0.0, worst, EPSILON_RESIDUAL_TOLERANCE)])
}

/// Largest per-mode deviation of `a` from `b`, relative to the size of the same
/// mode of `z0` (all components of `u` and `w` at one wavevector). Modes below
/// `1e-14` of the largest initial mode are measured against that floor.
pub fn oracle_deviation(a: &MicropolarState, b: &MicropolarState, z0: &MicropolarState) -> f64 {
    let len = z0.grid().len();
    let mode_norm = |s: &MicropolarState, d: Option<&MicropolarState>, flat: usize| -> f64 {
        let mut acc = 0.0;
        for (f, g) in [(&s.u, d.map(|d| &d.u)), (&s.w, d.map(|d| &d.w))] {
            for c in 0..f.components() {
                let x = f.at(c, flat);
                let y = g.map_or(Default::default(), |g| g.at(c, flat));
                acc += (x - y).norm_sqr();
            }
        }
        acc.sqrt()
    };
    let sizes: Vec<f64> = (0..len).map(|f| mode_norm(z0, None, f)).collect();
    let floor = (1e-14 * sizes.iter().copied().fold(0.0, f64::max)).max(f64::MIN_POSITIVE);
    (0..len)
        .map(|f| mode_norm(a, Some(b), f) / sizes[f].max(floor))
        .fold(0.0, f64::max)
}

fn oracle_records(sim: &SimConfig, z0: &MicropolarState) -> Result<Vec<CheckRecord>> {
    let mut linear = sim.clone();
    linear.nonlinear = false;
    linear.dealias = false;
    linear.snapshot_stride = None;
    linear.record_stride = linear.step_count().max(1);
    let out = simulate(&linear, z0)?;
    let reference = linear_oracle_evolve(z0, &sim.params, out.final_state.time - z0.time)?;
    let dev = oracle_deviation(&out.final_state, &reference, z0);
    Ok(vec![CheckRecord::at_most("oracle", 0.0, dev, ORACLE_TOLERANCE)])
}

/// Generates the initial data, simulates, writes `series.csv` and `report.json`
/// into `out_dir` (default: `spec.out_dir`) and evaluates the requested checks.
///
/// A blow-up or a failing check is recorded in the report; `Err` is returned only
/// when the initial data cannot be built or the outputs cannot be written.
pub fn run_experiment(spec: &ExperimentSpec, out_dir: Option<&Path>) -> Result<Report> {
    let dir: PathBuf = out_dir.map(Path::to_path_buf).unwrap_or_else(|| spec.out_dir.clone());
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let (z0, rescale_factor) = initial_state(spec)?;
    let mut sim = spec.sim.clone();
    if spec.checks.contains(&CheckName::EpsilonResidual) && sim.snapshot_stride.is_none() {
        sim.snapshot_stride = Some(sim.record_stride);
    }
    let (out, run_error) = simulate_partial(&sim, &z0);
    if !out.series.is_empty() {
        emit_csv(&out.series, &dir.join("series.csv"))?;
    }
    let ctx = RunContext::from_spec(spec);
    let window = validity_window(&out.series, &ctx.grid, &ctx.params).ok();
    let mut records = Vec::new();
    let mut error = run_error.map(|e| e.to_string());
    if error.is_none() {
        for &check in &spec.checks {
            let result = match check {
                CheckName::EpsilonResidual => epsilon_records(&out.snapshots, &sim.params),
                CheckName::Oracle => oracle_records(&sim, &z0),
                other => series_check(other, &out.series, &ctx),
            };
            match result {
                Ok(r) => records.extend(r),
                Err(e) => {
                    error = Some(format!("check `{}`: {e}", check.as_str()));
                    break;
                }
            }
        }
    }
    let report = Report {
        id: spec.id.clone(),
        pass: Report::compute_pass(&records, error.as_deref()),
        records,
        environment: Environment {
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
            context: ctx,
            seed: spec.seed,
            initdata: spec.initdata.clone(),
            rescale_factor,
            z0_norm: z0.norm(),
            dt_requested: sim.dt,
            dt_effective: sim.effective_dt(),
            t_end: sim.t_end,
            steps_taken: out.steps_taken,
            max_cfl: out.max_cfl,
            dealias: sim.dealias,
            nonlinear: sim.nonlinear,
            validity_window: window,
        },
        error,
    };
    report.write(&dir.join("report.json"))?;
    Ok(report)
}
