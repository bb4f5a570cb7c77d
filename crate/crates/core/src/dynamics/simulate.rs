use serde::{Deserialize, Serialize};

use super::params::FluidParams;
use super::state::MicropolarState;
use super::stepper::{StepFlags, Stepper};
use crate::diagnostics::epsilon_field;
use crate::error::{Error, Result};
use crate::series::NormSeries;
use crate::spectral::Grid;

/// Run configuration for [`simulate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub grid: Grid,
    pub params: FluidParams,
    /// Requested step; the run uses `t_end / ceil(t_end / dt)` so that it ends exactly at `t_end`.
    pub dt: f64,
    pub t_end: f64,
    pub record_stride: usize,
    pub seminorm_orders: Vec<u32>,
    pub dealias: bool,
    pub nonlinear: bool,
    /// Abort once `‖z‖` exceeds this multiple of `‖z₀‖`.
    pub blowup_factor: f64,
    /// Keep a copy of the state every this many steps.
    pub snapshot_stride: Option<usize>,
}

impl SimConfig {
    pub fn new(grid: Grid, params: FluidParams, dt: f64, t_end: f64) -> Self {
        SimConfig {
            grid,
            params,
            dt,
            t_end,
            record_stride: 1,
            seminorm_orders: vec![0, 1, 2],
            dealias: true,
            nonlinear: true,
            blowup_factor: 1e6,
            snapshot_stride: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::invalid(
                "t_end",
                format!("must be nonnegative, got {}", self.t_end),
            ));
        }
        if self.record_stride == 0 {
            return Err(Error::invalid("record_stride", "must be at least 1"));
        }
        if self.snapshot_stride == Some(0) {
            return Err(Error::invalid("snapshot_stride", "must be at least 1"));
        }
        let max = self.grid.max_seminorm_order();
        if let Some(&m) = self.seminorm_orders.iter().find(|&&m| m > max) {
            return Err(Error::invalid(
                "seminorm_orders",
                format!("order {m} exceeds the resolvable maximum {max}"),
            ));
        }
        if !(self.blowup_factor > 1.0) {
            return Err(Error::invalid("blowup_factor", "must exceed 1"));
        }
        Ok(())
    }

    pub fn flags(&self) -> StepFlags {
        StepFlags {
            nonlinear: self.nonlinear,
            dealias: self.dealias,
        }
    }

    pub fn step_count(&self) -> usize {
        if self.t_end == 0.0 {
            0
        } else {
            (self.t_end / self.dt - 1e-9).ceil().max(1.0) as usize
        }
    }

    pub fn effective_dt(&self) -> f64 {
        match self.step_count() {
            0 => self.dt,
            n => self.t_end / n as f64,
        }
    }
}

/// Everything produced by a run.
#[derive(Debug, Clone)]
pub struct SimOutput {
    pub series: NormSeries,
    pub snapshots: Vec<MicropolarState>,
    pub final_state: MicropolarState,
    pub steps_taken: usize,
    pub max_cfl: f64,
}

/// Series label of the order-`m` seminorm of a field (`u`, `w`, `eps`, `z`, …).
pub fn label(field: &str, m: u32) -> String {
    format!("{field}:m={m}")
}

/// Records every diagnostic of one state.
fn record(
    series: &mut NormSeries,
    state: &MicropolarState,
    params: &FluidParams,
    orders: &[u32],
    energy_lhs: f64,
) -> Result<()> {
    let eps = epsilon_field(state)?;
    let mut row: Vec<(String, f64)> = Vec::new();
    for &m in orders {
        row.push((label("u", m), state.u.seminorm_unchecked(m)));
        row.push((label("w", m), state.w.seminorm_unchecked(m)));
        row.push((label("eps", m), eps.seminorm_unchecked(m)));
    }
    let (u0, w0) = (state.u.energy(), state.w.energy());
    let du = state.u.seminorm_unchecked(1).powi(2);
    let dw = state.w.seminorm_unchecked(1).powi(2);
    let eps2 = eps.energy();
    row.push((label("z", 0), (u0 + w0).sqrt()));
    row.push((label("z", 1), (du + dw).sqrt()));
    row.push((label("curlw", 0), state.w.curl()?.l2_norm()));
    row.push((label("divu", 0), state.u.divergence()?.l2_norm()));
    let mut sync = 4.0 * params.chi * eps2;
    if state.dim() == 3 {
        let divw = state.w.divergence()?.energy();
        row.push((label("divw", 0), divw.sqrt()));
        sync += params.kappa * divw;
    }
    row.push(("energy".into(), u0 + w0));
    row.push(("dissip_u".into(), du));
    row.push(("dissip_w".into(), dw));
    row.push(("dissip_sync".into(), sync));
    row.push(("energy_lhs".into(), energy_lhs));
    let refs: Vec<(&str, f64)> = row.iter().map(|(l, v)| (l.as_str(), *v)).collect();
    series.push(state.time, &refs)
}

fn dissipation(state: &MicropolarState, p: &FluidParams) -> f64 {
    p.mu * state.u.seminorm_unchecked(1).powi(2) + p.nu * state.w.seminorm_unchecked(1).powi(2)
}

/// Runs to `t_end`, returning the error (if any) together with everything recorded before it.
pub fn simulate_partial(config: &SimConfig, z0: &MicropolarState) -> (SimOutput, Option<Error>) {
    let mut out = SimOutput {
        series: NormSeries::new(),
        snapshots: Vec::new(),
        final_state: z0.clone(),
        steps_taken: 0,
        max_cfl: 0.0,
    };
    if let Err(e) = config.validate() {
        return (out, Some(e));
    }
    if z0.grid() != &config.grid {
        return (out, Some(Error::structural("initial state grid differs from the configured grid")));
    }
    let steps = config.step_count();
    let dt = config.effective_dt();
    let mut stepper = match Stepper::new(config.grid, config.params, dt, config.flags()) {
        Ok(s) => s,
        Err(e) => return (out, Some(e)),
    };
    let p = config.params;
    let t0 = z0.time;
    let mut state = z0.clone();
    let ceiling = config.blowup_factor * z0.norm();
    let mut integral = 0.0;
    let mut prev_diss = dissipation(&state, &p);
    if let Err(e) = record(&mut out.series, &state, &p, &config.seminorm_orders, state.u.energy() + state.w.energy()) {
        return (out, Some(e));
    }
    if config.snapshot_stride.is_some() {
        out.snapshots.push(state.clone());
    }
    for i in 1..=steps {
        if let Err(e) = stepper.step(&mut state) {
            out.final_state = state;
            out.max_cfl = stepper.max_cfl();
            return (out, Some(e));
        }
        state.time = t0 + i as f64 * dt;
        out.steps_taken = i;
        let norm = state.norm();
        if ceiling > 0.0 && norm > ceiling {
            let err = Error::BlowUp {
                time: state.time,
                reason: format!("‖z‖ = {norm:e} exceeds {:e}", ceiling),
            };
            out.final_state = state;
            out.max_cfl = stepper.max_cfl();
            return (out, Some(err));
        }
        let diss = dissipation(&state, &p);
        integral += 0.5 * dt * (prev_diss + diss);
        prev_diss = diss;
        if i % config.record_stride == 0 || i == steps {
            let lhs = norm * norm + 2.0 * integral;
            if let Err(e) = record(&mut out.series, &state, &p, &config.seminorm_orders, lhs) {
                out.final_state = state;
                return (out, Some(e));
            }
        }
        if let Some(s) = config.snapshot_stride {
            if i % s == 0 {
                out.snapshots.push(state.clone());
            }
        }
    }
    out.max_cfl = stepper.max_cfl();
    out.final_state = state;
    (out, None)
}

/// Runs to `t_end` and records the norm series.
pub fn simulate(config: &SimConfig, z0: &MicropolarState) -> Result<SimOutput> {
    match simulate_partial(config, z0) {
        (out, None) => Ok(out),
        (_, Some(e)) => Err(e),
    }
}
