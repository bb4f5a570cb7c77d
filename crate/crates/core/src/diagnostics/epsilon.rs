use crate::dynamics::{FluidParams, MicropolarState};
use crate::error::{Error, Result};
use crate::spectral::{FftEngine, SpectralField};

/// Synchronization error `ε = w - ½∇∧u`.
pub fn epsilon_field(state: &MicropolarState) -> Result<SpectralField> {
    state.w.add_scaled(&state.u.curl()?, -0.5)
}

/// Residual of the synchronization-error equation at one recorded time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonResidual {
    pub time: f64,
    /// `‖ε_t + (u·∇)ε + 4χε - Lε - (ν-μ)Δw - ½Σ_j (∇u_j)∧(D_j u)‖`.
    pub residual: f64,
    /// `(‖ε‖² + ‖Dε‖²)^{1/2}` at the same time, for scaling.
    pub eps_h1: f64,
}

/// `Lv = μΔv + κ∇(∇·v) - χ∇∧∇∧v`; in 2D this is `(μ+χ)Δv` on scalars.
pub fn elliptic_operator(v: &SpectralField, p: &FluidParams) -> Result<SpectralField> {
    let dim = v.grid().dim();
    let lap = v.laplacian();
    if dim == 2 {
        return Ok(lap.scaled(p.mu + p.chi));
    }
    let mut out = lap.scaled(p.mu);
    out = out.add_scaled(&v.divergence()?.gradient()?, p.kappa)?;
    out.add_scaled(&v.curl()?.curl()?, -p.chi)
}

/// Dealiased `(u·∇)ε` and `½Σ_j (∇u_j)∧(D_j u)` evaluated pseudo-spectrally.
pub fn epsilon_transport_terms(
    state: &MicropolarState,
    eps: &SpectralField,
) -> Result<(SpectralField, SpectralField)> {
    let grid = *state.grid();
    let dim = grid.dim();
    let len = grid.len();
    let mut engine = FftEngine::new(grid);
    let u = state.u.dealias();
    let eps = eps.dealias();
    let pu = u.to_physical_with(&mut engine);
    let mut adv = vec![vec![0.0; len]; eps.components()];
    for a in 0..dim {
        let deps = eps.derivative(a)?.to_physical_with(&mut engine);
        for (c, out) in adv.iter_mut().enumerate() {
            for p in 0..len {
                out[p] += pu[a][p] * deps[c][p];
            }
        }
    }
    // g[j][i] = D_i u_j on the grid
    let mut g = Vec::with_capacity(dim);
    for _ in 0..dim {
        g.push(Vec::with_capacity(dim));
    }
    for i in 0..dim {
        let d = u.derivative(i)?.to_physical_with(&mut engine);
        for (j, dj) in d.into_iter().enumerate() {
            g[j].push(dj);
        }
    }
    let wedge = if dim == 2 {
        let mut s = vec![0.0; len];
        for j in 0..2 {
            for p in 0..len {
                s[p] += 0.5 * (g[j][0][p] * g[1][j][p] - g[j][1][p] * g[0][j][p]);
            }
        }
        vec![s]
    } else {
        let mut s = vec![vec![0.0; len]; 3];
        for j in 0..3 {
            for p in 0..len {
                let a = [g[j][0][p], g[j][1][p], g[j][2][p]];
                let b = [g[0][j][p], g[1][j][p], g[2][j][p]];
                s[0][p] += 0.5 * (a[1] * b[2] - a[2] * b[1]);
                s[1][p] += 0.5 * (a[2] * b[0] - a[0] * b[2]);
                s[2][p] += 0.5 * (a[0] * b[1] - a[1] * b[0]);
            }
        }
        s
    };
    let adv = SpectralField::from_physical_with(&mut engine, &adv)?.dealias();
    let wedge = SpectralField::from_physical_with(&mut engine, &wedge)?.dealias();
    Ok((adv, wedge))
}

/// Residual of the `ε` evolution equation at every interior snapshot, with
/// `ε_t` from the three-point difference over neighbouring snapshots.
pub fn epsilon_residual(traj: &[MicropolarState], params: &FluidParams) -> Result<Vec<EpsilonResidual>> {
    if traj.len() < 3 {
        return Err(Error::structural(format!(
            "epsilon residual needs at least 3 snapshots, got {}",
            traj.len()
        )));
    }
    let grid = *traj[0].grid();
    if traj.iter().any(|s| s.grid() != &grid) {
        return Err(Error::structural("snapshots live on different grids"));
    }
    if traj.windows(2).any(|w| w[1].time <= w[0].time) {
        return Err(Error::structural("snapshot times must increase strictly"));
    }
    let eps: Vec<SpectralField> = traj.iter().map(epsilon_field).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(traj.len() - 2);
    for i in 1..traj.len() - 1 {
        let (t0, t1, t2) = (traj[i - 1].time, traj[i].time, traj[i + 1].time);
        let (h0, h1) = (t1 - t0, t2 - t1);
        // three-point derivative at t1 for unequal spacing
        let c0 = -h1 / (h0 * (h0 + h1));
        let c1 = (h1 - h0) / (h0 * h1);
        let c2 = h0 / (h1 * (h0 + h1));
        let eps_t = eps[i - 1]
            .scaled(c0)
            .add_scaled(&eps[i], c1)?
            .add_scaled(&eps[i + 1], c2)?;
        let s = &traj[i];
        let (adv, wedge) = epsilon_transport_terms(s, &eps[i])?;
        let r = eps_t
            .add_scaled(&adv, 1.0)?
            .add_scaled(&eps[i], 4.0 * params.chi)?
            .add_scaled(&elliptic_operator(&eps[i], params)?, -1.0)?
            .add_scaled(&s.w.laplacian(), -(params.nu - params.mu))?
            .add_scaled(&wedge, -1.0)?;
        let e = &eps[i];
        out.push(EpsilonResidual {
            time: t1,
            residual: r.l2_norm(),
            eps_h1: (e.energy() + e.seminorm_unchecked(1).powi(2)).sqrt(),
        });
    }
    Ok(out)
}
