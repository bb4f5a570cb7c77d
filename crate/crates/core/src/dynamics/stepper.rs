use num_complex::Complex64;

use super::linear::linear_mode_matrix_on_grid;
use super::params::FluidParams;
use super::state::{rotation_components, MicropolarState};
use crate::error::{Error, Result};
use crate::spectral::{FftEngine, Grid, SpectralField};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Switches that select the discretization used by [`Stepper`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepFlags {
    pub nonlinear: bool,
    pub dealias: bool,
}

impl Default for StepFlags {
    fn default() -> Self {
        StepFlags {
            nonlinear: true,
            dealias: true,
        }
    }
}

/// Lawson fourth-order Runge–Kutta integrator with exact per-mode linear propagators.
///
/// The half-step propagator `exp(dt/2 · A_k)` is precomputed for every retained
/// mode; the full step is applied as two half steps.
pub struct Stepper {
    grid: Grid,
    params: FluidParams,
    dt: f64,
    flags: StepFlags,
    dim: usize,
    nc: usize,
    len: usize,
    kd: Vec<[f64; 3]>,
    modes: Vec<usize>,
    half: Vec<f64>,
    engine: FftEngine,
    phys: Vec<Vec<f64>>,
    spec: Vec<Vec<Complex64>>,
    bufs: [Vec<Complex64>; 5],
    max_velocity: f64,
}

impl Stepper {
    pub fn new(grid: Grid, params: FluidParams, dt: f64, flags: StepFlags) -> Result<Self> {
        params.validate()?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::invalid("dt", format!("must be positive, got {dt}")));
        }
        let dim = grid.dim();
        let nc = dim + rotation_components(dim);
        let len = grid.len();
        let kd = (0..len).map(|f| grid.derivative_wavevector(f)).collect();
        let modes: Vec<usize> = (0..len)
            .filter(|&f| !flags.dealias || grid.is_resolved(f))
            .collect();
        let mut half = Vec::with_capacity(modes.len() * nc * nc);
        for &f in &modes {
            let m = linear_mode_matrix_on_grid(&params, &grid, f);
            let e = &m.symmetric_exponentials(&[0.5 * dt])[0];
            for r in 0..nc {
                for s in 0..nc {
                    half.push(e[(r, s)]);
                }
            }
        }
        let (nphys, nspec) = if dim == 2 { (5, 3) } else { (15, 12) };
        Ok(Stepper {
            grid,
            params,
            dt,
            flags,
            dim,
            nc,
            len,
            kd,
            modes,
            half,
            engine: FftEngine::new(grid),
            phys: vec![vec![0.0; len]; nphys],
            spec: vec![vec![ZERO; len]; nspec],
            bufs: std::array::from_fn(|_| vec![ZERO; nc * len]),
            max_velocity: 0.0,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn params(&self) -> &FluidParams {
        &self.params
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn flags(&self) -> StepFlags {
        self.flags
    }

    /// Largest advective CFL number `dt · Σ_a max|u_a| / Δx` seen so far.
    pub fn max_cfl(&self) -> f64 {
        self.max_velocity * self.dt / self.grid.grid_spacing()
    }

    /// `out = exp(dt/2 · A) v` mode by mode; unretained modes are zeroed.
    fn half_propagate(&self, v: &[Complex64], out: &mut [Complex64]) {
        let (nc, len, dim) = (self.nc, self.len, self.dim);
        let mut x = [ZERO; 6];
        if self.flags.dealias {
            out.fill(ZERO);
        }
        for (i, &f) in self.modes.iter().enumerate() {
            for c in 0..nc {
                x[c] = v[c * len + f];
                if c >= dim {
                    x[c] *= I;
                }
            }
            let m = &self.half[i * nc * nc..(i + 1) * nc * nc];
            for r in 0..nc {
                let row = &m[r * nc..(r + 1) * nc];
                let mut y = ZERO;
                for s in 0..nc {
                    y += x[s] * row[s];
                }
                out[r * len + f] = if r >= dim { -I * y } else { y };
            }
        }
    }

    fn project_and_clean(&self, v: &mut [Complex64]) {
        let (len, dim) = (self.len, self.dim);
        for f in 0..len {
            let k = self.kd[f];
            let k2: f64 = k[..dim].iter().map(|x| x * x).sum();
            if k2 == 0.0 {
                continue;
            }
            let mut kdotu = ZERO;
            for a in 0..dim {
                kdotu += v[a * len + f] * k[a];
            }
            let s = kdotu / k2;
            for a in 0..dim {
                v[a * len + f] -= s * k[a];
            }
        }
        for c in 0..self.nc {
            v[c * len] = ZERO;
        }
    }

    /// Dealiased advection tendencies `(-P[(u·∇)u], -(u·∇)w)` of a packed state.
    fn nonlinear(&mut self, v: &[Complex64], out: &mut [Complex64], track: bool) {
        let (len, dim) = (self.len, self.dim);
        let kd = &self.kd;
        let spec = &mut self.spec;
        let u = |a: usize| &v[a * len..(a + 1) * len];
        if dim == 2 {
            let (u0, u1, w) = (u(0), u(1), &v[2 * len..3 * len]);
            for f in 0..len {
                let k = kd[f];
                spec[0][f] = I * (u1[f] * k[0] - u0[f] * k[1]);
                spec[1][f] = I * w[f] * k[0];
                spec[2][f] = I * w[f] * k[1];
            }
            let inputs: [&[Complex64]; 5] = [u0, u1, &spec[0], &spec[1], &spec[2]];
            self.engine.to_physical_many(&inputs, &mut self.phys);
            let [pu0, pu1, pom, pw0, pw1] = &mut self.phys[..] else {
                unreachable!()
            };
            if track {
                let m0 = pu0.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                let m1 = pu1.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                self.max_velocity = self.max_velocity.max(m0 + m1);
            }
            for p in 0..len {
                let (a, b, om) = (pu0[p], pu1[p], pom[p]);
                let g = a * pw0[p] + b * pw1[p];
                pw0[p] = -om * b;
                pw1[p] = om * a;
                pom[p] = g;
            }
            let inputs: [&[f64]; 3] = [&self.phys[3], &self.phys[4], &self.phys[2]];
            let (o01, o2) = out.split_at_mut(2 * len);
            let (o0, o1) = o01.split_at_mut(len);
            let mut outs: [&mut [Complex64]; 3] = [o0, o1, o2];
            self.engine.to_spectral_many(&inputs, &mut outs);
        } else {
            let w = |a: usize| &v[(3 + a) * len..(4 + a) * len];
            for f in 0..len {
                let k = kd[f];
                let (a, b, c) = (u(0)[f], u(1)[f], u(2)[f]);
                spec[0][f] = I * (c * k[1] - b * k[2]);
                spec[1][f] = I * (a * k[2] - c * k[0]);
                spec[2][f] = I * (b * k[0] - a * k[1]);
                for i in 0..3 {
                    let wi = w(i)[f];
                    for j in 0..3 {
                        spec[3 + 3 * i + j][f] = I * wi * k[j];
                    }
                }
            }
            let mut inputs: Vec<&[Complex64]> = vec![u(0), u(1), u(2)];
            inputs.extend(spec[..12].iter().map(|s| s.as_slice()));
            self.engine.to_physical_many(&inputs, &mut self.phys);
            let phys = &mut self.phys;
            if track {
                let m: f64 = (0..3)
                    .map(|a| phys[a].iter().fold(0.0f64, |m, x| m.max(x.abs())))
                    .sum();
                self.max_velocity = self.max_velocity.max(m);
            }
            for p in 0..len {
                let uu = [phys[0][p], phys[1][p], phys[2][p]];
                let om = [phys[3][p], phys[4][p], phys[5][p]];
                let mut g = [0.0; 3];
                for (i, gi) in g.iter_mut().enumerate() {
                    for (j, uj) in uu.iter().enumerate() {
                        *gi += uj * phys[6 + 3 * i + j][p];
                    }
                }
                phys[0][p] = om[1] * uu[2] - om[2] * uu[1];
                phys[1][p] = om[2] * uu[0] - om[0] * uu[2];
                phys[2][p] = om[0] * uu[1] - om[1] * uu[0];
                phys[3][p] = g[0];
                phys[4][p] = g[1];
                phys[5][p] = g[2];
            }
            let inputs: Vec<&[f64]> = phys[..6].iter().map(|x| x.as_slice()).collect();
            let mut outs: Vec<&mut [Complex64]> = out.chunks_mut(len).collect();
            self.engine.to_spectral_many(&inputs, &mut outs);
        }
        for x in out.iter_mut() {
            *x = -*x;
        }
        if self.flags.dealias {
            for f in 0..len {
                if !self.grid.is_resolved(f) {
                    for c in 0..self.nc {
                        out[c * len + f] = ZERO;
                    }
                }
            }
        }
        self.project_and_clean(out);
    }

    /// Advances `state` by one step of size `dt`.
    pub fn step(&mut self, state: &mut MicropolarState) -> Result<()> {
        if state.grid() != &self.grid {
            return Err(Error::structural("state grid does not match the stepper grid"));
        }
        let mut v = state.pack();
        self.step_packed(&mut v);
        state.unpack_into(&v);
        state.time += self.dt;
        if !state.is_finite() {
            return Err(Error::BlowUp {
                time: state.time,
                reason: "non-finite coefficients".into(),
            });
        }
        Ok(())
    }

    fn step_packed(&mut self, v: &mut [Complex64]) {
        let h = self.dt;
        let mut bufs = std::mem::take(&mut self.bufs);
        let [acc, a, kb, sb, evh] = &mut bufs;
        if !self.flags.nonlinear {
            self.half_propagate(v, a);
            self.half_propagate(a, v);
        } else {
            // k1
            self.nonlinear(v, kb, true);
            self.half_propagate(kb, a);
            self.half_propagate(a, acc);
            // k2
            for ((x, &y), &k) in a.iter_mut().zip(v.iter()).zip(kb.iter()) {
                *x = y + k * (0.5 * h);
            }
            self.half_propagate(a, sb);
            self.nonlinear(sb, kb, false);
            // k3
            self.half_propagate(v, evh);
            for ((x, &y), &k) in a.iter_mut().zip(evh.iter()).zip(kb.iter()) {
                *x = y + k * (0.5 * h);
            }
            sb.copy_from_slice(kb);
            self.nonlinear(a, kb, false);
            for (s, &k) in sb.iter_mut().zip(kb.iter()) {
                *s += k;
            }
            self.half_propagate(sb, a);
            for (x, &s) in acc.iter_mut().zip(a.iter()) {
                *x += s * 2.0;
            }
            // k4
            self.half_propagate(kb, a);
            self.half_propagate(evh, sb);
            for (x, &e) in a.iter_mut().zip(sb.iter()) {
                *x = e + *x * h;
            }
            self.nonlinear(a, kb, false);
            for ((x, &k), (&e, y)) in acc.iter_mut().zip(kb.iter()).zip(sb.iter().zip(v.iter_mut())) {
                *x += k;
                *y = e + *x * (h / 6.0);
            }
        }
        self.project_and_clean(v);
        self.bufs = bufs;
    }

    /// Dealiased nonlinear tendencies of a state, using this stepper's flags.
    pub fn tendencies(&mut self, state: &MicropolarState) -> Result<(SpectralField, SpectralField)> {
        if state.grid() != &self.grid {
            return Err(Error::structural("state grid does not match the stepper grid"));
        }
        let mut v = state.pack();
        if self.flags.dealias {
            for f in 0..self.len {
                if !self.grid.is_resolved(f) {
                    for c in 0..self.nc {
                        v[c * self.len + f] = ZERO;
                    }
                }
            }
        }
        let mut out = vec![ZERO; v.len()];
        self.nonlinear(&v, &mut out, false);
        let nu = self.dim * self.len;
        let w_out = out.split_off(nu);
        Ok((
            SpectralField::from_coeffs(self.grid, self.dim, out)?,
            SpectralField::from_coeffs(self.grid, self.nc - self.dim, w_out)?,
        ))
    }
}

/// Advection tendencies `du = -P[(u·∇)u]`, `dw = -(u·∇)w` with 2/3-rule dealiasing.
///
/// The momentum product is evaluated in rotational form `ω × u`, which differs
/// from `(u·∇)u` by a gradient that the projection removes.
pub fn nonlinear_rhs(
    state: &MicropolarState,
    params: &FluidParams,
) -> Result<(SpectralField, SpectralField)> {
    let mut s = Stepper::new(*state.grid(), *params, 1.0, StepFlags::default())?;
    s.tendencies(state)
}

/// One Lawson RK4 step of size `dt`.
pub fn step(
    state: &MicropolarState,
    params: &FluidParams,
    dt: f64,
    flags: StepFlags,
) -> Result<MicropolarState> {
    let mut s = Stepper::new(*state.grid(), *params, dt, flags)?;
    let mut next = state.clone();
    s.step(&mut next)?;
    Ok(next)
}
