use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagnostics::BoundConstants;
use crate::dynamics::{rotation_components, FluidParams, MicropolarState};
use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

/// Radial spectrum of a random field: Fourier modulus `|k|^r` for `0 < |k| <= kc`,
/// zero elsewhere, with the whole field scaled to `‖·‖ = amplitude`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEnvelope {
    pub exponent_r: f64,
    pub cutoff_kc: f64,
    pub amplitude: f64,
    pub seed: u64,
}

impl SpectrumEnvelope {
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let nyquist = grid.base_wavenumber() * (grid.points_per_axis() / 2) as f64;
        if !(self.cutoff_kc > 0.0 && self.cutoff_kc <= nyquist) {
            return Err(Error::invalid(
                "initdata.kc",
                format!("must lie in (0, {nyquist}], got {}", self.cutoff_kc),
            ));
        }
        if self.cutoff_kc < grid.base_wavenumber() {
            return Err(Error::invalid(
                "initdata.kc",
                format!(
                    "is below the lowest wavenumber {} and would leave the field empty",
                    grid.base_wavenumber()
                ),
            ));
        }
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(Error::invalid("initdata.amplitude", "must be nonnegative"));
        }
        if !self.exponent_r.is_finite() {
            return Err(Error::invalid("initdata.r", "must be finite"));
        }
        Ok(())
    }
}

/// Default spectral cutoff: `4`, reduced to half the dealiased band on coarse grids.
pub fn default_cutoff(grid: &Grid) -> f64 {
    let band = grid.base_wavenumber() * (grid.points_per_axis() / 3) as f64;
    4.0f64.min(band / 2.0).max(grid.base_wavenumber())
}

/// `r = 2α - dim/2`, the low-wavenumber power that gives heat decay `t^{-α}`.
pub fn decay_character_exponent(alpha: f64, dim: usize) -> f64 {
    2.0 * alpha - dim as f64 / 2.0
}

fn random_unit(rng: &mut ChaCha8Rng) -> Complex64 {
    let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(1.0, phase)
}

/// Random divergence-free vector field (or scalar field when `components == 1`)
/// following `env`, unnormalized.
fn random_field(grid: &Grid, env: &SpectrumEnvelope, components: usize, rng: &mut ChaCha8Rng) -> SpectralField {
    let dim = grid.dim();
    let mut f = SpectralField::zeros(*grid, components);
    let kc2 = env.cutoff_kc * env.cutoff_kc * (1.0 + 1e-12);
    for flat in 0..grid.len() {
        let mirror = grid.mirror_index(flat);
        if mirror <= flat || grid.touches_nyquist(flat) {
            continue;
        }
        let k2 = grid.wavenumber_squared(flat);
        if k2 == 0.0 || k2 > kc2 {
            continue;
        }
        let modulus = k2.sqrt().powf(env.exponent_r);
        let k = grid.wavevector(flat);
        let dir: Vec<Complex64> = if components == 1 {
            vec![random_unit(rng)]
        } else if dim == 2 {
            let kn = k2.sqrt();
            let z = random_unit(rng);
            vec![z * (-k[1] / kn), z * (k[0] / kn)]
        } else {
            let mut a: Vec<Complex64> = (0..3)
                .map(|_| {
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                })
                .collect();
            let kdota: Complex64 = (0..3).map(|i| a[i] * k[i]).sum();
            for i in 0..3 {
                a[i] -= kdota * (k[i] / k2);
            }
            let norm = a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                continue;
            }
            a.iter().map(|c| c / norm).collect()
        };
        for (c, d) in dir.iter().enumerate() {
            f.set(c, flat, d * modulus);
            f.set(c, mirror, (d * modulus).conj());
        }
    }
    f
}

fn normalized(f: SpectralField, amplitude: f64) -> SpectralField {
    let n = f.l2_norm();
    if n == 0.0 {
        f
    } else {
        f.scaled(amplitude / n)
    }
}

/// Random divergence-free velocity with the envelope's spectrum; `w` is an
/// independent random field with the same envelope when `with_w` is set.
pub fn random_solenoidal(grid: &Grid, env: &SpectrumEnvelope, with_w: bool) -> Result<MicropolarState> {
    env.validate(grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(env.seed);
    let u = normalized(random_field(grid, env, grid.dim(), &mut rng), env.amplitude);
    let wc = rotation_components(grid.dim());
    let w = if with_w {
        let raw = if wc == 1 {
            random_field(grid, env, 1, &mut rng)
        } else {
            // a general (not solenoidal) 3D micro-rotation: solenoidal part plus a gradient
            let sol = random_field(grid, env, 3, &mut rng);
            let pot = random_field(grid, env, 1, &mut rng);
            sol.add_scaled(&pot.gradient()?, 1.0 / env.cutoff_kc)?
        };
        normalized(raw, env.amplitude)
    } else {
        SpectralField::zeros(*grid, wc)
    };
    MicropolarState::new(0.0, u, w)
}

/// Initial data whose heat evolution decays like `t^{-α}`: `u₀` has Fourier
/// modulus `|k|^{2α - dim/2}` below `kc` with random phases, `w₀ = 0`, `‖u₀‖ = amplitude`.
pub fn decay_character_data(grid: &Grid, alpha: f64, amplitude: f64, seed: u64) -> Result<MicropolarState> {
    decay_character_data_with_cutoff(grid, alpha, amplitude, seed, default_cutoff(grid))
}

pub fn decay_character_data_with_cutoff(
    grid: &Grid,
    alpha: f64,
    amplitude: f64,
    seed: u64,
    kc: f64,
) -> Result<MicropolarState> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::domain(format!("alpha must lie in (0, 1/2), got {alpha}")));
    }
    let env = SpectrumEnvelope {
        exponent_r: decay_character_exponent(alpha, grid.dim()),
        cutoff_kc: kc,
        amplitude,
        seed,
    };
    random_solenoidal(grid, &env, false)
}

/// Safety factor applied to the initial-data smallness threshold when rescaling.
pub const SMALLNESS_SAFETY: f64 = 0.9;

/// Scales `state` by `λ <= 1` so that `‖z₀‖^{1/2}‖Dz₀‖^{1/2} <= 0.9 · 3.182 · γ`.
/// Returns the scaled state and `λ`.
pub fn rescale_for_smallness(state: &MicropolarState, params: &FluidParams) -> Result<(MicropolarState, f64)> {
    let h1 = (state.norm() * state.seminorm(1)?).sqrt();
    let target = SMALLNESS_SAFETY * BoundConstants::H1_INITDATA_THRESHOLD * params.gamma();
    let lambda = if h1 > target { target / h1 } else { 1.0 };
    let mut out = state.clone();
    out.u = out.u.scaled(lambda);
    out.w = out.w.scaled(lambda);
    Ok((out, lambda))
}

/// 2D Taylor–Green vortex `u = A (sin k₀x₁ cos k₀x₂, -cos k₀x₁ sin k₀x₂)`, `w = 0`,
/// with `k₀ = 2π/L`, built from its four exact Fourier coefficients per component.
pub fn taylor_green(grid: &Grid, amplitude: f64) -> Result<MicropolarState> {
    if grid.dim() != 2 {
        return Err(Error::domain("the Taylor–Green field is only provided in 2D"));
    }
    let n = grid.points_per_axis();
    let mut u = SpectralField::zeros(*grid, 2);
    let q = Complex64::new(0.0, 0.25 * amplitude);
    for (i, j, s0, s1) in [(1, 1, -1.0, 1.0), (1, n - 1, -1.0, -1.0), (n - 1, 1, 1.0, 1.0), (n - 1, n - 1, 1.0, -1.0)] {
        let f = grid.flat_index([i, j, 0]);
        u.set(0, f, q * s0);
        u.set(1, f, q * s1);
    }
    MicropolarState::new(0.0, u, SpectralField::zeros(*grid, 1))
}
