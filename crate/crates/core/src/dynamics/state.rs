use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

/// The pair `z = (u, w)` at one instant.
///
/// `u` has `dim` components; `w` is a scalar in 2D and a vector in 3D.
#[derive(Debug, Clone, PartialEq)]
pub struct MicropolarState {
    pub time: f64,
    pub u: SpectralField,
    pub w: SpectralField,
}

/// Number of micro-rotation components for a spatial dimension.
pub fn rotation_components(dim: usize) -> usize {
    if dim == 2 {
        1
    } else {
        3
    }
}

impl MicropolarState {
    pub fn new(time: f64, u: SpectralField, w: SpectralField) -> Result<Self> {
        let grid = *u.grid();
        if w.grid() != &grid {
            return Err(Error::structural("u and w live on different grids"));
        }
        if u.components() != grid.dim() {
            return Err(Error::structural(format!(
                "u needs {} components, got {}",
                grid.dim(),
                u.components()
            )));
        }
        if w.components() != rotation_components(grid.dim()) {
            return Err(Error::structural(format!(
                "w needs {} components in {}D, got {}",
                rotation_components(grid.dim()),
                grid.dim(),
                w.components()
            )));
        }
        if !(time.is_finite() && time >= 0.0) {
            return Err(Error::domain(format!("time must be nonnegative, got {time}")));
        }
        Ok(MicropolarState { time, u, w })
    }

    pub fn zero(grid: Grid) -> Self {
        MicropolarState {
            time: 0.0,
            u: SpectralField::zeros(grid, grid.dim()),
            w: SpectralField::zeros(grid, rotation_components(grid.dim())),
        }
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }

    pub fn dim(&self) -> usize {
        self.grid().dim()
    }

    /// `‖z‖ = (‖u‖² + ‖w‖²)^{1/2}`.
    pub fn norm(&self) -> f64 {
        (self.u.energy() + self.w.energy()).sqrt()
    }

    /// `‖D^m z‖ = (‖D^m u‖² + ‖D^m w‖²)^{1/2}`.
    pub fn seminorm(&self, m: u32) -> Result<f64> {
        let a = self.u.sobolev_seminorm(m)?.value;
        let b = self.w.sobolev_seminorm(m)?.value;
        Ok(a.hypot(b))
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.w.is_finite()
    }

    /// `‖∇·u‖ / ‖Du‖`, zero for a zero field.
    pub fn divergence_ratio(&self) -> f64 {
        let du = self.u.seminorm_unchecked(1);
        if du == 0.0 {
            return 0.0;
        }
        let div = self.u.divergence().expect("u is a vector field");
        div.l2_norm() / du
    }

    /// Flattened coefficients, `u` components followed by `w` components.
    pub(crate) fn pack(&self) -> Vec<Complex64> {
        let mut v = Vec::with_capacity(self.u.coeffs().len() + self.w.coeffs().len());
        v.extend_from_slice(self.u.coeffs());
        v.extend_from_slice(self.w.coeffs());
        v
    }

    pub(crate) fn unpack_into(&mut self, packed: &[Complex64]) {
        let nu = self.u.coeffs().len();
        self.u.coeffs_mut().copy_from_slice(&packed[..nu]);
        self.w.coeffs_mut().copy_from_slice(&packed[nu..]);
    }
}
