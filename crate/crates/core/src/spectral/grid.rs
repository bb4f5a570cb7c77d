use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An isotropic periodic grid on `[0, L)^dim` with `n` points per axis.
///
/// Flat indices are row-major with axis 0 varying slowest. The wavenumber
/// integer attached to index `i` on an axis is `i` for `i <= n/2` and
/// `i - n` otherwise, so the integers run over `-n/2+1 ..= n/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    n: usize,
    box_length: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, box_length: f64) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::domain(format!("grid dimension must be 2 or 3, got {dim}")));
        }
        if n < 8 || n % 2 != 0 {
            return Err(Error::domain(format!(
                "points per axis must be even and at least 8, got {n}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::domain(format!(
                "box length must be positive, got {box_length}"
            )));
        }
        Ok(Grid { dim, n, box_length })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    /// Number of grid points (and of Fourier modes) per component.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume of the periodic box, `L^dim`.
    pub fn volume(&self) -> f64 {
        self.box_length.powi(self.dim as i32)
    }

    /// Smallest nonzero wavenumber `2π/L`.
    pub fn base_wavenumber(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    pub fn grid_spacing(&self) -> f64 {
        self.box_length / self.n as f64
    }

    /// Signed wavenumber integer for a per-axis index.
    #[inline]
    pub fn mode_integer(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    #[inline]
    pub fn is_nyquist(&self, i: usize) -> bool {
        i == self.n / 2
    }

    /// Per-axis indices of a flat index; unused trailing axes are zero.
    #[inline]
    pub fn axis_indices(&self, flat: usize) -> [usize; 3] {
        let n = self.n;
        match self.dim {
            2 => [flat / n, flat % n, 0],
            _ => [flat / (n * n), (flat / n) % n, flat % n],
        }
    }

    #[inline]
    pub fn flat_index(&self, idx: [usize; 3]) -> usize {
        let n = self.n;
        match self.dim {
            2 => idx[0] * n + idx[1],
            _ => (idx[0] * n + idx[1]) * n + idx[2],
        }
    }

    /// Flat index of the mode `-k` for the mode stored at `flat`.
    #[inline]
    pub fn mirror_index(&self, flat: usize) -> usize {
        let n = self.n;
        let idx = self.axis_indices(flat);
        let mut m = [0usize; 3];
        for a in 0..self.dim {
            m[a] = (n - idx[a]) % n;
        }
        self.flat_index(m)
    }

    /// Signed wavenumber integers of a flat index.
    #[inline]
    pub fn mode_integers(&self, flat: usize) -> [i64; 3] {
        let idx = self.axis_indices(flat);
        let mut m = [0i64; 3];
        for a in 0..self.dim {
            m[a] = self.mode_integer(idx[a]);
        }
        m
    }

    /// Physical wavevector `k = (2π/L) m`, with the Nyquist integer taken as `+n/2`.
    #[inline]
    pub fn wavevector(&self, flat: usize) -> [f64; 3] {
        let k0 = self.base_wavenumber();
        let m = self.mode_integers(flat);
        [k0 * m[0] as f64, k0 * m[1] as f64, k0 * m[2] as f64]
    }

    /// Wavevector used by odd-order derivatives: the Nyquist component is zeroed
    /// so that spectral derivatives of real fields stay real.
    #[inline]
    pub fn derivative_wavevector(&self, flat: usize) -> [f64; 3] {
        let idx = self.axis_indices(flat);
        let k0 = self.base_wavenumber();
        let mut k = [0.0; 3];
        for a in 0..self.dim {
            if !self.is_nyquist(idx[a]) {
                k[a] = k0 * self.mode_integer(idx[a]) as f64;
            }
        }
        k
    }

    /// Squared modulus of the physical wavevector.
    #[inline]
    pub fn wavenumber_squared(&self, flat: usize) -> f64 {
        let k = self.wavevector(flat);
        k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
    }

    /// True when the mode survives the 2/3 truncation (every `|m_i| <= n/3`).
    #[inline]
    pub fn is_resolved(&self, flat: usize) -> bool {
        let m = self.mode_integers(flat);
        let n = self.n as i64;
        m[..self.dim].iter().all(|&mi| 3 * mi.abs() <= n)
    }

    /// True when any axis index sits on the Nyquist plane.
    #[inline]
    pub fn touches_nyquist(&self, flat: usize) -> bool {
        let idx = self.axis_indices(flat);
        idx[..self.dim].iter().any(|&i| self.is_nyquist(i))
    }

    /// Physical coordinate of a grid point along each axis.
    pub fn coordinates(&self, flat: usize) -> [f64; 3] {
        let h = self.grid_spacing();
        let idx = self.axis_indices(flat);
        [idx[0] as f64 * h, idx[1] as f64 * h, idx[2] as f64 * h]
    }

    /// Largest Sobolev order accepted by the seminorm evaluation.
    pub fn max_seminorm_order(&self) -> u32 {
        (self.n / 3) as u32
    }

    /// Lowest-mode diffusive time `L^2 / (4π^2 γ)`; algebraic decay on the torus
    /// is only meaningful well before this.
    pub fn infrared_time(&self, gamma: f64) -> f64 {
        self.box_length * self.box_length / (4.0 * PI * PI * gamma)
    }
}
