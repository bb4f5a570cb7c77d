use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::Grid;
use super::transform::FftEngine;
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// A real scalar or vector field stored as Fourier-series coefficients.
///
/// Coefficients are stored component-major: component `c` occupies
/// `coeffs[c * len .. (c + 1) * len]` with `len = grid.len()`, each block in
/// the grid's row-major mode order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    components: usize,
    coeffs: Vec<Complex64>,
}

/// `‖D^m v‖` over the periodic box, the L² norm of all order-`m` derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevSeminorm {
    pub order_m: u32,
    pub value: f64,
}

impl SpectralField {
    pub fn zeros(grid: Grid, components: usize) -> Self {
        assert!((1..=3).contains(&components), "1 to 3 components supported");
        SpectralField {
            grid,
            components,
            coeffs: vec![Complex64::default(); components * grid.len()],
        }
    }

    pub fn from_coeffs(grid: Grid, components: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if !(1..=3).contains(&components) {
            return Err(Error::structural(format!(
                "component count must be 1, 2 or 3, got {components}"
            )));
        }
        if coeffs.len() != components * grid.len() {
            return Err(Error::structural(format!(
                "expected {} coefficients, got {}",
                components * grid.len(),
                coeffs.len()
            )));
        }
        Ok(SpectralField {
            grid,
            components,
            coeffs,
        })
    }

    /// Transforms grid values (one vector per component) into coefficients.
    pub fn from_physical(grid: Grid, values: &[Vec<f64>]) -> Result<Self> {
        let mut engine = FftEngine::new(grid);
        Self::from_physical_with(&mut engine, values)
    }

    pub fn from_physical_with(engine: &mut FftEngine, values: &[Vec<f64>]) -> Result<Self> {
        let grid = *engine.grid();
        if values.iter().any(|v| v.len() != grid.len()) {
            return Err(Error::structural("grid value count does not match grid size"));
        }
        let mut field = SpectralField::zeros(grid, values.len());
        let inputs: Vec<&[f64]> = values.iter().map(|v| v.as_slice()).collect();
        let mut outputs: Vec<&mut [Complex64]> = field.coeffs.chunks_mut(grid.len()).collect();
        engine.to_spectral_many(&inputs, &mut outputs);
        Ok(field)
    }

    /// Samples a closure `f(x) -> [v_0, v_1, v_2]` at the grid points.
    pub fn from_fn(grid: Grid, components: usize, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let mut values = vec![vec![0.0; grid.len()]; components];
        for flat in 0..grid.len() {
            let v = f(grid.coordinates(flat));
            for c in 0..components {
                values[c][flat] = v[c];
            }
        }
        Self::from_physical(grid, &values).expect("shape is consistent by construction")
    }

    /// Grid values of every component.
    pub fn to_physical(&self) -> Vec<Vec<f64>> {
        let mut engine = FftEngine::new(self.grid);
        self.to_physical_with(&mut engine)
    }

    pub fn to_physical_with(&self, engine: &mut FftEngine) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.grid.len()]; self.components];
        let inputs: Vec<&[Complex64]> = (0..self.components).map(|c| self.component(c)).collect();
        engine.to_physical_many(&inputs, &mut out);
        out
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let len = self.grid.len();
        &self.coeffs[c * len..(c + 1) * len]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let len = self.grid.len();
        &mut self.coeffs[c * len..(c + 1) * len]
    }

    /// Coefficient of component `c` at mode `flat`.
    #[inline]
    pub fn at(&self, c: usize, flat: usize) -> Complex64 {
        self.coeffs[c * self.grid.len() + flat]
    }

    #[inline]
    pub fn set(&mut self, c: usize, flat: usize, value: Complex64) {
        let len = self.grid.len();
        self.coeffs[c * len + flat] = value;
    }

    fn same_shape(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid || self.components != other.components {
            return Err(Error::structural("fields live on different grids or shapes"));
        }
        Ok(())
    }

    pub fn scaled(&self, s: f64) -> SpectralField {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= s);
        out
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &SpectralField, s: f64) -> Result<SpectralField> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * s;
        }
        Ok(out)
    }

    /// L² inner product over the box.
    pub fn inner(&self, other: &SpectralField) -> Result<f64> {
        self.same_shape(other)?;
        let s: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a * b.conj()).re)
            .sum();
        Ok(s * self.grid.volume())
    }

    /// Squared L² norm over the box, `Σ_c ∫ |v_c|² dx`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.volume()
    }

    pub fn l2_norm(&self) -> f64 {
        self.energy().sqrt()
    }

    /// Largest coefficient modulus, handy for exact-zero checks.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest `|c(-k) - conj(c(k))|` over all components and modes.
    pub fn hermitian_defect(&self) -> f64 {
        let len = self.grid.len();
        let mut worst: f64 = 0.0;
        for c in 0..self.components {
            let block = self.component(c);
            for flat in 0..len {
                let m = self.grid.mirror_index(flat);
                worst = worst.max((block[m] - block[flat].conj()).norm());
            }
        }
        worst
    }

    /// Replaces every coefficient pair by its Hermitian average.
    pub fn symmetrize(&mut self) {
        let grid = self.grid;
        for c in 0..self.components {
            let block = self.component_mut(c);
            for flat in 0..grid.len() {
                let m = grid.mirror_index(flat);
                if m < flat {
                    continue;
                }
                let avg = (block[flat] + block[m].conj()) * 0.5;
                block[flat] = avg;
                block[m] = avg.conj();
            }
        }
    }

    /// Zeros the mean mode `k = 0` of every component.
    pub fn remove_mean(&mut self) {
        for c in 0..self.components {
            self.component_mut(c)[0] = Complex64::default();
        }
    }

    /// Zeros every mode lying on a Nyquist plane.
    pub fn remove_nyquist(&mut self) {
        let grid = self.grid;
        for c in 0..self.components {
            let block = self.component_mut(c);
            for (flat, v) in block.iter_mut().enumerate() {
                if grid.touches_nyquist(flat) {
                    *v = Complex64::default();
                }
            }
        }
    }

    fn require_vector(&self, what: &str) -> Result<()> {
        if self.components != self.grid.dim() {
            return Err(Error::structural(format!(
                "{what} needs a vector field with {} components, got {}",
                self.grid.dim(),
                self.components
            )));
        }
        Ok(())
    }

    /// Orthogonal projection onto divergence-free fields: `û - k (k·û)/|k|²`.
    pub fn leray_project(&self) -> Result<SpectralField> {
        self.require_vector("leray_project")?;
        let mut out = self.clone();
        out.leray_project_in_place();
        Ok(out)
    }

    pub(crate) fn leray_project_in_place(&mut self) {
        let grid = self.grid;
        let dim = grid.dim();
        let len = grid.len();
        for flat in 0..len {
            let k = grid.derivative_wavevector(flat);
            let k2: f64 = k[..dim].iter().map(|x| x * x).sum();
            if k2 == 0.0 {
                continue;
            }
            let mut kdotu = Complex64::default();
            for a in 0..dim {
                kdotu += self.coeffs[a * len + flat] * k[a];
            }
            let s = kdotu / k2;
            for a in 0..dim {
                self.coeffs[a * len + flat] -= s * k[a];
            }
        }
    }

    /// Scalar divergence `i k·û`.
    pub fn divergence(&self) -> Result<SpectralField> {
        self.require_vector("divergence")?;
        let grid = self.grid;
        let dim = grid.dim();
        let mut out = SpectralField::zeros(grid, 1);
        for flat in 0..grid.len() {
            let k = grid.derivative_wavevector(flat);
            let mut s = Complex64::default();
            for a in 0..dim {
                s += self.at(a, flat) * k[a];
            }
            out.coeffs[flat] = I * s;
        }
        Ok(out)
    }

    /// Curl. In 2D a scalar `w` maps to `(D₂w, -D₁w)` and a vector `u` maps to
    /// the scalar `D₁u₂ - D₂u₁`; in 3D it is the usual `i k × û`.
    pub fn curl(&self) -> Result<SpectralField> {
        let grid = self.grid;
        let len = grid.len();
        match (grid.dim(), self.components) {
            (2, 1) => {
                let mut out = SpectralField::zeros(grid, 2);
                for flat in 0..len {
                    let k = grid.derivative_wavevector(flat);
                    let w = I * self.coeffs[flat];
                    out.coeffs[flat] = w * k[1];
                    out.coeffs[len + flat] = -w * k[0];
                }
                Ok(out)
            }
            (2, 2) => {
                let mut out = SpectralField::zeros(grid, 1);
                for flat in 0..len {
                    let k = grid.derivative_wavevector(flat);
                    out.coeffs[flat] = I * (self.at(1, flat) * k[0] - self.at(0, flat) * k[1]);
                }
                Ok(out)
            }
            (3, 3) => {
                let mut out = SpectralField::zeros(grid, 3);
                for flat in 0..len {
                    let k = grid.derivative_wavevector(flat);
                    let (u0, u1, u2) = (self.at(0, flat), self.at(1, flat), self.at(2, flat));
                    out.coeffs[flat] = I * (u2 * k[1] - u1 * k[2]);
                    out.coeffs[len + flat] = I * (u0 * k[2] - u2 * k[0]);
                    out.coeffs[2 * len + flat] = I * (u1 * k[0] - u0 * k[1]);
                }
                Ok(out)
            }
            (d, c) => Err(Error::structural(format!(
                "curl is undefined for a {c}-component field in {d}D"
            ))),
        }
    }

    /// Gradient of a scalar field.
    pub fn gradient(&self) -> Result<SpectralField> {
        if self.components != 1 {
            return Err(Error::structural("gradient needs a scalar field"));
        }
        let grid = self.grid;
        let dim = grid.dim();
        let len = grid.len();
        let mut out = SpectralField::zeros(grid, dim);
        for flat in 0..len {
            let k = grid.derivative_wavevector(flat);
            let v = I * self.coeffs[flat];
            for a in 0..dim {
                out.coeffs[a * len + flat] = v * k[a];
            }
        }
        Ok(out)
    }

    /// Spectral derivative `D_axis` applied to every component.
    pub fn derivative(&self, axis: usize) -> Result<SpectralField> {
        if axis >= self.grid.dim() {
            return Err(Error::structural(format!("axis {axis} out of range")));
        }
        let grid = self.grid;
        let len = grid.len();
        let mut out = self.clone();
        for c in 0..self.components {
            for flat in 0..len {
                let k = grid.derivative_wavevector(flat)[axis];
                out.coeffs[c * len + flat] *= I * k;
            }
        }
        Ok(out)
    }

    /// Laplacian `-|k|² û` of every component.
    pub fn laplacian(&self) -> SpectralField {
        let grid = self.grid;
        let len = grid.len();
        let mut out = self.clone();
        for c in 0..self.components {
            for flat in 0..len {
                out.coeffs[c * len + flat] *= -grid.wavenumber_squared(flat);
            }
        }
        out
    }

    /// 2/3-rule truncation: zeros every mode with some `|m_i| > n/3`.
    pub fn dealias(&self) -> SpectralField {
        let mut out = self.clone();
        out.dealias_in_place();
        out
    }

    pub(crate) fn dealias_in_place(&mut self) {
        let grid = self.grid;
        let len = grid.len();
        for c in 0..self.components {
            for flat in 0..len {
                if !grid.is_resolved(flat) {
                    self.coeffs[c * len + flat] = Complex64::default();
                }
            }
        }
    }

    /// `‖D^m v‖` via Parseval: `(L^dim Σ_c Σ_k |k|^{2m} |v̂|²)^{1/2}`.
    pub fn sobolev_seminorm(&self, m: u32) -> Result<SobolevSeminorm> {
        if m > self.grid.max_seminorm_order() {
            return Err(Error::domain(format!(
                "seminorm order {m} exceeds the resolvable maximum {}",
                self.grid.max_seminorm_order()
            )));
        }
        Ok(SobolevSeminorm {
            order_m: m,
            value: self.seminorm_unchecked(m),
        })
    }

    pub(crate) fn seminorm_unchecked(&self, m: u32) -> f64 {
        let grid = self.grid;
        let len = grid.len();
        let mut total = 0.0;
        for flat in 0..len {
            let weight = if m == 0 {
                1.0
            } else {
                grid.wavenumber_squared(flat).powi(m as i32)
            };
            if weight == 0.0 {
                continue;
            }
            let mut s = 0.0;
            for c in 0..self.components {
                s += self.coeffs[c * len + flat].norm_sqr();
            }
            total += weight * s;
        }
        (total * grid.volume()).sqrt()
    }
}
