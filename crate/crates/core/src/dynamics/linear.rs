use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::params::FluidParams;
use crate::spectral::Grid;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Per-wavenumber matrix of the linear part of the micropolar system.
///
/// Rows and columns run over `(û₁, û₂, ŵ)` in 2D and `(û₁, û₂, û₃, ŵ₁, ŵ₂, ŵ₃)`
/// in 3D. The matrix is Hermitian and negative semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModeMatrix {
    k: [f64; 3],
    dim: usize,
    entries: DMatrix<Complex64>,
}

/// Linear mode matrix for the wavevector `k`, using `k` for both the
/// first-order couplings and the Laplacian.
pub fn linear_mode_matrix(params: &FluidParams, k: [f64; 3], dim: usize) -> LinearModeMatrix {
    let k2 = k[..dim].iter().map(|x| x * x).sum();
    assemble(params, k, k2, dim)
}

/// Linear mode matrix for a stored grid mode: couplings use the
/// Nyquist-zeroed wavevector, the Laplacian uses the true `|k|²`.
pub fn linear_mode_matrix_on_grid(params: &FluidParams, grid: &Grid, flat: usize) -> LinearModeMatrix {
    assemble(
        params,
        grid.derivative_wavevector(flat),
        grid.wavenumber_squared(flat),
        grid.dim(),
    )
}

fn assemble(p: &FluidParams, k: [f64; 3], k2: f64, dim: usize) -> LinearModeMatrix {
    assert!(dim == 2 || dim == 3, "dimension must be 2 or 3");
    let c = 2.0 * p.chi;
    let du = -(p.mu + p.chi) * k2;
    let dw = -(p.nu * k2 + 4.0 * p.chi);
    let entries = if dim == 2 {
        let mut a = DMatrix::zeros(3, 3);
        a[(0, 0)] = du.into();
        a[(1, 1)] = du.into();
        a[(2, 2)] = dw.into();
        a[(0, 2)] = I * (c * k[1]);
        a[(1, 2)] = -I * (c * k[0]);
        a[(2, 0)] = -I * (c * k[1]);
        a[(2, 1)] = I * (c * k[0]);
        a
    } else {
        let mut a = DMatrix::zeros(6, 6);
        // [k×] with [k×]v = k × v
        let cross = [
            [0.0, -k[2], k[1]],
            [k[2], 0.0, -k[0]],
            [-k[1], k[0], 0.0],
        ];
        for r in 0..3 {
            a[(r, r)] = du.into();
            a[(3 + r, 3 + r)] = dw.into();
            for s in 0..3 {
                a[(3 + r, 3 + s)] -= Complex64::from(p.kappa * (k[r] * k[s]));
                a[(r, 3 + s)] = I * (c * cross[r][s]);
                a[(3 + r, s)] = I * (c * cross[r][s]);
            }
        }
        a
    };
    LinearModeMatrix { k, dim, entries }
}

impl LinearModeMatrix {
    pub fn k(&self) -> [f64; 3] {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// Index of the first micro-rotation row.
    pub fn rotation_offset(&self) -> usize {
        self.dim
    }

    /// The real symmetric matrix `S = D A D⁻¹` with `D = diag(1, …, 1, i, …, i)`
    /// (the `i` entries on the micro-rotation rows).
    pub fn real_symmetric_form(&self) -> DMatrix<f64> {
        let n = self.size();
        let off = self.rotation_offset();
        let phase = |r: usize| if r >= off { I } else { Complex64::new(1.0, 0.0) };
        DMatrix::from_fn(n, n, |r, s| {
            let v = phase(r) * self.entries[(r, s)] / phase(s);
            debug_assert!(v.im.abs() <= 1e-12 * (1.0 + v.re.abs()));
            v.re
        })
    }

    /// Eigenvalues in ascending order; they are real because the matrix is Hermitian.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.real_symmetric_form())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// `exp(h S)` for each step in `steps`, from one eigendecomposition.
    pub(crate) fn symmetric_exponentials(&self, steps: &[f64]) -> Vec<DMatrix<f64>> {
        let eig = SymmetricEigen::new(self.real_symmetric_form());
        let v = &eig.eigenvectors;
        steps
            .iter()
            .map(|&h| {
                let mut scaled = v.clone();
                for (j, lam) in eig.eigenvalues.iter().enumerate() {
                    let e = (h * lam).exp();
                    scaled.column_mut(j).scale_mut(e);
                }
                &scaled * v.transpose()
            })
            .collect()
    }
}
