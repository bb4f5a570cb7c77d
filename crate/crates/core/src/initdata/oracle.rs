use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dynamics::{linear_mode_matrix_on_grid, FluidParams, MicropolarState};
use crate::error::{Error, Result};
use crate::spectral::Grid;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn one_norm(a: &DMatrix<Complex64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|c| c.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Dense complex matrix exponential by scaling and squaring with a degree-13 Padé approximant.
pub fn expm(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix exponential needs a square matrix");
    let norm = one_norm(a);
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a.scale(0.5f64.powi(s));
    let id = DMatrix::<Complex64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = |i: usize| Complex64::from(PADE13[i]);
    let c = |m: &DMatrix<Complex64>, i: usize| m * b(i);
    let inner_u = &a6 * (c(&a6, 13) + c(&a4, 11) + c(&a2, 9)) + c(&a6, 7) + c(&a4, 5) + c(&a2, 3) + c(&id, 1);
    let u = &a * inner_u;
    let v = &a6 * (c(&a6, 12) + c(&a4, 10) + c(&a2, 8)) + c(&a6, 6) + c(&a4, 4) + c(&a2, 2) + c(&id, 0);
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).expect("Padé denominator is nonsingular");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Per-mode coefficient vectors `(û, ŵ)` evolved exactly under the linear dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleState {
    pub grid: Grid,
    pub params: FluidParams,
    pub time: f64,
    /// One vector per stored mode, ordered like the grid's flat index.
    pub modes: Vec<DVector<Complex64>>,
}

impl OracleState {
    pub fn from_state(z: &MicropolarState, params: &FluidParams) -> Self {
        let grid = *z.grid();
        let dim = grid.dim();
        let nw = z.w.components();
        let modes = (0..grid.len())
            .map(|f| {
                DVector::from_iterator(
                    dim + nw,
                    (0..dim).map(|c| z.u.at(c, f)).chain((0..nw).map(|c| z.w.at(c, f))),
                )
            })
            .collect();
        OracleState {
            grid,
            params: *params,
            time: z.time,
            modes,
        }
    }

    /// Applies `exp(t A_k)` to every mode.
    pub fn evolve(&self, t: f64) -> Result<OracleState> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::domain(format!("evolution time must be nonnegative, got {t}")));
        }
        let modes = self
            .modes
            .iter()
            .enumerate()
            .map(|(f, v)| {
                let a = linear_mode_matrix_on_grid(&self.params, &self.grid, f);
                let e = expm(&a.entries().scale(t));
                e * v
            })
            .collect();
        Ok(OracleState {
            modes,
            time: self.time + t,
            ..self.clone()
        })
    }

    pub fn to_state(&self) -> Result<MicropolarState> {
        let mut z = MicropolarState::zero(self.grid);
        z.time = self.time;
        let dim = self.grid.dim();
        for (f, v) in self.modes.iter().enumerate() {
            for c in 0..dim {
                z.u.set(c, f, v[c]);
            }
            for c in 0..v.len() - dim {
                z.w.set(c, f, v[dim + c]);
            }
        }
        Ok(z)
    }
}

/// Exact linearized evolution of `z0` over time `t`, mode by mode.
pub fn linear_oracle_evolve(z0: &MicropolarState, params: &FluidParams, t: f64) -> Result<MicropolarState> {
    OracleState::from_state(z0, params).evolve(t)?.to_state()
}

/// The 2D per-mode system for the vorticity amplitude `Ω̂ = i(k₁û₂ - k₂û₁)` and `ŵ`:
/// `Ω̂' = -(μ+χ)|k|²Ω̂ + 2χ|k|²ŵ`, `ŵ' = 2χΩ̂ - (ν|k|² + 4χ)ŵ`.
pub fn reduced_mode_matrix(params: &FluidParams, k2: f64) -> DMatrix<f64> {
    let p = params;
    DMatrix::from_row_slice(
        2,
        2,
        &[
            -(p.mu + p.chi) * k2,
            2.0 * p.chi * k2,
            2.0 * p.chi,
            -(p.nu * k2 + 4.0 * p.chi),
        ],
    )
}
