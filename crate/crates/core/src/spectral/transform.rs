use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::Grid;

/// Multidimensional FFT on a [`Grid`], producing Fourier-series coefficients.
///
/// The forward map divides by the number of points, so a real field
/// `v(x) = Σ_k c_k e^{i k·x}` is represented by its coefficients `c_k`.
/// Two real fields are always transformed together as the real and imaginary
/// parts of one complex array.
pub struct FftEngine {
    grid: Grid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    work: Vec<Complex64>,
    pack: Vec<Complex64>,
    mirror: Vec<usize>,
}

#[derive(Clone, Copy)]
enum Direction {
    Forward,
    Inverse,
}

impl FftEngine {
    pub fn new(grid: Grid) -> Self {
        let n = grid.points_per_axis();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        FftEngine {
            grid,
            forward,
            inverse,
            scratch: vec![Complex64::default(); scratch_len],
            work: vec![Complex64::default(); grid.len()],
            pack: vec![Complex64::default(); grid.len()],
            mirror: (0..grid.len()).map(|f| grid.mirror_index(f)).collect(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn lines(&mut self, data: &mut [Complex64], dir: Direction) {
        let plan = match dir {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        };
        plan.process_with_scratch(data, &mut self.scratch);
    }

    /// Unnormalized in-place DFT along every axis.
    fn transform(&mut self, data: &mut [Complex64], dir: Direction) {
        let n = self.grid.points_per_axis();
        debug_assert_eq!(data.len(), self.grid.len());
        let mut work = std::mem::take(&mut self.work);
        match self.grid.dim() {
            2 => {
                self.lines(data, dir);
                transpose::transpose(data, &mut work, n, n);
                self.lines(&mut work, dir);
                transpose::transpose(&work, data, n, n);
            }
            _ => {
                let slab = n * n;
                self.lines(data, dir);
                for (src, dst) in data.chunks_mut(slab).zip(work.chunks_mut(slab)) {
                    transpose::transpose(src, dst, n, n);
                }
                self.lines(&mut work, dir);
                for (src, dst) in work.chunks(slab).zip(data.chunks_mut(slab)) {
                    transpose::transpose(src, dst, n, n);
                }
                transpose::transpose(data, &mut work, slab, n);
                self.lines(&mut work, dir);
                transpose::transpose(&work, data, n, slab);
            }
        }
        self.work = work;
    }

    /// Evaluates up to two Hermitian coefficient arrays on the grid.
    pub fn to_physical_pair(
        &mut self,
        a: &[Complex64],
        b: Option<&[Complex64]>,
        out_a: &mut [f64],
        out_b: Option<&mut [f64]>,
    ) {
        let mut pack = std::mem::take(&mut self.pack);
        match b {
            Some(b) => {
                for ((p, &x), &y) in pack.iter_mut().zip(a).zip(b) {
                    *p = Complex64::new(x.re - y.im, x.im + y.re);
                }
            }
            None => pack.copy_from_slice(a),
        }
        self.transform(&mut pack, Direction::Inverse);
        for (o, p) in out_a.iter_mut().zip(&pack) {
            *o = p.re;
        }
        if let Some(out_b) = out_b {
            for (o, p) in out_b.iter_mut().zip(&pack) {
                *o = p.im;
            }
        }
        self.pack = pack;
    }

    /// Fourier coefficients of up to two real grid functions.
    pub fn to_spectral_pair(
        &mut self,
        a: &[f64],
        b: Option<&[f64]>,
        out_a: &mut [Complex64],
        out_b: Option<&mut [Complex64]>,
    ) {
        let mut pack = std::mem::take(&mut self.pack);
        match b {
            Some(b) => {
                for ((p, &x), &y) in pack.iter_mut().zip(a).zip(b) {
                    *p = Complex64::new(x, y);
                }
            }
            None => {
                for (p, &x) in pack.iter_mut().zip(a) {
                    *p = Complex64::new(x, 0.0);
                }
            }
        }
        self.transform(&mut pack, Direction::Forward);
        let scale = 1.0 / self.grid.len() as f64;
        match out_b {
            Some(out_b) => {
                for flat in 0..pack.len() {
                    let z = pack[flat];
                    let zm = pack[self.mirror[flat]].conj();
                    out_a[flat] = (z + zm) * (0.5 * scale);
                    let d = (z - zm) * (0.5 * scale);
                    out_b[flat] = Complex64::new(d.im, -d.re);
                }
            }
            None => {
                for flat in 0..pack.len() {
                    let z = pack[flat];
                    let zm = pack[self.mirror[flat]].conj();
                    out_a[flat] = (z + zm) * (0.5 * scale);
                }
            }
        }
        self.pack = pack;
    }

    /// Evaluates a list of coefficient arrays on the grid, two per transform.
    pub fn to_physical_many(&mut self, inputs: &[&[Complex64]], outputs: &mut [Vec<f64>]) {
        assert_eq!(inputs.len(), outputs.len());
        let mut i = 0;
        while i < inputs.len() {
            if i + 1 < inputs.len() {
                let (lo, hi) = outputs.split_at_mut(i + 1);
                self.to_physical_pair(inputs[i], Some(inputs[i + 1]), &mut lo[i], Some(&mut hi[0]));
                i += 2;
            } else {
                self.to_physical_pair(inputs[i], None, &mut outputs[i], None);
                i += 1;
            }
        }
    }

    /// Fourier coefficients of a list of real grid functions, two per transform.
    pub fn to_spectral_many(&mut self, inputs: &[&[f64]], outputs: &mut [&mut [Complex64]]) {
        assert_eq!(inputs.len(), outputs.len());
        let mut i = 0;
        while i < inputs.len() {
            if i + 1 < inputs.len() {
                let (lo, hi) = outputs.split_at_mut(i + 1);
                self.to_spectral_pair(inputs[i], Some(inputs[i + 1]), lo[i], Some(&mut *hi[0]));
                i += 2;
            } else {
                self.to_spectral_pair(inputs[i], None, outputs[i], None);
                i += 1;
            }
        }
    }
}
