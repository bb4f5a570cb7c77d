//! Periodic grids, Fourier-coefficient fields and their differential operators.

mod field;
mod grid;
pub mod io;
mod transform;

pub use field::{SobolevSeminorm, SpectralField};
pub use grid::Grid;
pub use transform::FftEngine;
