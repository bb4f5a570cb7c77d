//! Time evolution of the micropolar system.

mod linear;
mod params;
mod rhs;
mod simulate;
mod state;
mod stepper;

pub use linear::{linear_mode_matrix, linear_mode_matrix_on_grid, LinearModeMatrix};
pub use params::FluidParams;
pub use rhs::{coupled_momentum_rhs, synchronized_momentum_rhs};
pub use simulate::{label, simulate, simulate_partial, SimConfig, SimOutput};
pub use state::{rotation_components, MicropolarState};
pub use stepper::{nonlinear_rhs, step, StepFlags, Stepper};
