use super::params::FluidParams;
use crate::diagnostics::epsilon_field;
use crate::error::Result;
use crate::spectral::SpectralField;

use super::state::MicropolarState;

/// Linear momentum terms in their original form, `(μ+χ)Δu + 2χ∇∧w`.
pub fn coupled_momentum_rhs(state: &MicropolarState, p: &FluidParams) -> Result<SpectralField> {
    let lap = state.u.laplacian().scaled(p.mu + p.chi);
    lap.add_scaled(&state.w.curl()?, 2.0 * p.chi)
}

/// The same terms written through the synchronization error, `μΔu + 2χ∇∧ε`.
/// Agrees with [`coupled_momentum_rhs`] whenever `u` is divergence-free.
pub fn synchronized_momentum_rhs(state: &MicropolarState, p: &FluidParams) -> Result<SpectralField> {
    let lap = state.u.laplacian().scaled(p.mu);
    lap.add_scaled(&epsilon_field(state)?.curl()?, 2.0 * p.chi)
}
