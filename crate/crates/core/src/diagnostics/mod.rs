//! Synchronization error, energy budget, decay fits and threshold constants.

mod bounds;
mod energy;
mod epsilon;
mod fit;
mod hypothesis;
mod monotone;
mod sync;

pub use bounds::{smallness_margin, t_doublestar_bound_3d, BoundConstants, SmallnessMargin};
pub use energy::{energy_check, energy_check_all_pairs, EnergyCheck, ENERGY_TOLERANCE};
pub use epsilon::{
    elliptic_operator, epsilon_field, epsilon_residual, epsilon_transport_terms, EpsilonResidual,
};
pub use fit::{fit_decay_exponent, fit_power_law, DecayFit, CURVATURE_THRESHOLD, MIN_FIT_SAMPLES};
pub use hypothesis::DecayHypothesis;
pub use monotone::{monotone_onset_of, monotonicity_onset, MONOTONE_TOLERANCE};
pub use sync::{
    band_ratio, ratio_trend, sync_report, validity_window, CheckRecord, Predictions, SyncOptions,
    SyncReport, ValidityWindow, SLOPE_TOL_LINEAR, SLOPE_TOL_NONLINEAR,
};
