//! Initial data generators and the exact linear oracle.

mod generators;
mod oracle;

pub use generators::{
    decay_character_data, decay_character_data_with_cutoff, decay_character_exponent, default_cutoff,
    random_solenoidal, rescale_for_smallness, taylor_green, SpectrumEnvelope, SMALLNESS_SAFETY,
};
pub use oracle::{expm, linear_oracle_evolve, reduced_mode_matrix, OracleState};
