//! Config-driven experiments: initial data, simulation, CSV output and checks.

mod config;
mod experiment;

pub use config::{
    load_config, parse_config, parse_hypothesis, parse_key_values, CheckName, ExperimentSpec, InitKind, InitSpec,
    KNOWN_KEYS,
};
pub use experiment::{
    emit_csv, initial_state, oracle_deviation, run_experiment, series_check, Environment, Report, RunContext,
    EPSILON_RESIDUAL_TOLERANCE, ORACLE_TOLERANCE,
};
