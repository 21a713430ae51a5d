//! Experiment harness for the `sincd` estimators: parameter sweeps, identity
//! verification, moment and coverage studies, and estimation from external
//! counts files. The `sincd` binary is a thin wrapper over [`cli::run`].

pub mod cli;
pub mod config;
pub mod counts;
pub mod coverage;
pub mod estimate;
pub mod moments;
pub mod sweep;
pub mod verify;
