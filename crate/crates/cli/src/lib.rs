//! The `emu` command-line front end: run configuration, circuit execution,
//! sampling, tomography, fidelity ensembles and resource estimates, all
//! emitted as CSV.

pub mod cli;
pub mod commands;
pub mod config;
pub mod estimate;
pub mod state;

pub use commands::{
    cmd_estimate, cmd_fidelity, cmd_run, cmd_sample, cmd_tomo, tomography, RunReport, SourceKind, TomoOptions,
    TomoReport,
};
pub use config::{BackendKind, FirConfig, RunConfig};
pub use estimate::{resource_estimate, ResourceEstimate};
pub use state::{demo_state, parse_state};
