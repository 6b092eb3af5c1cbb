//! Run configuration, the time loop and output files.

mod config;
mod output;
mod run;

pub use config::{parse_config, RunConfig};
pub use output::{
    read_diagnostics, read_snapshot_field, snapshot_file_name, write_diagnostics, write_snapshot, DiagnosticRecord,
    OutputDir, DIAGNOSTICS_HEADER,
};
pub use run::{run_simulation, RunOutcome, Simulation, StepStats};
