//! Configuration, orchestration and output of the deformation experiment.

pub mod cli;
pub mod config;
pub mod emit;
pub mod run;

pub use config::{load_config, parse_config, ConfigError, ConfigIssue, ExperimentConfig, NumberFormat};
pub use emit::{emit, records_to_string, write_records, Summary, UniformBounds, RECORD_COLUMNS};
pub use run::{
    evolution_cross_check, report_t0, run_deformation_experiment, static_frame_report, SliceStatus,
    TimeSliceRecord,
};
