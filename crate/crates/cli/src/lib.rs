//! Command-line driver for the ring-scoring engine: configuration, calibration,
//! per-shot scoring, synthetic scenes and the accuracy benchmark.

pub mod benchmark;
pub mod calibration;
pub mod commands;
pub mod config;
pub mod error;
pub mod pipeline;
pub mod presets;
pub mod scenario;

pub use benchmark::{format_table, run_bench, AccuracyRow, BenchReport, ShotResult};
pub use calibration::{calibrate_camera, CalibrationFile};
pub use commands::score::SessionLog;
pub use commands::synth::GroundTruth;
pub use config::{CameraConfig, Config, Params, ScoringMode};
pub use error::CliError;
pub use scenario::{PlannedShot, Scenario, ShotGenerator, ShotSource, TruthShot};
