//! Seeded Monte Carlo sweeps, report emission and demos.

pub mod bench;
pub mod config;
pub mod demo;
pub mod report;
pub mod sweep;

pub use bench::{quantize_bench, QuantRow};
pub use config::{Architecture, Cell, ExperimentConfig, Grid, QuantizerKind, ScalarRange, SignalSection, SCHEMA_VERSION};
pub use demo::{cell_polygon, demo_signal, emit_trajectory_demo, run_demo, DemoConfig, DemoRun, DemoSignal};
pub use report::{emit, emit_tables, OutputFormat, Table};
pub use sweep::{paired_mse_gain_db, run_sweep, trial_signal, CellResult, ExperimentResult, TrialOutcome};
