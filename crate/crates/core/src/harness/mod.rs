//! Experiment plumbing: configs, seeding, replicated runs, reports and the
//! verification suites.

pub mod config;
pub mod emit;
pub mod report;
pub mod runner;
pub mod seed;
pub mod verify;

pub use config::{ArmSpec, Benchmark, ConvexLosses, CorruptionSpec, EnvSpec, ExperimentConfig, PolicyKind};
pub use emit::{emit_all, emit_report, write_trace, Format};
pub use report::{BoundComparison, CurvePoint, Report};
pub use runner::{
    baseline, drive_bandit, drive_btrl, drive_convex, drive_linear, replicate, replicate_serial,
    run_experiment, run_replication, Baseline,
};
pub use verify::{verify_suite, Suite, SuiteReport};
