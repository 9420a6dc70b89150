//! Round-based execution of the classifiers, scoring and batch runs.

mod experiment;
mod gather;
mod metrics;

pub use experiment::{
    calibrate_mis_threshold, circle_length_histogram, run_algorithm, run_experiment, run_experiments, write_csv,
    AlgorithmRun, AlgorithmSpec, Calibration, MetricsReport, Trial, TrialRow,
};
pub use gather::{run_gather_phase, run_gather_phase_among, MessageLedger, PhaseLedger};
pub use metrics::{evaluate, Metrics};
