//! Oculomotor plant simulation and parameter estimation.
//!
//! The pipeline: ingest recorded eye positions ([`trajectory`]), cut them
//! into saccades, then fit each saccade with a linear two-muscle plant
//! model ([`model`]) by simplex search over a trajectory-matching
//! objective ([`estimation`]), in parallel across saccades with results
//! identical to a serial run. [`report`] computes performance metrics and
//! the fixed-format results CSV; [`synthetic`] builds deterministic
//! workloads for benchmarks and tests.

pub mod error;
pub mod estimation;
pub mod model;
pub mod report;
pub mod synthetic;
pub mod trajectory;

pub use error::{Error, Result};
pub use estimation::{
    cpu_check, estimate_batch, estimate_saccade, initial_simplex, nelder_mead, objective,
    EstimationConfig, EstimationResult, ExitReason, SaccadeObjective, SearchOutcome, SimplexState,
};
pub use model::{
    default_opc, lookup_model, register_model, simulate, ControlSignal, ModelSpec, OpcVector,
    PlantState, SimulatedTrajectory, MODEL_18, MODEL_9,
};
pub use report::{
    accuracy, benchmark, format_benchmark_text, speedup, throughput, write_benchmark_csv,
    write_results_csv, RunStats, BENCH_CSV_HEADER, RESULTS_CSV_HEADER,
};
pub use synthetic::{settled_saccade, synthetic_batch};
pub use trajectory::{
    classify_ivt, clean, compute_velocity, detect_saccades, extract_saccades, filter_saccades,
    parse_recording, RecordingSample, SaccadeTrajectory, SampleClass, DEFAULT_IVT_THRESHOLD,
    DEFAULT_MIN_AMPLITUDE_DEG, DEFAULT_MIN_DURATION_MS,
};
