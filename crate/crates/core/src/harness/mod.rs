//! Benchmarks, plots, rate tables and the command-line front end.

pub mod bench;
pub mod cli;
pub mod svg;
pub mod table;

pub use bench::{
    aggregate_curve, dominance, initial_point, reference_factor, run_bench, run_trial, run_trials,
    summarize, write_outputs, Abscissa, BenchArtifacts, BenchRun, BenchSpec, BenchSummary,
    CurvePoint, Dominance, FactorBasis, MethodSummary, TrialOutcome,
};
pub use table::{rate_table, write_rate_table, RateRow, GAP_TOLERANCE};
