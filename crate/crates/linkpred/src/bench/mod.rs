//! Config-driven benchmark orchestration used by the `linkpred` binary.
//!
//! A run is described by one TOML file ([`RunConfig`]) plus optional CLI
//! overrides; everything downstream — filtering, sampling, evaluation,
//! reports — derives deterministically from the effective config and the
//! dataset bytes.

mod config;
mod pipeline;
pub mod report;

use thiserror::Error;

pub use config::{
    parse_window, ComparisonKind, DatasetSection, EvaluationSection, FilterSection, OutputSection,
    Overrides, RunConfig, SampleModeKind, SampleSection,
};
pub use pipeline::{
    build_samples, load_and_filter, prepare_graph, run_bench, run_filter, run_residual_curve,
    run_sample, run_stats, with_pool, BenchOutput, FilterBreakdown, FilterOutput, FullLoad,
    GraphStats, PreparedGraph, RawStats, ResidualCurveOutput, SampleOutput, StatsReport,
};

#[derive(Debug, Error)]
pub enum BenchError {
    /// Configuration problems; the CLI exits with code 2 on these.
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Load(#[from] crate::ingest::LoadError),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
    #[error(transparent)]
    Sample(#[from] crate::sampling::SampleError),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("pipeline error: {0}")]
    Pipeline(String),
}

impl BenchError {
    /// CLI exit code: 2 for bad configuration, 1 for pipeline failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 2,
            _ => 1,
        }
    }
}
