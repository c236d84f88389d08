//! Bipartite link prediction for user-venue check-in networks.
//!
//! The crate covers the full experiment loop for venue recommendation on
//! check-in data:
//!
//! * [`ingest`] — parse tab-separated check-in dumps into validated records.
//! * [`graph`] — the bipartite multigraph (users, venues, per-pair check-in
//!   counts), degree-based filters and a one-mode user projection.
//! * [`sampling`] — positive/negative evaluation pair sets via random batch
//!   holdout or time windows, plus structure-loss measurement.
//! * [`predict`] — the scoring methods: global ranking, assortativity,
//!   collaborative filtering with Adamic-Adar similarity, network-based
//!   inference (resource allocation) and its metadata/time variants, and
//!   two metadata baselines.
//! * [`eval`] — AUC over a sample for any configured predictor, exact or
//!   comparison-sampled, in batch or incremental (remove/score/restore) mode.
//! * [`bench`] — config-driven orchestration used by the `linkpred` binary:
//!   ingest, filter, sample, evaluate, report to plot-ready CSV.
//!
//! Every step is deterministic given its seed, so whole benchmark grids can
//! be reproduced from a config file alone. See the crate examples for one
//! runnable program per capability (`cargo run --example random_holdout_auc`).

pub mod bench;
pub mod eval;
pub mod graph;
pub mod ingest;
pub mod predict;
pub mod sampling;
pub mod synth;

#[cfg(test)]
pub(crate) mod testfix;

pub use eval::{auc_from_scores, evaluate_auc, evaluate_grid, AucReport, ComparisonMode};
pub use graph::{BipartiteGraph, DegreeKind, Degrees, UserIdx, VenueIdx};
pub use ingest::{load_dataset, parse_checkin_line, CheckIn, DatasetStats, Schema};
pub use predict::{Method, PredictorConfig, ScoreVector, Scorer};
pub use sampling::{residual_checkin_curve, sample_random, sample_time, EvalSample, PairWeighting};
