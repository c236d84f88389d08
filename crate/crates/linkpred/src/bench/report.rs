//! Plot-ready output files: the per-cell results table, per-method curves,
//! degree histograms and the run manifest.

use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::eval::{AucReport, GridCell};
use crate::graph::{BipartiteGraph, Degrees};
use crate::sampling::SampleMode;

use super::BenchError;

/// One row of `results.csv`. Failed cells leave `auc` empty and carry the
/// message in `error`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub method: String,
    pub mode: String,
    pub fraction_or_window: String,
    pub seed: u64,
    pub n_pos: u64,
    pub n_neg: u64,
    pub auc: Option<f64>,
    pub wall_time: f64,
    pub error: Option<String>,
}

impl ResultRow {
    pub fn from_report(report: &AucReport) -> Self {
        let (mode, fraction_or_window) = mode_columns(&report.sample_mode);
        ResultRow {
            method: report.method.method.name().to_string(),
            mode,
            fraction_or_window,
            seed: report.sample_seed,
            n_pos: report.n_pos,
            n_neg: report.n_neg,
            auc: Some(report.auc),
            wall_time: report.wall_time_secs,
            error: None,
        }
    }

    pub fn from_cell(cell: &GridCell, sample_mode: &SampleMode, sample_seed: u64) -> Self {
        match &cell.result {
            Ok(report) => ResultRow::from_report(report),
            Err(err) => {
                let (mode, fraction_or_window) = mode_columns(sample_mode);
                ResultRow {
                    method: cell.method.method.name().to_string(),
                    mode,
                    fraction_or_window,
                    seed: sample_seed,
                    n_pos: 0,
                    n_neg: 0,
                    auc: None,
                    wall_time: 0.0,
                    error: Some(err.to_string()),
                }
            }
        }
    }
}

fn mode_columns(mode: &SampleMode) -> (String, String) {
    match mode {
        SampleMode::RandomBatch { fraction, .. } => ("random".into(), fraction.to_string()),
        SampleMode::TimeIncremental { start, end } => ("time".into(), format!("{start}:{end}")),
    }
}

pub fn write_results_csv(path: &Path, rows: &[ResultRow]) -> Result<(), BenchError> {
    let mut writer = csv::Writer::from_path(path)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Strict parse of a results file; round-trips [`write_results_csv`].
pub fn read_results_csv(path: &Path) -> Result<Vec<ResultRow>, BenchError> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for row in reader.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

/// One point of a per-method curve: mean AUC over seeds at one grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub fraction_or_window: String,
    pub auc: f64,
    pub n_seeds: u64,
}

/// Average successful rows per (method, grid point); row order follows first
/// appearance, so curves come out in grid order.
pub fn curve_points(rows: &[ResultRow], method: &str) -> Vec<CurvePoint> {
    let mut order: Vec<String> = Vec::new();
    let mut sums: std::collections::HashMap<String, (f64, u64)> = std::collections::HashMap::new();
    for row in rows.iter().filter(|r| r.method == method) {
        if let Some(auc) = row.auc {
            let entry = sums.entry(row.fraction_or_window.clone()).or_insert_with(|| {
                order.push(row.fraction_or_window.clone());
                (0.0, 0)
            });
            entry.0 += auc;
            entry.1 += 1;
        }
    }
    order
        .into_iter()
        .map(|key| {
            let (sum, n) = sums[&key];
            CurvePoint {
                fraction_or_window: key,
                auc: sum / n as f64,
                n_seeds: n,
            }
        })
        .collect()
}

pub fn write_curve_csv(path: &Path, points: &[CurvePoint]) -> Result<(), BenchError> {
    let mut writer = csv::Writer::from_path(path)?;
    for p in points {
        writer.serialize(p)?;
    }
    writer.flush()?;
    Ok(())
}

/// Log-binned degree histogram row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub kind: String,
    pub degree_kind: String,
    pub bin_lo: u64,
    /// Exclusive upper bound.
    pub bin_hi: u64,
    pub count: u64,
}

/// Histogram with bins [0,1), [1,2), [2,4), [4,8), ... per node side and
/// degree kind. Counts per (kind, degree_kind) sum to the node count.
pub fn degree_histogram(g: &BipartiteGraph) -> Vec<HistogramRow> {
    let mut rows = Vec::new();
    let user_degrees: Vec<Degrees> = g.users().map(|u| g.user_degrees(u)).collect();
    let venue_degrees: Vec<Degrees> = g.venues().map(|v| g.venue_degrees(v)).collect();
    for (kind, degrees) in [("user", &user_degrees), ("venue", &venue_degrees)] {
        for degree_kind in ["binary", "weighted"] {
            let values: Vec<u64> = degrees
                .iter()
                .map(|d| match degree_kind {
                    "binary" => d.binary as u64,
                    _ => d.weighted,
                })
                .collect();
            let max = values.iter().copied().max().unwrap_or(0);
            let mut bins: Vec<(u64, u64, u64)> = vec![(0, 1, 0)];
            let mut lo = 1u64;
            while lo <= max {
                bins.push((lo, lo * 2, 0));
                lo *= 2;
            }
            for value in values {
                let idx = if value == 0 {
                    0
                } else {
                    1 + value.ilog2() as usize
                };
                bins[idx].2 += 1;
            }
            for (bin_lo, bin_hi, count) in bins {
                rows.push(HistogramRow {
                    kind: kind.to_string(),
                    degree_kind: degree_kind.to_string(),
                    bin_lo,
                    bin_hi,
                    count,
                });
            }
        }
    }
    rows
}

pub fn write_histogram_csv(path: &Path, rows: &[HistogramRow]) -> Result<(), BenchError> {
    let mut writer = csv::Writer::from_path(path)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Residual-curve row (structure loss under random holdout).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub fraction: f64,
    pub remaining_checkins: u64,
}

pub fn write_residual_csv(path: &Path, rows: &[ResidualRow]) -> Result<(), BenchError> {
    let mut writer = csv::Writer::from_path(path)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_residual_csv(path: &Path) -> Result<Vec<ResidualRow>, BenchError> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for row in reader.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

/// Run provenance written next to the results. Deterministic for identical
/// effective configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_hash: String,
    pub graph_key: String,
    pub filtered_graph_checksum: String,
    pub seeds: Vec<u64>,
    pub dataset_sha256: String,
    pub n_users: u64,
    pub n_venues: u64,
    pub n_checkins: u64,
    pub n_pairs: u64,
    /// The effective configuration the run used, overrides and materialized
    /// seeds included.
    pub config: crate::bench::RunConfig,
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<(), BenchError> {
    let file = File::create(path)?;
    serde_json::to_writer_pretty(file, manifest)
        .map_err(|e| BenchError::Pipeline(format!("manifest write failed: {e}")))?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<Manifest, BenchError> {
    let raw = std::fs::read_to_string(path)?;
    serde_json::from_str(&raw).map_err(|e| BenchError::Pipeline(format!("bad manifest: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfix::toy_graph;

    #[test]
    fn histogram_counts_sum_to_node_counts() {
        let g = toy_graph();
        let rows = degree_histogram(&g);
        for (kind, expected) in [("user", g.n_users() as u64), ("venue", g.n_venues() as u64)] {
            for degree_kind in ["binary", "weighted"] {
                let total: u64 = rows
                    .iter()
                    .filter(|r| r.kind == kind && r.degree_kind == degree_kind)
                    .map(|r| r.count)
                    .sum();
                assert_eq!(total, expected, "{kind}/{degree_kind}");
            }
        }
    }

    #[test]
    fn curve_points_average_over_seeds() {
        let mk = |fraction: &str, seed: u64, auc: f64| ResultRow {
            method: "nbi".into(),
            mode: "random".into(),
            fraction_or_window: fraction.into(),
            seed,
            n_pos: 5,
            n_neg: 5,
            auc: Some(auc),
            wall_time: 0.0,
            error: None,
        };
        let rows = vec![
            mk("0.1", 1, 0.8),
            mk("0.1", 2, 0.6),
            mk("0.2", 1, 0.9),
        ];
        let points = curve_points(&rows, "nbi");
        assert_eq!(points.len(), 2);
        assert_eq!(points[0].fraction_or_window, "0.1");
        assert!((points[0].auc - 0.7).abs() < 1e-12);
        assert_eq!(points[0].n_seeds, 2);
        assert_eq!(points[1].auc, 0.9);
        assert!(curve_points(&rows, "grm").is_empty());
    }

    #[test]
    fn results_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.csv");
        let rows = vec![
            ResultRow {
                method: "nbi".into(),
                mode: "random".into(),
                fraction_or_window: "0.1".into(),
                seed: 1,
                n_pos: 10,
                n_neg: 10,
                auc: Some(0.875),
                wall_time: 0.25,
                error: None,
            },
            ResultRow {
                method: "nbi_time".into(),
                mode: "random".into(),
                fraction_or_window: "0.1".into(),
                seed: 1,
                n_pos: 0,
                n_neg: 0,
                auc: None,
                wall_time: 0.0,
                error: Some("method nbi_time requires a sample time window".into()),
            },
        ];
        write_results_csv(&path, &rows).unwrap();
        assert_eq!(read_results_csv(&path).unwrap(), rows);
    }
}
