//! The ingest -> filter -> sample -> evaluate -> report pipeline behind the
//! CLI subcommands.
//!
//! Filtered graphs and samples are cached under `<out>/cache`, keyed by a
//! hash of everything that determines them (dataset bytes, schema, filter
//! parameters, sampling parameters, seed), so repeated benchmark runs skip
//! the expensive stages. Every output is deterministic for a fixed effective
//! config except the wall-time column of the results table.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::eval::{evaluate_grid, ComparisonMode};
use crate::graph::BipartiteGraph;
use crate::ingest::{load_dataset, DatasetStats};
use crate::sampling::{
    mix_seed, residual_checkin_curve, sample_random_with, sample_time_with, EvalSample,
    SampleOptions,
};

use super::config::{ComparisonKind, RunConfig, SampleModeKind};
use super::report::{
    curve_points, degree_histogram, write_curve_csv, write_histogram_csv, write_manifest,
    write_residual_csv, write_results_csv, Manifest, ResidualRow, ResultRow,
};
use super::BenchError;

/// Run a closure on a dedicated rayon pool of `workers` threads; 0 uses the
/// default global pool.
pub fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        return f();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("worker pool")
        .install(f)
}

/// Edge and check-in counts at each filter stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterBreakdown {
    pub raw_pairs: u64,
    pub raw_checkins: u64,
    pub after_degree_pairs: u64,
    pub after_degree_checkins: u64,
    pub final_pairs: u64,
    pub final_checkins: u64,
}

impl FilterBreakdown {
    /// Fraction of distinct edges removed by the degree filter alone.
    pub fn degree_removed_pair_fraction(&self) -> f64 {
        1.0 - self.after_degree_pairs as f64 / self.raw_pairs as f64
    }

    /// Further fraction of the original distinct edges removed by the
    /// dominance filter.
    pub fn dominance_removed_pair_fraction(&self) -> f64 {
        (self.after_degree_pairs - self.final_pairs) as f64 / self.raw_pairs as f64
    }

    pub fn degree_removed_checkin_fraction(&self) -> f64 {
        1.0 - self.after_degree_checkins as f64 / self.raw_checkins as f64
    }

    pub fn dominance_removed_checkin_fraction(&self) -> f64 {
        (self.after_degree_checkins - self.final_checkins) as f64 / self.raw_checkins as f64
    }
}

/// Full (uncached) load: parse, build, filter, measure.
pub struct FullLoad {
    pub raw_stats: DatasetStats,
    pub skipped_lines: u64,
    pub raw_graph: BipartiteGraph,
    pub filtered: BipartiteGraph,
    pub breakdown: FilterBreakdown,
}

pub fn load_and_filter(config: &RunConfig) -> Result<FullLoad, BenchError> {
    let path = config.dataset_path()?;
    let loaded = load_dataset(path, &config.dataset.schema, config.dataset.on_error)?;
    let raw_graph = BipartiteGraph::from_checkins(&loaded.checkins);
    let after_degree =
        raw_graph.filter_low_degree_venues(config.filter.min_degree, config.filter.degree_kind);
    let filtered = after_degree.filter_dominated_venues(config.filter.dominance);
    let breakdown = FilterBreakdown {
        raw_pairs: raw_graph.n_pairs() as u64,
        raw_checkins: raw_graph.n_checkins(),
        after_degree_pairs: after_degree.n_pairs() as u64,
        after_degree_checkins: after_degree.n_checkins(),
        final_pairs: filtered.n_pairs() as u64,
        final_checkins: filtered.n_checkins(),
    };
    Ok(FullLoad {
        raw_stats: loaded.stats,
        skipped_lines: loaded.skipped_lines,
        raw_graph,
        filtered,
        breakdown,
    })
}

/// Serialize the graph to TSV bytes and hash them; the manifest checksum.
fn graph_checksum(g: &BipartiteGraph) -> (Vec<u8>, String) {
    let mut bytes = Vec::new();
    g.write_edge_tsv(&mut bytes).expect("in-memory write");
    let digest = hex::encode(Sha256::digest(&bytes));
    (bytes, digest)
}

/// A filtered graph ready for sampling, from cache when possible.
pub struct PreparedGraph {
    pub graph: BipartiteGraph,
    pub graph_key: String,
    pub checksum: String,
    pub cache_hit: bool,
}

pub fn prepare_graph(config: &RunConfig) -> Result<PreparedGraph, BenchError> {
    let graph_key = config.graph_key()?;
    let cache_dir = config.output.dir.join("cache");
    let edges_path = cache_dir.join(format!("graph-{graph_key}.tsv"));
    let times_path = cache_dir.join(format!("graph-{graph_key}.times.tsv"));
    if config.output.cache && edges_path.exists() && times_path.exists() {
        let edges = BufReader::new(File::open(&edges_path)?);
        let times = BufReader::new(File::open(&times_path)?);
        let graph = BipartiteGraph::read_edge_tsv(edges, Some(times))?;
        let (_, checksum) = graph_checksum(&graph);
        return Ok(PreparedGraph {
            graph,
            graph_key,
            checksum,
            cache_hit: true,
        });
    }
    let full = load_and_filter(config)?;
    let (bytes, checksum) = graph_checksum(&full.filtered);
    if config.output.cache {
        fs::create_dir_all(&cache_dir)?;
        fs::write(&edges_path, &bytes)?;
        let mut times = BufWriter::new(File::create(&times_path)?);
        full.filtered.write_times_tsv(&mut times)?;
        times.flush()?;
    }
    Ok(PreparedGraph {
        graph: full.filtered,
        graph_key,
        checksum,
        cache_hit: false,
    })
}

/// Grid of samples according to the config: fractions x seeds in random
/// mode, windows x seeds in time mode. Cached to TSV when enabled.
pub fn build_samples(
    config: &RunConfig,
    g: &BipartiteGraph,
    graph_key: &str,
) -> Result<Vec<EvalSample>, BenchError> {
    let cache_dir = config.output.dir.join("cache");
    if config.output.cache {
        fs::create_dir_all(&cache_dir)?;
    }
    let options = SampleOptions {
        weighting: config.sample.weighting,
        negatives_per_positive: config.sample.negatives_per_positive,
    };
    let mut samples = Vec::new();
    match config.sample.mode {
        SampleModeKind::Random => {
            for &seed in &config.sample.seeds {
                for (idx, &fraction) in config.sample.fractions.iter().enumerate() {
                    let actual_seed = if config.sample.nested {
                        seed
                    } else {
                        mix_seed(seed, idx as u64)
                    };
                    let material = format!(
                        "{graph_key}|random|{fraction}|{actual_seed}|{:?}|{}",
                        config.sample.weighting, config.sample.negatives_per_positive
                    );
                    let key = super::config::short_hash(material.as_bytes());
                    let path = cache_dir.join(format!("sample-f{fraction}-s{seed}-{key}.tsv"));
                    if config.output.cache && path.exists() {
                        let reader = BufReader::new(File::open(&path)?);
                        samples.push(EvalSample::read_tsv(reader)?);
                        continue;
                    }
                    let (sample, _residual) =
                        sample_random_with(g, fraction, actual_seed, &options)?;
                    if config.output.cache {
                        let mut out = BufWriter::new(File::create(&path)?);
                        sample.write_tsv(&mut out)?;
                        out.flush()?;
                    }
                    samples.push(sample);
                }
            }
        }
        SampleModeKind::Time => {
            let windows = config.parsed_windows()?;
            for &seed in &config.sample.seeds {
                for &(start, end) in &windows {
                    let material = format!(
                        "{graph_key}|time|{start}|{end}|{seed}|{:?}|{}",
                        config.sample.max_positives, config.sample.negatives_per_positive
                    );
                    let key = super::config::short_hash(material.as_bytes());
                    let path =
                        cache_dir.join(format!("sample-w{start}-{end}-s{seed}-{key}.tsv"));
                    if config.output.cache && path.exists() {
                        let reader = BufReader::new(File::open(&path)?);
                        samples.push(EvalSample::read_tsv(reader)?);
                        continue;
                    }
                    let sample = sample_time_with(
                        g,
                        (start, end),
                        seed,
                        config.sample.max_positives,
                        config.sample.negatives_per_positive,
                    )?;
                    if config.output.cache {
                        let mut out = BufWriter::new(File::create(&path)?);
                        sample.write_tsv(&mut out)?;
                        out.flush()?;
                    }
                    samples.push(sample);
                }
            }
        }
    }
    Ok(samples)
}

/// `stats` output, printed as one JSON object.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatsReport {
    pub dataset: PathBuf,
    pub raw: RawStats,
    pub filtered: GraphStats,
    pub filter_breakdown: FilterBreakdown,
    pub histogram_files: Vec<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawStats {
    pub n_checkins: u64,
    pub n_users: u64,
    pub n_venues: u64,
    pub time_min: Option<i64>,
    pub time_max: Option<i64>,
    pub skipped_lines: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphStats {
    pub n_users: u64,
    pub n_venues: u64,
    pub n_checkins: u64,
    pub n_pairs: u64,
}

fn graph_stats(g: &BipartiteGraph) -> GraphStats {
    GraphStats {
        n_users: g.n_users() as u64,
        n_venues: g.n_venues() as u64,
        n_checkins: g.n_checkins(),
        n_pairs: g.n_pairs() as u64,
    }
}

/// Dataset and graph statistics plus degree-distribution histograms.
pub fn run_stats(config: &RunConfig) -> Result<StatsReport, BenchError> {
    let full = load_and_filter(config)?;
    fs::create_dir_all(&config.output.dir)?;
    let raw_hist = config.output.dir.join("degree_hist_raw.csv");
    let filtered_hist = config.output.dir.join("degree_hist_filtered.csv");
    write_histogram_csv(&raw_hist, &degree_histogram(&full.raw_graph))?;
    write_histogram_csv(&filtered_hist, &degree_histogram(&full.filtered))?;
    Ok(StatsReport {
        dataset: config.dataset_path()?.to_path_buf(),
        raw: RawStats {
            n_checkins: full.raw_stats.n_checkins,
            n_users: full.raw_stats.n_users,
            n_venues: full.raw_stats.n_venues,
            time_min: full.raw_stats.time_min,
            time_max: full.raw_stats.time_max,
            skipped_lines: full.skipped_lines,
        },
        filtered: graph_stats(&full.filtered),
        filter_breakdown: full.breakdown,
        histogram_files: vec![raw_hist, filtered_hist],
    })
}

/// `filter` output: the materialized graph files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilterOutput {
    pub edges: PathBuf,
    pub times: PathBuf,
    pub checksum: String,
    pub stats: GraphStats,
}

/// Materialize the filtered graph as a TSV edge list plus times file.
pub fn run_filter(config: &RunConfig) -> Result<FilterOutput, BenchError> {
    let prepared = prepare_graph(config)?;
    fs::create_dir_all(&config.output.dir)?;
    let edges = config.output.dir.join("graph.tsv");
    let times = config.output.dir.join("graph.times.tsv");
    let mut out = BufWriter::new(File::create(&edges)?);
    prepared.graph.write_edge_tsv(&mut out)?;
    out.flush()?;
    let mut out = BufWriter::new(File::create(&times)?);
    prepared.graph.write_times_tsv(&mut out)?;
    out.flush()?;
    Ok(FilterOutput {
        edges,
        times,
        checksum: prepared.checksum,
        stats: graph_stats(&prepared.graph),
    })
}

/// `sample` output: materialized sample files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleOutput {
    pub files: Vec<PathBuf>,
    pub n_samples: usize,
}

/// Materialize the configured sample grid to `<out>/samples/`.
pub fn run_sample(config: &RunConfig) -> Result<SampleOutput, BenchError> {
    config.validate_sampling()?;
    let prepared = prepare_graph(config)?;
    let samples = build_samples(config, &prepared.graph, &prepared.graph_key)?;
    let dir = config.output.dir.join("samples");
    fs::create_dir_all(&dir)?;
    let mut files = Vec::new();
    for (i, sample) in samples.iter().enumerate() {
        let label = sample.mode.short_label().replace([':', '.'], "_");
        let path = dir.join(format!("sample-{i:03}-{label}-s{}.tsv", sample.seed));
        let mut out = BufWriter::new(File::create(&path)?);
        sample.write_tsv(&mut out)?;
        out.flush()?;
        files.push(path);
    }
    Ok(SampleOutput {
        n_samples: files.len(),
        files,
    })
}

/// `residual-curve` output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualCurveOutput {
    pub file: PathBuf,
    pub rows: Vec<ResidualRow>,
    pub filtered_checkins: u64,
}

/// Structure-loss curve: residual check-ins per holdout fraction.
pub fn run_residual_curve(config: &RunConfig) -> Result<ResidualCurveOutput, BenchError> {
    if config.sample.fractions.is_empty() {
        return Err(BenchError::Config(
            "residual-curve needs a fraction grid".into(),
        ));
    }
    let prepared = prepare_graph(config)?;
    let seed = config.sample.seeds.first().copied().unwrap_or(0);
    let options = SampleOptions {
        weighting: config.sample.weighting,
        negatives_per_positive: config.sample.negatives_per_positive,
    };
    let curve = residual_checkin_curve(
        &prepared.graph,
        &config.sample.fractions,
        seed,
        config.sample.nested,
        &options,
    )?;
    let rows: Vec<ResidualRow> = curve
        .into_iter()
        .map(|(fraction, remaining_checkins)| ResidualRow {
            fraction,
            remaining_checkins,
        })
        .collect();
    fs::create_dir_all(&config.output.dir)?;
    let file = config.output.dir.join("residual_curve.csv");
    write_residual_csv(&file, &rows)?;
    Ok(ResidualCurveOutput {
        file,
        rows,
        filtered_checkins: prepared.graph.n_checkins(),
    })
}

/// `bench` output: result rows plus where everything was written.
#[derive(Debug, Clone)]
pub struct BenchOutput {
    pub results_file: PathBuf,
    pub curve_files: Vec<PathBuf>,
    pub manifest_file: PathBuf,
    pub rows: Vec<ResultRow>,
    pub n_failed_cells: usize,
}

/// The full benchmark: prepare, sample, evaluate the grid, report.
pub fn run_bench(config: &RunConfig) -> Result<BenchOutput, BenchError> {
    config.validate_for_bench()?;
    let prepared = prepare_graph(config)?;
    let samples = build_samples(config, &prepared.graph, &prepared.graph_key)?;
    let mode = match config.evaluation.comparison {
        ComparisonKind::Exact => ComparisonMode::Exact,
        ComparisonKind::Sampled => ComparisonMode::Sampled {
            n: config.evaluation.sampled_comparisons,
            seed: config.sample.seeds.first().copied().unwrap_or(0),
        },
    };
    let cells = with_pool(config.evaluation.workers, || {
        evaluate_grid(&prepared.graph, &samples, &config.predictors, mode)
    });

    let rows: Vec<ResultRow> = cells
        .iter()
        .map(|cell| {
            let sample = &samples[cell.sample_index];
            ResultRow::from_cell(cell, &sample.mode, sample.seed)
        })
        .collect();
    let n_failed_cells = rows.iter().filter(|r| r.error.is_some()).count();

    fs::create_dir_all(&config.output.dir)?;
    let results_file = config.output.dir.join("results.csv");
    write_results_csv(&results_file, &rows)?;

    let mut curve_files = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for predictor in &config.predictors {
        let name = predictor.method.name();
        if !seen.insert(name) {
            continue;
        }
        let points = curve_points(&rows, name);
        let path = config.output.dir.join(format!("curve_{name}.csv"));
        write_curve_csv(&path, &points)?;
        curve_files.push(path);
    }

    let manifest_file = config.output.dir.join("manifest.json");
    write_manifest(
        &manifest_file,
        &Manifest {
            config_hash: config.config_hash(),
            graph_key: prepared.graph_key.clone(),
            filtered_graph_checksum: prepared.checksum.clone(),
            seeds: config.sample.seeds.clone(),
            dataset_sha256: super::config::hash_file(config.dataset_path()?)?,
            n_users: prepared.graph.n_users() as u64,
            n_venues: prepared.graph.n_venues() as u64,
            n_checkins: prepared.graph.n_checkins(),
            n_pairs: prepared.graph.n_pairs() as u64,
            config: config.clone(),
        },
    )?;

    Ok(BenchOutput {
        results_file,
        curve_files,
        manifest_file,
        rows,
        n_failed_cells,
    })
}
