//! Declarative run configuration: one TOML file, flat sections per stage,
//! plus command-line overrides. Identical effective configs hash identically,
//! which keys the on-disk caches and the run manifest.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::DateTime;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::graph::DegreeKind;
use crate::ingest::{OnError, Schema};
use crate::predict::PredictorConfig;
use crate::sampling::PairWeighting;

use super::BenchError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DatasetSection {
    /// Path to the check-in TSV; required by every command.
    pub path: Option<PathBuf>,
    pub on_error: OnError,
    pub schema: Schema,
}

impl Default for DatasetSection {
    fn default() -> Self {
        DatasetSection {
            path: None,
            on_error: OnError::Skip,
            schema: Schema::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterSection {
    pub min_degree: u64,
    pub degree_kind: DegreeKind,
    /// Venues where one user holds at least this fraction of check-ins are
    /// dropped.
    pub dominance: f64,
}

impl Default for FilterSection {
    fn default() -> Self {
        FilterSection {
            min_degree: 20,
            degree_kind: DegreeKind::Weighted,
            dominance: 0.9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleModeKind {
    Random,
    Time,
}

impl fmt::Display for SampleModeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleModeKind::Random => write!(f, "random"),
            SampleModeKind::Time => write!(f, "time"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SampleSection {
    pub mode: SampleModeKind,
    pub fractions: Vec<f64>,
    /// Windows as `START:END`, epoch seconds or RFC 3339.
    pub windows: Vec<String>,
    /// Explicit seeds; auto-generated and echoed into the manifest if empty.
    pub seeds: Vec<u64>,
    pub weighting: PairWeighting,
    pub negatives_per_positive: f64,
    /// Reuse one permutation across the fraction grid (prefix-nested samples).
    pub nested: bool,
    /// Cap on positives per time window.
    pub max_positives: Option<usize>,
}

impl Default for SampleSection {
    fn default() -> Self {
        SampleSection {
            mode: SampleModeKind::Random,
            fractions: vec![0.05, 0.10, 0.15, 0.20, 0.25, 0.30],
            windows: Vec::new(),
            seeds: Vec::new(),
            weighting: PairWeighting::Checkin,
            negatives_per_positive: 1.0,
            nested: false,
            max_positives: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonKind {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvaluationSection {
    pub comparison: ComparisonKind,
    /// Comparison draws in sampled mode.
    pub sampled_comparisons: u64,
    /// Worker threads; 0 means one per core.
    pub workers: usize,
}

impl Default for EvaluationSection {
    fn default() -> Self {
        EvaluationSection {
            comparison: ComparisonKind::Exact,
            sampled_comparisons: 1_000_000,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// Cache filtered graphs and samples under `<dir>/cache`.
    pub cache: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("out"),
            cache: true,
        }
    }
}

/// The whole run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct RunConfig {
    pub dataset: DatasetSection,
    pub filter: FilterSection,
    pub sample: SampleSection,
    pub evaluation: EvaluationSection,
    pub output: OutputSection,
    pub predictors: Vec<PredictorConfig>,
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub dataset: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub methods: Vec<String>,
    pub fractions: Vec<f64>,
    pub windows: Vec<String>,
    pub schema: Option<String>,
}

impl RunConfig {
    pub fn from_toml_str(raw: &str) -> Result<Self, BenchError> {
        toml::from_str(raw).map_err(|e| BenchError::Config(format!("bad config: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self, BenchError> {
        let raw = fs::read_to_string(path)
            .map_err(|e| BenchError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&raw)
    }

    pub fn apply_overrides(&mut self, ov: &Overrides) -> Result<(), BenchError> {
        if let Some(path) = &ov.dataset {
            self.dataset.path = Some(path.clone());
        }
        if let Some(out) = &ov.out {
            self.output.dir = out.clone();
        }
        if let Some(seed) = ov.seed {
            self.sample.seeds = vec![seed];
        }
        if let Some(workers) = ov.workers {
            self.evaluation.workers = workers;
        }
        if !ov.methods.is_empty() {
            self.predictors = ov
                .methods
                .iter()
                .map(|name| {
                    name.parse()
                        .map(PredictorConfig::new)
                        .map_err(BenchError::Config)
                })
                .collect::<Result<_, _>>()?;
        }
        if !ov.fractions.is_empty() {
            self.sample.fractions = ov.fractions.clone();
            self.sample.mode = SampleModeKind::Random;
        }
        if !ov.windows.is_empty() {
            self.sample.windows = ov.windows.clone();
            self.sample.mode = SampleModeKind::Time;
        }
        if let Some(spec) = &ov.schema {
            self.dataset.schema = self
                .dataset
                .schema
                .parse_overrides(spec)
                .map_err(BenchError::Config)?;
        }
        Ok(())
    }

    /// Materialize auto-generated seeds so the run is reproducible from the
    /// echoed config alone.
    pub fn materialize_seeds(&mut self) {
        if self.sample.seeds.is_empty() {
            self.sample.seeds = vec![rand::random::<u64>()];
        }
    }

    pub fn dataset_path(&self) -> Result<&Path, BenchError> {
        self.dataset
            .path
            .as_deref()
            .ok_or_else(|| {
                BenchError::Config(
                    "dataset path required ([dataset] path in config or --dataset)".into(),
                )
            })
    }

    /// Parsed half-open windows from the `windows` strings.
    pub fn parsed_windows(&self) -> Result<Vec<(i64, i64)>, BenchError> {
        self.sample.windows.iter().map(|w| parse_window(w)).collect()
    }

    /// Validate everything a benchmark run needs.
    pub fn validate_for_bench(&self) -> Result<(), BenchError> {
        self.validate_sampling()?;
        if self.predictors.is_empty() {
            return Err(BenchError::Config(
                "at least one predictor required ([[predictors]] or --method)".into(),
            ));
        }
        for p in &self.predictors {
            p.validate()
                .map_err(|e| BenchError::Config(e.to_string()))?;
        }
        Ok(())
    }

    /// Validate the sampling spec alone (used by sample/residual-curve).
    pub fn validate_sampling(&self) -> Result<(), BenchError> {
        match self.sample.mode {
            SampleModeKind::Random => {
                if self.sample.fractions.is_empty() {
                    return Err(BenchError::Config(
                        "random mode needs at least one fraction".into(),
                    ));
                }
                for &f in &self.sample.fractions {
                    if !(f > 0.0 && f <= 1.0) {
                        return Err(BenchError::Config(format!(
                            "fraction {f} outside (0, 1]"
                        )));
                    }
                }
            }
            SampleModeKind::Time => {
                if self.sample.windows.is_empty() {
                    return Err(BenchError::Config(
                        "time mode needs at least one window".into(),
                    ));
                }
                self.parsed_windows()?;
            }
        }
        if !(self.sample.negatives_per_positive > 0.0) {
            return Err(BenchError::Config(
                "negatives_per_positive must be > 0".into(),
            ));
        }
        if !(self.filter.dominance > 0.0 && self.filter.dominance <= 1.0) {
            return Err(BenchError::Config("dominance outside (0, 1]".into()));
        }
        Ok(())
    }

    /// Hash of the effective config; keys the manifest and caches.
    pub fn config_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        short_hash(json.as_bytes())
    }

    /// Hash of everything that determines the filtered graph: the dataset
    /// bytes, the schema, the error policy and the filter parameters.
    pub fn graph_key(&self) -> Result<String, BenchError> {
        let path = self.dataset_path()?;
        let file_hash = hash_file(path)?;
        let schema = serde_json::to_string(&self.dataset.schema).expect("schema serializes");
        let filter = serde_json::to_string(&self.filter).expect("filter serializes");
        let material = format!("{file_hash}|{schema}|{}|{filter}", self.dataset.on_error);
        Ok(short_hash(material.as_bytes()))
    }
}

/// First 12 hex characters of the SHA-256 of `bytes`.
pub fn short_hash(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    hex::encode(&digest[..6])
}

/// Full SHA-256 of a file's contents.
pub fn hash_file(path: &Path) -> Result<String, BenchError> {
    let bytes = fs::read(path)
        .map_err(|e| BenchError::Config(format!("cannot read {}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Parse `START:END` where each endpoint is epoch seconds or RFC 3339.
pub fn parse_window(spec: &str) -> Result<(i64, i64), BenchError> {
    let (a, b) = spec.rsplit_once(':').and_then(|(a, b)| {
        // RFC 3339 contains colons; try full datetime split fallback first.
        if a.parse::<i64>().is_ok() || DateTime::parse_from_rfc3339(a).is_ok() {
            Some((a, b))
        } else {
            None
        }
    }).or_else(|| {
        // Two RFC 3339 datetimes separated by '/' also accepted.
        spec.split_once('/')
    })
    .ok_or_else(|| BenchError::Config(format!("bad window {spec:?}, expected START:END")))?;
    let parse = |s: &str| -> Result<i64, BenchError> {
        if let Ok(n) = s.parse::<i64>() {
            return Ok(n);
        }
        DateTime::parse_from_rfc3339(s)
            .map(|dt| dt.timestamp())
            .map_err(|_| BenchError::Config(format!("bad window endpoint {s:?}")))
    };
    let (start, end) = (parse(a)?, parse(b)?);
    if start >= end {
        return Err(BenchError::Config(format!(
            "window start {start} not before end {end}"
        )));
    }
    Ok((start, end))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predict::Method;

    #[test]
    fn defaults_match_documented_values() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.filter.min_degree, 20);
        assert_eq!(cfg.filter.dominance, 0.9);
        assert_eq!(cfg.filter.degree_kind, DegreeKind::Weighted);
        assert_eq!(cfg.sample.fractions.len(), 6);
        assert_eq!(cfg.sample.negatives_per_positive, 1.0);
        assert!(!cfg.sample.nested);
    }

    #[test]
    fn toml_round_trip() {
        let raw = r#"
[dataset]
path = "data/checkins.tsv"
on_error = "skip"

[dataset.schema]
user = 0
venue = 1
category = 3
latitude = 4
longitude = 5
time = 7

[filter]
min_degree = 20
degree_kind = "weighted"
dominance = 0.9

[sample]
mode = "random"
fractions = [0.05, 0.10]
seeds = [1, 2, 3]
weighting = "checkin"

[evaluation]
comparison = "exact"
workers = 2

[output]
dir = "results"

[[predictors]]
method = "grm"

[[predictors]]
method = "nbi_multistep"
steps = 2
"#;
        let cfg = RunConfig::from_toml_str(raw).unwrap();
        assert_eq!(cfg.dataset.path.as_deref(), Some(Path::new("data/checkins.tsv")));
        assert_eq!(cfg.sample.seeds, vec![1, 2, 3]);
        assert_eq!(cfg.predictors.len(), 2);
        assert_eq!(cfg.predictors[1].method, Method::NbiMultistep);
        assert_eq!(cfg.predictors[1].steps, 2);
        assert_eq!(cfg.evaluation.workers, 2);
        cfg.validate_for_bench().unwrap();

        // Identical configs hash identically; different ones do not.
        let cfg2 = RunConfig::from_toml_str(raw).unwrap();
        assert_eq!(cfg.config_hash(), cfg2.config_hash());
        let mut cfg3 = cfg.clone();
        cfg3.filter.min_degree = 10;
        assert_ne!(cfg.config_hash(), cfg3.config_hash());
    }

    #[test]
    fn validation_catches_bad_configs() {
        let mut cfg = RunConfig::default();
        cfg.predictors.push(PredictorConfig::new(Method::Grm));
        cfg.validate_for_bench().unwrap();

        let mut bad = cfg.clone();
        bad.sample.fractions = vec![1.5];
        assert!(bad.validate_for_bench().is_err());

        let mut bad = cfg.clone();
        bad.predictors.clear();
        assert!(bad.validate_for_bench().is_err());

        let mut bad = cfg.clone();
        bad.sample.mode = SampleModeKind::Time;
        assert!(bad.validate_for_bench().is_err(), "time mode without windows");

        let mut bad = cfg.clone();
        bad.filter.dominance = 0.0;
        assert!(bad.validate_for_bench().is_err());
    }

    #[test]
    fn window_parsing() {
        assert_eq!(parse_window("100:200").unwrap(), (100, 200));
        assert!(parse_window("200:100").is_err());
        assert!(parse_window("junk").is_err());
        let (start, end) =
            parse_window("2012-04-01T00:00:00Z/2012-05-01T00:00:00Z").unwrap();
        assert_eq!(start, 1333238400);
        assert!(end > start);
    }

    #[test]
    fn overrides_take_precedence() {
        let mut cfg = RunConfig::default();
        let ov = Overrides {
            dataset: Some(PathBuf::from("d.tsv")),
            out: Some(PathBuf::from("o")),
            seed: Some(42),
            workers: Some(3),
            methods: vec!["grm".into(), "nbi".into()],
            fractions: vec![0.1],
            windows: vec![],
            schema: Some("user=2".into()),
        };
        cfg.apply_overrides(&ov).unwrap();
        assert_eq!(cfg.dataset.path.as_deref(), Some(Path::new("d.tsv")));
        assert_eq!(cfg.sample.seeds, vec![42]);
        assert_eq!(cfg.evaluation.workers, 3);
        assert_eq!(cfg.predictors.len(), 2);
        assert_eq!(cfg.sample.fractions, vec![0.1]);
        assert_eq!(cfg.dataset.schema.user, 2);

        let bad = Overrides {
            methods: vec!["nope".into()],
            ..Overrides::default()
        };
        assert!(cfg.apply_overrides(&bad).is_err());
    }
}
