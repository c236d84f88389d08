//! Link-prediction scoring methods.
//!
//! Each method maps a (graph, user, venue) triple to a real score where
//! higher means "more likely to connect". Degree-based methods (global
//! ranking, assortativity) ignore most of the structure; collaborative
//! filtering and network-based inference use it; the NBI variants fold in
//! venue metadata, user similarity or trendiness.
//!
//! Per-pair entry points live in [`baselines`] and [`similarity`]; the
//! [`Scorer`] engine computes whole per-user score vectors, which is what
//! evaluation uses since the expensive methods cost the same for one venue
//! as for all of them.

pub mod baselines;
pub mod nbi;
pub mod similarity;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{BipartiteGraph, UserIdx, VenueIdx};

pub use baselines::{
    haversine_km, mean_location, mean_neighbor_degree, score_assortativity, score_grm,
    score_loc_baseline, score_type_baseline,
};
pub use nbi::{score_nbi, score_nbi_mod, score_nbi_multistep, score_nbi_time, score_nbi_us};
pub use similarity::{score_cf, user_similarity_aa};

/// Scoring methods, addressable by these exact names in configs and CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Grm,
    Assort,
    Cf,
    Nbi,
    NbiMod,
    NbiUs,
    NbiMultistep,
    NbiTime,
    LocBaseline,
    TypeBaseline,
}

impl Method {
    pub const ALL: [Method; 10] = [
        Method::Grm,
        Method::Assort,
        Method::Cf,
        Method::Nbi,
        Method::NbiMod,
        Method::NbiUs,
        Method::NbiMultistep,
        Method::NbiTime,
        Method::LocBaseline,
        Method::TypeBaseline,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Grm => "grm",
            Method::Assort => "assort",
            Method::Cf => "cf",
            Method::Nbi => "nbi",
            Method::NbiMod => "nbi_mod",
            Method::NbiUs => "nbi_us",
            Method::NbiMultistep => "nbi_multistep",
            Method::NbiTime => "nbi_time",
            Method::LocBaseline => "loc_baseline",
            Method::TypeBaseline => "type_baseline",
        }
    }

    /// True for methods that need a sample time window to score.
    pub fn needs_window(&self) -> bool {
        matches!(self, Method::NbiTime)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Method::ALL.iter().map(|m| m.name()).collect();
                format!("unknown method {s:?}; expected one of {}", names.join(", "))
            })
    }
}

/// Whether similarity and resource flow treat multilinks as one edge or
/// split shares proportionally to check-in counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Adjacency {
    #[default]
    Binary,
    Weighted,
}

/// A fully configured scoring method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PredictorConfig {
    pub method: Method,
    pub adjacency: Adjacency,
    /// Rounds of the two-phase resource flow; 1 is basic NBI, 2 is the
    /// two-step variant.
    pub steps: u32,
    /// Venue-type affinity weight in the metadata-modified NBI.
    pub type_weight: f64,
    /// Location proximity weight in the metadata-modified NBI.
    pub loc_weight: f64,
    /// Global venue degree weight in the metadata-modified NBI.
    pub degree_weight: f64,
    /// User-similarity seeding weight in the user-similarity NBI.
    pub sim_weight: f64,
    /// Trendiness weight in the time-modified NBI.
    pub trend_weight: f64,
    /// Decay scale of the location factor, km.
    pub loc_scale_km: f64,
    /// Half-window around the sample period that counts as "close" for
    /// trendiness, seconds.
    pub trend_window_secs: i64,
}

impl Default for PredictorConfig {
    fn default() -> Self {
        PredictorConfig {
            method: Method::Nbi,
            adjacency: Adjacency::Binary,
            steps: 1,
            type_weight: 1.0,
            loc_weight: 1.0,
            degree_weight: 1.0,
            sim_weight: 1.0,
            trend_weight: 1.0,
            loc_scale_km: 10.0,
            trend_window_secs: 30 * 86_400,
        }
    }
}

impl PredictorConfig {
    pub fn new(method: Method) -> Self {
        PredictorConfig {
            method,
            ..PredictorConfig::default()
        }
    }

    pub fn with_steps(mut self, steps: u32) -> Self {
        self.steps = steps;
        self
    }

    pub fn validate(&self) -> Result<(), PredictError> {
        if self.steps < 1 {
            return Err(PredictError::InvalidConfig("steps must be >= 1".into()));
        }
        for (name, w) in [
            ("type_weight", self.type_weight),
            ("loc_weight", self.loc_weight),
            ("degree_weight", self.degree_weight),
            ("sim_weight", self.sim_weight),
            ("trend_weight", self.trend_weight),
        ] {
            if !(w >= 0.0) {
                return Err(PredictError::InvalidConfig(format!(
                    "{name} must be >= 0, got {w}"
                )));
            }
        }
        if !(self.loc_scale_km > 0.0) {
            return Err(PredictError::InvalidConfig(format!(
                "loc_scale_km must be > 0, got {}",
                self.loc_scale_km
            )));
        }
        if self.trend_window_secs <= 0 {
            return Err(PredictError::InvalidConfig(format!(
                "trend_window_secs must be > 0, got {}",
                self.trend_window_secs
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PredictError {
    #[error("user {user} has no venues in the graph")]
    IsolatedUser { user: String },
    #[error("user {user} has no located check-ins")]
    NoUserLocation { user: String },
    #[error("venue {venue} lacks {what}")]
    MissingVenueMeta { venue: String, what: &'static str },
    #[error("method {method} requires a sample time window")]
    MissingWindow { method: &'static str },
    #[error("invalid predictor config: {0}")]
    InvalidConfig(String),
}

/// Scores of one user against every venue of a graph, indexed by venue.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    pub user: UserIdx,
    pub scores: Vec<f64>,
}

impl ScoreVector {
    pub fn get(&self, v: VenueIdx) -> f64 {
        self.scores[v.as_usize()]
    }

    /// Venue indexes ranked by descending score, excluding the given set
    /// (typically the venues the user is already connected to).
    pub fn ranked(&self, exclude: &[VenueIdx]) -> Vec<VenueIdx> {
        let mut out: Vec<VenueIdx> = (0..self.scores.len() as u32)
            .map(VenueIdx)
            .filter(|v| !exclude.contains(v))
            .collect();
        out.sort_by(|a, b| {
            self.get(*b)
                .total_cmp(&self.get(*a))
                .then(a.0.cmp(&b.0))
        });
        out
    }
}

/// Scoring engine bound to one graph and one configuration.
///
/// Construction precomputes whatever the method reuses across users (the
/// per-venue trendiness table, the maximum venue degree), so evaluating one
/// sample costs one engine plus one `score_user` call per distinct user.
#[derive(Debug)]
pub struct Scorer<'g> {
    graph: &'g BipartiteGraph,
    config: PredictorConfig,
    window: Option<(i64, i64)>,
    max_binary_degree: f64,
    trend: Option<Vec<f64>>,
}

impl<'g> Scorer<'g> {
    pub fn new(graph: &'g BipartiteGraph, config: PredictorConfig) -> Result<Self, PredictError> {
        Scorer::with_window(graph, config, None)
    }

    /// Build an engine with the sample time window, required by
    /// trendiness-aware methods and ignored by the rest.
    pub fn with_window(
        graph: &'g BipartiteGraph,
        config: PredictorConfig,
        window: Option<(i64, i64)>,
    ) -> Result<Self, PredictError> {
        config.validate()?;
        if config.method.needs_window() && window.is_none() {
            return Err(PredictError::MissingWindow {
                method: config.method.name(),
            });
        }
        let max_binary_degree = graph
            .venues()
            .map(|v| graph.venue_degrees(v).binary)
            .max()
            .unwrap_or(0) as f64;
        let trend = match (config.method, window) {
            (Method::NbiTime, Some(w)) => {
                Some(trend_table(graph, w, config.trend_window_secs))
            }
            _ => None,
        };
        Ok(Scorer {
            graph,
            config,
            window,
            max_binary_degree,
            trend,
        })
    }

    pub fn config(&self) -> &PredictorConfig {
        &self.config
    }

    pub fn graph(&self) -> &'g BipartiteGraph {
        self.graph
    }

    /// Score every venue for one user. Costs one pass over the user's
    /// two-hop neighborhood for the structural methods.
    pub fn score_user(&self, u: UserIdx) -> Result<ScoreVector, PredictError> {
        let g = self.graph;
        let cfg = &self.config;
        let scores = match cfg.method {
            Method::Grm => baselines::grm_vector(g),
            Method::Assort => baselines::assort_vector(g, u),
            Method::Cf => similarity::cf_vector(g, u, cfg.adjacency),
            Method::Nbi | Method::NbiMultistep => {
                nbi::nbi_vector(g, u, cfg.adjacency, cfg.steps)?
            }
            Method::NbiUs => {
                nbi::nbi_us_vector(g, u, cfg.adjacency, cfg.steps, cfg.sim_weight)?
            }
            Method::NbiMod => {
                let base = nbi::nbi_vector(g, u, cfg.adjacency, cfg.steps)?;
                nbi::apply_metadata_factors(g, u, base, cfg, self.max_binary_degree)
            }
            Method::NbiTime => {
                let base = nbi::nbi_vector(g, u, cfg.adjacency, cfg.steps)?;
                let trend = self.trend.as_ref().expect("trend table built for nbi_time");
                base.iter()
                    .zip(trend)
                    .map(|(s, t)| s * (1.0 + cfg.trend_weight * t))
                    .collect()
            }
            Method::LocBaseline => baselines::loc_vector(g, u)?,
            Method::TypeBaseline => baselines::type_vector(g, u)?,
        };
        Ok(ScoreVector { user: u, scores })
    }

    /// Score a single pair. For the NBI family this computes the user's full
    /// vector; batch callers should prefer [`Scorer::score_user`].
    pub fn score_pair(&self, u: UserIdx, v: VenueIdx) -> Result<f64, PredictError> {
        match self.config.method {
            Method::Grm => Ok(baselines::score_grm(self.graph, v)),
            Method::Assort => Ok(baselines::score_assortativity(self.graph, u, v)),
            Method::Cf => Ok(similarity::score_cf(self.graph, u, v, self.config.adjacency)),
            Method::LocBaseline => baselines::score_loc_baseline(self.graph, u, v),
            Method::TypeBaseline => baselines::score_type_baseline(self.graph, u, v),
            _ => Ok(self.score_user(u)?.get(v)),
        }
    }

    pub fn window(&self) -> Option<(i64, i64)> {
        self.window
    }
}

/// Fraction of each venue's check-ins falling within `tau` of the window,
/// i.e. inside `[start - tau, end + tau)`. Zero for venues without
/// check-ins.
pub fn trend_table(g: &BipartiteGraph, window: (i64, i64), tau: i64) -> Vec<f64> {
    let lo = window.0.saturating_sub(tau);
    let hi = window.1.saturating_add(tau);
    let mut in_window = vec![0u64; g.n_venues()];
    for (u, v, _) in g.pairs_sorted() {
        let times = g.times(u, v);
        let a = times.partition_point(|&t| t < lo);
        let b = times.partition_point(|&t| t < hi);
        in_window[v.as_usize()] += (b - a) as u64;
    }
    g.venues()
        .map(|v| {
            let total = g.venue_degrees(v).weighted;
            if total == 0 {
                0.0
            } else {
                in_window[v.as_usize()] as f64 / total as f64
            }
        })
        .collect()
}
