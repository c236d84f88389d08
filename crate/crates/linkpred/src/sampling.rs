//! Evaluation pair sets: positives (held-out connected pairs) and negatives
//! (unconnected pairs), built either by random batch holdout or from a time
//! window.
//!
//! Random batch holdout selects a fraction of the distinct connected pairs,
//! removes all their check-ins up front and returns the residual graph next
//! to the sample. Pair selection is weighted by check-in count by default
//! ([`PairWeighting::Checkin`]), which is what makes batch sampling destroy
//! network structure so quickly: heavy pairs are picked almost surely, so a
//! 30% sample can strip well over half of the check-ins. Uniform selection
//! over distinct pairs is available as [`PairWeighting::Uniform`].
//!
//! Time-window sampling does not touch the graph; the evaluator removes and
//! restores each positive pair around scoring instead.
//!
//! Everything is deterministic given the seed: same graph, same parameters,
//! same seed — byte-identical serialized samples. For a fixed seed the
//! positive set at a smaller fraction is a prefix of the set at a larger
//! one, which gives nested samples when one seed is reused across a grid.

use std::collections::HashSet;
use std::fmt;
use std::io::{self, BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{BipartiteGraph, UserIdx, VenueIdx};

/// How positive pairs are drawn in random batch mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairWeighting {
    /// Every distinct connected pair is equally likely.
    Uniform,
    /// Pairs are drawn proportionally to their check-in count, equivalent to
    /// sampling check-ins and holding out the whole pair of each hit.
    Checkin,
}

impl fmt::Display for PairWeighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairWeighting::Uniform => write!(f, "uniform"),
            PairWeighting::Checkin => write!(f, "checkin"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Positive,
    Negative,
}

/// One evaluation pair. `removed_count` is the number of check-ins held out
/// for a positive pair and zero for negatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalPair {
    pub user: String,
    pub venue: String,
    pub label: Label,
    pub removed_count: u32,
}

/// Provenance of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleMode {
    RandomBatch {
        fraction: f64,
        weighting: PairWeighting,
    },
    TimeIncremental {
        /// Half-open window [start, end) in epoch seconds.
        start: i64,
        end: i64,
    },
}

impl SampleMode {
    /// Compact label used in report rows, e.g. `f=0.10` or `w=100:200`.
    pub fn short_label(&self) -> String {
        match self {
            SampleMode::RandomBatch { fraction, .. } => format!("f={fraction}"),
            SampleMode::TimeIncremental { start, end } => format!("w={start}:{end}"),
        }
    }
}

/// Paired positive and negative evaluation sets.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalSample {
    pub mode: SampleMode,
    pub seed: u64,
    pub positives: Vec<EvalPair>,
    pub negatives: Vec<EvalPair>,
}

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("graph has no connected pairs")]
    EmptyGraph,
    #[error("fraction {0} outside (0, 1]")]
    InvalidFraction(f64),
    #[error("cannot draw {wanted} negatives, only {available} unconnected pairs exist")]
    NotEnoughNegatives { wanted: usize, available: u64 },
    #[error("window [{start}, {end}) is invalid")]
    InvalidWindow { start: i64, end: i64 },
    #[error("no check-ins fall inside window [{start}, {end})")]
    EmptyWindow { start: i64, end: i64 },
    #[error("sample pair ({user}, {venue}) not found in graph")]
    UnknownPair { user: String, venue: String },
    #[error("bad sample file at line {line}: {reason}")]
    BadSampleFile { line: u64, reason: String },
    #[error("io error")]
    Io(#[from] io::Error),
}

/// Knobs for random batch sampling beyond fraction and seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SampleOptions {
    pub weighting: PairWeighting,
    /// Negative set size as a multiple of the positive set size.
    pub negatives_per_positive: f64,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            weighting: PairWeighting::Checkin,
            negatives_per_positive: 1.0,
        }
    }
}

/// Deterministically derive an independent sub-seed (splitmix64 step).
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E3779B97F4A7C15u64.wrapping_mul(salt.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Random permutation of pair positions, uniform or weighted by count.
/// Weighted draws use exponential keys, so a prefix of the permutation is a
/// without-replacement sample with the right law.
fn pair_permutation(
    pairs: &[(UserIdx, VenueIdx, u32)],
    weighting: PairWeighting,
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    let mut keyed: Vec<(f64, usize)> = pairs
        .iter()
        .enumerate()
        .map(|(i, &(_, _, count))| {
            let w = match weighting {
                PairWeighting::Uniform => 1.0,
                PairWeighting::Checkin => count as f64,
            };
            let u: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
            (-u.ln() / w, i)
        })
        .collect();
    keyed.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    keyed.into_iter().map(|(_, i)| i).collect()
}

/// Draw `wanted` unconnected (user, venue) pairs from the graph, rejecting
/// connected and repeated draws. Falls back to enumerating the complement
/// when rejection would thrash.
fn draw_negatives(
    g: &BipartiteGraph,
    wanted: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(UserIdx, VenueIdx)>, SampleError> {
    let total = g.n_users() as u64 * g.n_venues() as u64;
    let available = total - g.n_pairs() as u64;
    if (wanted as u64) > available {
        return Err(SampleError::NotEnoughNegatives { wanted, available });
    }
    if wanted == 0 {
        return Ok(Vec::new());
    }
    let dense = available < total / 4 || (wanted as u64) * 2 > available;
    if dense {
        // Enumerate every unconnected pair and take a shuffled prefix.
        let mut complement: Vec<(UserIdx, VenueIdx)> = Vec::with_capacity(available as usize);
        for u in g.users() {
            let mut connected: Vec<VenueIdx> =
                g.user_venues(u).iter().map(|&(v, _)| v).collect();
            connected.sort_unstable();
            let mut it = connected.into_iter().peekable();
            for v in g.venues() {
                if it.peek() == Some(&v) {
                    it.next();
                } else {
                    complement.push((u, v));
                }
            }
        }
        for i in 0..wanted {
            let j = rng.gen_range(i..complement.len());
            complement.swap(i, j);
        }
        complement.truncate(wanted);
        return Ok(complement);
    }
    let mut drawn = HashSet::with_capacity(wanted);
    let mut out = Vec::with_capacity(wanted);
    while out.len() < wanted {
        let u = UserIdx(rng.gen_range(0..g.n_users() as u32));
        let v = VenueIdx(rng.gen_range(0..g.n_venues() as u32));
        if g.is_connected(u, v) || !drawn.insert((u, v)) {
            continue;
        }
        out.push((u, v));
    }
    Ok(out)
}

fn negative_pairs(
    g: &BipartiteGraph,
    n_positives: usize,
    ratio: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<EvalPair>, SampleError> {
    let wanted = (n_positives as f64 * ratio).round() as usize;
    let drawn = draw_negatives(g, wanted, rng)?;
    Ok(drawn
        .into_iter()
        .map(|(u, v)| EvalPair {
            user: g.user_id(u).to_string(),
            venue: g.venue_id(v).to_string(),
            label: Label::Negative,
            removed_count: 0,
        })
        .collect())
}

/// Batch holdout: select `round(fraction * n_pairs)` positive pairs, remove
/// all their check-ins from a copy of the graph, and draw matched negatives
/// from the unconnected pairs of the original graph.
///
/// Returns the sample and the residual graph the positives were removed
/// from. Deterministic given the seed; for a fixed seed, smaller fractions
/// yield prefixes of larger ones.
pub fn sample_random(
    g: &BipartiteGraph,
    fraction: f64,
    seed: u64,
) -> Result<(EvalSample, BipartiteGraph), SampleError> {
    sample_random_with(g, fraction, seed, &SampleOptions::default())
}

/// [`sample_random`] with explicit weighting and negative-set sizing.
pub fn sample_random_with(
    g: &BipartiteGraph,
    fraction: f64,
    seed: u64,
    options: &SampleOptions,
) -> Result<(EvalSample, BipartiteGraph), SampleError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(SampleError::InvalidFraction(fraction));
    }
    let pairs = g.pairs_sorted();
    if pairs.is_empty() {
        return Err(SampleError::EmptyGraph);
    }
    let k = ((fraction * pairs.len() as f64).round() as usize).min(pairs.len());

    let mut rng = rng_stream(seed, 0);
    let order = pair_permutation(&pairs, options.weighting, &mut rng);
    let positives: Vec<EvalPair> = order[..k]
        .iter()
        .map(|&i| {
            let (u, v, count) = pairs[i];
            EvalPair {
                user: g.user_id(u).to_string(),
                venue: g.venue_id(v).to_string(),
                label: Label::Positive,
                removed_count: count,
            }
        })
        .collect();

    let mut neg_rng = rng_stream(seed, 1);
    let negatives = negative_pairs(g, k, options.negatives_per_positive, &mut neg_rng)?;

    let sample = EvalSample {
        mode: SampleMode::RandomBatch {
            fraction,
            weighting: options.weighting,
        },
        seed,
        positives,
        negatives,
    };
    let residual = apply_holdout(g, &sample)?;
    Ok((sample, residual))
}

/// Remove every positive pair of the sample (all multilinks) from a copy of
/// the graph. This is exactly the residual graph batch evaluation runs on.
pub fn apply_holdout(
    g: &BipartiteGraph,
    sample: &EvalSample,
) -> Result<BipartiteGraph, SampleError> {
    let mut residual = g.clone();
    for pair in &sample.positives {
        let unknown = || SampleError::UnknownPair {
            user: pair.user.clone(),
            venue: pair.venue.clone(),
        };
        let u = residual.user_idx(&pair.user).ok_or_else(unknown)?;
        let v = residual.venue_idx(&pair.venue).ok_or_else(unknown)?;
        residual.remove_pair(u, v).map_err(|_| unknown())?;
    }
    Ok(residual)
}

/// Time-window sampling: positives are the distinct pairs with at least one
/// check-in inside `[start, end)`, optionally down-sampled to
/// `max_positives`. The graph is not mutated; evaluation removes and
/// restores each positive around scoring (time-incremental mode).
pub fn sample_time(
    g: &BipartiteGraph,
    window: (i64, i64),
    seed: u64,
    max_positives: Option<usize>,
) -> Result<EvalSample, SampleError> {
    sample_time_with(g, window, seed, max_positives, 1.0)
}

/// [`sample_time`] with an explicit negative-set size ratio.
pub fn sample_time_with(
    g: &BipartiteGraph,
    window: (i64, i64),
    seed: u64,
    max_positives: Option<usize>,
    negatives_per_positive: f64,
) -> Result<EvalSample, SampleError> {
    let (start, end) = window;
    if start >= end {
        return Err(SampleError::InvalidWindow { start, end });
    }
    let mut selected: Vec<(UserIdx, VenueIdx, u32)> = Vec::new();
    for (u, v, count) in g.pairs_sorted() {
        let times = g.times(u, v);
        let lo = times.partition_point(|&t| t < start);
        let hi = times.partition_point(|&t| t < end);
        if hi > lo {
            selected.push((u, v, count));
        }
    }
    if selected.is_empty() {
        return Err(SampleError::EmptyWindow { start, end });
    }
    if let Some(cap) = max_positives {
        if selected.len() > cap {
            let mut rng = rng_stream(seed, 2);
            for i in 0..cap {
                let j = rng.gen_range(i..selected.len());
                selected.swap(i, j);
            }
            selected.truncate(cap);
        }
    }
    let positives: Vec<EvalPair> = selected
        .iter()
        .map(|&(u, v, count)| EvalPair {
            user: g.user_id(u).to_string(),
            venue: g.venue_id(v).to_string(),
            label: Label::Positive,
            removed_count: count,
        })
        .collect();
    let mut neg_rng = rng_stream(seed, 1);
    let negatives = negative_pairs(g, positives.len(), negatives_per_positive, &mut neg_rng)?;
    Ok(EvalSample {
        mode: SampleMode::TimeIncremental { start, end },
        seed,
        positives,
        negatives,
    })
}

/// Residual check-in counts after random holdout at each fraction.
///
/// With `nested` one permutation (the seed itself) is shared across the
/// whole grid, so the curve is monotone non-increasing by construction.
/// Otherwise each fraction uses an independently derived seed.
pub fn residual_checkin_curve(
    g: &BipartiteGraph,
    fractions: &[f64],
    seed: u64,
    nested: bool,
    options: &SampleOptions,
) -> Result<Vec<(f64, u64)>, SampleError> {
    let mut curve = Vec::with_capacity(fractions.len());
    for (i, &fraction) in fractions.iter().enumerate() {
        let s = if nested { seed } else { mix_seed(seed, i as u64) };
        let (_, residual) = sample_random_with(g, fraction, s, options)?;
        curve.push((fraction, residual.n_checkins()));
    }
    Ok(curve)
}

impl EvalSample {
    pub fn n_positives(&self) -> usize {
        self.positives.len()
    }

    pub fn n_negatives(&self) -> usize {
        self.negatives.len()
    }

    /// Check the structural sample invariants against the graph the sample
    /// was drawn from: positives were connected, negatives were not, the two
    /// sets are disjoint, and labels/removed counts are consistent.
    pub fn validate(&self, original: &BipartiteGraph) -> Result<(), String> {
        let mut seen: HashSet<(&str, &str)> = HashSet::new();
        for p in self.positives.iter().chain(&self.negatives) {
            if !seen.insert((p.user.as_str(), p.venue.as_str())) {
                return Err(format!("duplicate pair ({}, {})", p.user, p.venue));
            }
        }
        for p in &self.positives {
            if p.label != Label::Positive || p.removed_count == 0 {
                return Err(format!("bad positive ({}, {})", p.user, p.venue));
            }
            let (u, v) = match (original.user_idx(&p.user), original.venue_idx(&p.venue)) {
                (Some(u), Some(v)) => (u, v),
                _ => return Err(format!("positive ({}, {}) not in graph", p.user, p.venue)),
            };
            if original.pair_count(u, v) != p.removed_count {
                return Err(format!(
                    "positive ({}, {}) removed_count mismatch",
                    p.user, p.venue
                ));
            }
        }
        for p in &self.negatives {
            if p.label != Label::Negative || p.removed_count != 0 {
                return Err(format!("bad negative ({}, {})", p.user, p.venue));
            }
            let (u, v) = match (original.user_idx(&p.user), original.venue_idx(&p.venue)) {
                (Some(u), Some(v)) => (u, v),
                _ => return Err(format!("negative ({}, {}) not in graph", p.user, p.venue)),
            };
            if original.is_connected(u, v) {
                return Err(format!("negative ({}, {}) is connected", p.user, p.venue));
            }
        }
        Ok(())
    }

    /// Serialize as TSV: comment header with provenance, then one row per
    /// pair — label, user, venue, removed_count. Byte-stable for a given
    /// sample.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        match self.mode {
            SampleMode::RandomBatch {
                fraction,
                weighting,
            } => writeln!(
                out,
                "# mode=random fraction={fraction} weighting={weighting} seed={}",
                self.seed
            )?,
            SampleMode::TimeIncremental { start, end } => writeln!(
                out,
                "# mode=time start={start} end={end} seed={}",
                self.seed
            )?,
        }
        writeln!(out, "label\tuser\tvenue\tremoved_count")?;
        for p in self.positives.iter().chain(&self.negatives) {
            let label = match p.label {
                Label::Positive => "pos",
                Label::Negative => "neg",
            };
            writeln!(out, "{label}\t{}\t{}\t{}", p.user, p.venue, p.removed_count)?;
        }
        Ok(())
    }

    /// Parse [`EvalSample::write_tsv`] output.
    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Self, SampleError> {
        let mut mode = None;
        let mut seed = 0u64;
        let mut positives = Vec::new();
        let mut negatives = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx as u64 + 1;
            let bad = |reason: &str| SampleError::BadSampleFile {
                line: lineno,
                reason: reason.to_string(),
            };
            if line.starts_with('#') {
                let mut kv = std::collections::HashMap::new();
                for part in line.trim_start_matches('#').split_whitespace() {
                    if let Some((k, v)) = part.split_once('=') {
                        kv.insert(k.to_string(), v.to_string());
                    }
                }
                if let Some(s) = kv.get("seed") {
                    seed = s.parse().map_err(|_| bad("bad seed"))?;
                }
                match kv.get("mode").map(String::as_str) {
                    Some("random") => {
                        let fraction = kv
                            .get("fraction")
                            .and_then(|f| f.parse().ok())
                            .ok_or_else(|| bad("missing fraction"))?;
                        let weighting = match kv.get("weighting").map(String::as_str) {
                            Some("uniform") => PairWeighting::Uniform,
                            Some("checkin") | None => PairWeighting::Checkin,
                            Some(_) => return Err(bad("bad weighting")),
                        };
                        mode = Some(SampleMode::RandomBatch {
                            fraction,
                            weighting,
                        });
                    }
                    Some("time") => {
                        let start = kv
                            .get("start")
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| bad("missing start"))?;
                        let end = kv
                            .get("end")
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| bad("missing end"))?;
                        mode = Some(SampleMode::TimeIncremental { start, end });
                    }
                    _ => return Err(bad("missing mode")),
                }
                continue;
            }
            if line.trim().is_empty() || line.starts_with("label\t") {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(bad("expected 4 columns"));
            }
            let removed_count: u32 = fields[3].parse().map_err(|_| bad("bad removed_count"))?;
            match fields[0] {
                "pos" => positives.push(EvalPair {
                    user: fields[1].to_string(),
                    venue: fields[2].to_string(),
                    label: Label::Positive,
                    removed_count,
                }),
                "neg" => negatives.push(EvalPair {
                    user: fields[1].to_string(),
                    venue: fields[2].to_string(),
                    label: Label::Negative,
                    removed_count,
                }),
                _ => return Err(bad("bad label")),
            }
        }
        let mode = mode.ok_or(SampleError::BadSampleFile {
            line: 0,
            reason: "missing header".to_string(),
        })?;
        Ok(EvalSample {
            mode,
            seed,
            positives,
            negatives,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::BipartiteGraph;
    use crate::ingest::CheckIn;

    fn checkin(user: &str, venue: &str, t: i64) -> CheckIn {
        CheckIn {
            user_id: user.into(),
            venue_id: venue.into(),
            category: "Bar".into(),
            latitude: 1.0,
            longitude: 2.0,
            timestamp: t,
        }
    }

    /// 4 users x 4 venues, 8 distinct pairs (counts 1), so 8 unconnected
    /// pairs remain for matched negatives even at full holdout.
    fn toy_graph() -> BipartiteGraph {
        BipartiteGraph::from_checkins(&[
            checkin("U1", "V1", 10),
            checkin("U1", "V2", 20),
            checkin("U2", "V1", 30),
            checkin("U2", "V2", 40),
            checkin("U2", "V3", 50),
            checkin("U3", "V3", 60),
            checkin("U3", "V4", 70),
            checkin("U4", "V4", 80),
        ])
    }

    /// Four pairs with counts {3, 1, 1, 1}.
    fn skewed_graph() -> BipartiteGraph {
        BipartiteGraph::from_checkins(&[
            checkin("a", "w", 1),
            checkin("a", "w", 2),
            checkin("a", "w", 3),
            checkin("a", "x", 4),
            checkin("b", "y", 5),
            checkin("b", "z", 6),
        ])
    }

    #[test]
    fn full_holdout_empties_graph() {
        let g = toy_graph();
        let (sample, residual) = sample_random(&g, 1.0, 7).unwrap();
        assert_eq!(sample.n_positives(), 8);
        assert_eq!(residual.n_checkins(), 0);
        assert_eq!(sample.n_negatives(), 8);
        sample.validate(&g).unwrap();
    }

    #[test]
    fn same_seed_same_sample() {
        let g = toy_graph();
        for weighting in [PairWeighting::Uniform, PairWeighting::Checkin] {
            let options = SampleOptions {
                weighting,
                ..SampleOptions::default()
            };
            let (a, ra) = sample_random_with(&g, 0.5, 99, &options).unwrap();
            let (b, rb) = sample_random_with(&g, 0.5, 99, &options).unwrap();
            assert_eq!(a, b);
            assert_eq!(ra, rb);
            let mut ba = Vec::new();
            let mut bb = Vec::new();
            a.write_tsv(&mut ba).unwrap();
            b.write_tsv(&mut bb).unwrap();
            assert_eq!(ba, bb, "byte-identical serialization");
            let (c, _) = sample_random_with(&g, 0.5, 100, &options).unwrap();
            assert_ne!(a.positives, c.positives, "different seed, different sample");
        }
    }

    #[test]
    fn positives_removed_negatives_unconnected() {
        let g = skewed_graph();
        let (sample, residual) = sample_random(&g, 0.5, 3).unwrap();
        sample.validate(&g).unwrap();
        for p in &sample.positives {
            let u = residual.user_idx(&p.user).unwrap();
            let v = residual.venue_idx(&p.venue).unwrap();
            assert_eq!(residual.pair_count(u, v), 0);
        }
        assert_eq!(sample.n_positives(), sample.n_negatives());
    }

    /// Brute-force oracle: fraction 0.5 of 4 pairs removes every 2-subset of
    /// pairs; with counts {3,1,1,1} (6 check-ins) the possible residual
    /// totals are 6-(3+1)=2 and 6-(1+1)=4.
    #[test]
    fn skewed_residuals_match_enumeration() {
        let counts = [3u64, 1, 1, 1];
        let total: u64 = counts.iter().sum();
        let mut expected = HashSet::new();
        for i in 0..counts.len() {
            for j in i + 1..counts.len() {
                expected.insert(total - counts[i] - counts[j]);
            }
        }
        assert_eq!(expected, HashSet::from([2u64, 4]));

        let g = skewed_graph();
        for weighting in [PairWeighting::Uniform, PairWeighting::Checkin] {
            let options = SampleOptions {
                weighting,
                ..SampleOptions::default()
            };
            let mut seen = HashSet::new();
            for seed in 0..200 {
                let (sample, residual) = sample_random_with(&g, 0.5, seed, &options).unwrap();
                assert_eq!(sample.n_positives(), 2);
                assert!(expected.contains(&residual.n_checkins()));
                seen.insert(residual.n_checkins());
            }
            assert_eq!(seen, expected, "both outcomes occur over 200 seeds");
        }
    }

    #[test]
    fn checkin_weighting_prefers_heavy_pairs() {
        let g = skewed_graph();
        let options = SampleOptions {
            weighting: PairWeighting::Checkin,
            ..SampleOptions::default()
        };
        let mut heavy_first = 0;
        for seed in 0..400 {
            let (sample, _) = sample_random_with(&g, 0.25, seed, &options).unwrap();
            assert_eq!(sample.n_positives(), 1);
            if sample.positives[0].removed_count == 3 {
                heavy_first += 1;
            }
        }
        // The count-3 pair holds half of the mass; uniform would hit ~100.
        assert!(heavy_first > 150, "heavy pair drawn {heavy_first}/400 times");
    }

    #[test]
    fn nested_prefix_for_fixed_seed() {
        let g = toy_graph();
        let (small, _) = sample_random(&g, 0.3, 5).unwrap();
        let (large, _) = sample_random(&g, 0.7, 5).unwrap();
        assert!(small.n_positives() < large.n_positives());
        assert_eq!(
            small.positives[..],
            large.positives[..small.n_positives()],
            "smaller fraction is a prefix of the larger one"
        );
    }

    #[test]
    fn invalid_inputs_error() {
        let g = toy_graph();
        assert!(matches!(
            sample_random(&g, 0.0, 1),
            Err(SampleError::InvalidFraction(_))
        ));
        assert!(matches!(
            sample_random(&g, 1.5, 1),
            Err(SampleError::InvalidFraction(_))
        ));
        let empty = BipartiteGraph::from_checkins(&[]);
        assert!(matches!(
            sample_random(&empty, 0.5, 1),
            Err(SampleError::EmptyGraph)
        ));
    }

    #[test]
    fn not_enough_negatives_detected() {
        // Complete bipartite graph: no unconnected pair exists.
        let checkins = vec![
            checkin("a", "x", 1),
            checkin("a", "y", 2),
            checkin("b", "x", 3),
            checkin("b", "y", 4),
        ];
        let g = BipartiteGraph::from_checkins(&checkins);
        assert!(matches!(
            sample_random(&g, 0.5, 1),
            Err(SampleError::NotEnoughNegatives { .. })
        ));
    }

    #[test]
    fn dense_graph_uses_enumeration() {
        // 2x3 with 5 of 6 pairs connected: only one negative exists.
        let checkins = vec![
            checkin("a", "x", 1),
            checkin("a", "y", 2),
            checkin("a", "z", 3),
            checkin("b", "x", 4),
            checkin("b", "y", 5),
        ];
        let g = BipartiteGraph::from_checkins(&checkins);
        let (sample, _) = sample_random_with(
            &g,
            0.2,
            7,
            &SampleOptions {
                weighting: PairWeighting::Uniform,
                ..SampleOptions::default()
            },
        )
        .unwrap();
        assert_eq!(sample.n_positives(), 1);
        assert_eq!(sample.negatives[0].user, "b");
        assert_eq!(sample.negatives[0].venue, "z");
    }

    #[test]
    fn time_window_selects_by_timestamp() {
        // Timestamps: (U1,V1)=[10], (U2,V3)=[50].
        let g = BipartiteGraph::from_checkins(&[
            checkin("U1", "V1", 10),
            checkin("U2", "V3", 50),
            checkin("U3", "V4", 70),
        ]);
        let sample = sample_time(&g, (0, 20), 1, None).unwrap();
        assert_eq!(sample.n_positives(), 1);
        assert_eq!(sample.positives[0].user, "U1");
        assert_eq!(sample.positives[0].venue, "V1");
        sample.validate(&g).unwrap();

        // Window before any check-in.
        assert!(matches!(
            sample_time(&g, (-100, 0), 1, None),
            Err(SampleError::EmptyWindow { .. })
        ));
        assert!(matches!(
            sample_time(&g, (20, 20), 1, None),
            Err(SampleError::InvalidWindow { .. })
        ));
    }

    #[test]
    fn full_cover_window_selects_all_pairs() {
        let g = toy_graph();
        let sample = sample_time(&g, (0, 1_000), 1, None).unwrap();
        assert_eq!(sample.n_positives(), g.n_pairs());
        // Half-open window: check-ins at t >= 70 are excluded.
        let sample = sample_time(&g, (0, 70), 1, None).unwrap();
        assert_eq!(sample.n_positives(), g.n_pairs() - 2);
    }

    #[test]
    fn time_cap_downsamples_deterministically() {
        let g = toy_graph();
        let a = sample_time(&g, (0, 1_000), 9, Some(3)).unwrap();
        let b = sample_time(&g, (0, 1_000), 9, Some(3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n_positives(), 3);
        assert_eq!(a.n_negatives(), 3);
    }

    #[test]
    fn residual_curve_monotone_when_nested() {
        let g = skewed_graph();
        let fractions = [0.25, 0.5, 0.75, 1.0];
        let curve =
            residual_checkin_curve(&g, &fractions, 11, true, &SampleOptions::default()).unwrap();
        assert_eq!(curve.len(), 4);
        for win in curve.windows(2) {
            assert!(win[0].1 >= win[1].1, "monotone non-increasing: {curve:?}");
        }
        assert_eq!(curve.last().unwrap().1, 0, "fraction 1.0 removes everything");
    }

    #[test]
    fn sample_tsv_round_trip() {
        let g = toy_graph();
        let (sample, _) = sample_random(&g, 0.5, 42).unwrap();
        let mut buf = Vec::new();
        sample.write_tsv(&mut buf).unwrap();
        let parsed = EvalSample::read_tsv(buf.as_slice()).unwrap();
        assert_eq!(sample, parsed);

        let t = sample_time(&g, (0, 100), 7, Some(2)).unwrap();
        let mut buf = Vec::new();
        t.write_tsv(&mut buf).unwrap();
        assert_eq!(EvalSample::read_tsv(buf.as_slice()).unwrap(), t);
    }
}
