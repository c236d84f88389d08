//! AUC evaluation of a predictor over an evaluation sample.
//!
//! The AUC is the probability that a random held-out positive pair outscores
//! a random unconnected negative pair, ties counting one half. Exact mode
//! compares every (positive, negative) combination — deterministic and cheap
//! on pre-computed score arrays; sampled mode draws comparisons at random,
//! matching the protocol the measure is usually described with.
//!
//! Batch samples (random holdout) are scored against the residual graph the
//! sampler produced. Time samples are scored incrementally: each positive
//! pair is removed, scored and restored, one at a time, leaving the graph
//! exactly as it was; negatives are scored on the unmodified graph.
//!
//! Users that end up with no venues at all (a high holdout fraction can do
//! that) score zero for every venue rather than failing the run; the report
//! counts them.

use std::collections::HashMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{BipartiteGraph, UserIdx, VenueIdx};
use crate::predict::{PredictError, PredictorConfig, Scorer};
use crate::sampling::{apply_holdout, EvalPair, EvalSample, SampleError, SampleMode};

/// How positive/negative score comparisons are made.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ComparisonMode {
    /// All `n_pos * n_neg` comparisons.
    Exact,
    /// `n` independent random (positive, negative) draws.
    Sampled { n: u64, seed: u64 },
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("sample has no {0}")]
    EmptySample(&'static str),
    #[error("sample user {0:?} not present in graph")]
    UnknownUser(String),
    #[error("sample venue {0:?} not present in graph")]
    UnknownVenue(String),
    #[error("positive pair ({user}, {venue}) not connected in graph")]
    PairNotConnected { user: String, venue: String },
    #[error("scoring ({user}, {venue}) failed: {source}")]
    Scorer {
        user: String,
        venue: String,
        source: PredictError,
    },
    #[error("non-finite score for ({user}, {venue})")]
    NonFiniteScore { user: String, venue: String },
    #[error("predictor config invalid: {0}")]
    Config(PredictError),
    #[error(transparent)]
    Sample(#[from] SampleError),
}

/// AUC result with enough provenance to reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct AucReport {
    pub auc: f64,
    pub n_pos: u64,
    pub n_neg: u64,
    pub n_comparisons: u64,
    pub n_wins: u64,
    pub n_ties: u64,
    /// Users scored as all-zero because they had no venues left.
    pub n_isolated_users: u64,
    pub method: PredictorConfig,
    pub sample_mode: SampleMode,
    pub sample_seed: u64,
    pub comparison: ComparisonMode,
    pub wall_time_secs: f64,
}

/// Compute the AUC of a predictor over a sample.
///
/// For batch (random holdout) samples `g` must be the residual graph the
/// sampler returned. For time samples `g` must be the full graph; it is
/// mutated during evaluation and restored to deep equality before returning.
pub fn evaluate_auc(
    g: &mut BipartiteGraph,
    sample: &EvalSample,
    predictor: &PredictorConfig,
    mode: ComparisonMode,
) -> Result<AucReport, EvalError> {
    if sample.positives.is_empty() {
        return Err(EvalError::EmptySample("positives"));
    }
    if sample.negatives.is_empty() {
        return Err(EvalError::EmptySample("negatives"));
    }
    predictor.validate().map_err(EvalError::Config)?;
    let started = Instant::now();

    let window = match sample.mode {
        SampleMode::TimeIncremental { start, end } => Some((start, end)),
        SampleMode::RandomBatch { .. } => None,
    };

    let mut isolated = 0u64;
    let (pos_scores, neg_scores) = match sample.mode {
        SampleMode::RandomBatch { .. } => {
            let scorer = Scorer::with_window(g, predictor.clone(), window)
                .map_err(EvalError::Config)?;
            let pos = batch_scores(&scorer, g, &sample.positives, &mut isolated)?;
            let neg = batch_scores(&scorer, g, &sample.negatives, &mut isolated)?;
            (pos, neg)
        }
        SampleMode::TimeIncremental { .. } => {
            // Negatives first, on the untouched graph.
            let neg = {
                let scorer = Scorer::with_window(g, predictor.clone(), window)
                    .map_err(EvalError::Config)?;
                batch_scores(&scorer, g, &sample.negatives, &mut isolated)?
            };
            let pos = incremental_scores(g, &sample.positives, predictor, window, &mut isolated)?;
            (pos, neg)
        }
    };

    let counts = auc_from_scores(&pos_scores, &neg_scores, mode);
    Ok(AucReport {
        auc: counts.auc(),
        n_pos: pos_scores.len() as u64,
        n_neg: neg_scores.len() as u64,
        n_comparisons: counts.n_comparisons,
        n_wins: counts.n_wins,
        n_ties: counts.n_ties,
        n_isolated_users: isolated,
        method: predictor.clone(),
        sample_mode: sample.mode,
        sample_seed: sample.seed,
        comparison: mode,
        wall_time_secs: started.elapsed().as_secs_f64(),
    })
}

fn resolve(g: &BipartiteGraph, pair: &EvalPair) -> Result<(UserIdx, VenueIdx), EvalError> {
    let u = g
        .user_idx(&pair.user)
        .ok_or_else(|| EvalError::UnknownUser(pair.user.clone()))?;
    let v = g
        .venue_idx(&pair.venue)
        .ok_or_else(|| EvalError::UnknownVenue(pair.venue.clone()))?;
    Ok((u, v))
}

/// Score a list of pairs against a fixed graph, one score vector per
/// distinct user, users fanned out across threads. Isolated users score
/// zero everywhere and are counted instead of failing.
fn batch_scores(
    scorer: &Scorer<'_>,
    g: &BipartiteGraph,
    pairs: &[EvalPair],
    isolated: &mut u64,
) -> Result<Vec<f64>, EvalError> {
    let mut by_user: HashMap<UserIdx, Vec<(usize, VenueIdx)>> = HashMap::new();
    for (slot, pair) in pairs.iter().enumerate() {
        let (u, v) = resolve(g, pair)?;
        by_user.entry(u).or_default().push((slot, v));
    }
    let mut groups: Vec<(UserIdx, Vec<(usize, VenueIdx)>)> = by_user.into_iter().collect();
    groups.sort_unstable_by_key(|(u, _)| *u);

    let results: Vec<Result<(Vec<(usize, f64)>, bool), EvalError>> = groups
        .par_iter()
        .map(|(u, wanted)| {
            match scorer.score_user(*u) {
                Ok(vec) => {
                    let scores = wanted.iter().map(|&(slot, v)| (slot, vec.get(v))).collect();
                    Ok((scores, false))
                }
                Err(PredictError::IsolatedUser { .. }) => {
                    let scores = wanted.iter().map(|&(slot, _)| (slot, 0.0)).collect();
                    Ok((scores, true))
                }
                Err(source) => Err(EvalError::Scorer {
                    user: g.user_id(*u).to_string(),
                    venue: g.venue_id(wanted[0].1).to_string(),
                    source,
                }),
            }
        })
        .collect();

    let mut scores = vec![0.0f64; pairs.len()];
    for result in results {
        let (slot_scores, was_isolated) = result?;
        if was_isolated {
            *isolated += 1;
        }
        for (slot, score) in slot_scores {
            if !score.is_finite() {
                return Err(EvalError::NonFiniteScore {
                    user: pairs[slot].user.clone(),
                    venue: pairs[slot].venue.clone(),
                });
            }
            scores[slot] = score;
        }
    }
    Ok(scores)
}

/// Remove, score, restore — one positive pair at a time. The graph is
/// structurally identical afterwards.
fn incremental_scores(
    g: &mut BipartiteGraph,
    pairs: &[EvalPair],
    predictor: &PredictorConfig,
    window: Option<(i64, i64)>,
    isolated: &mut u64,
) -> Result<Vec<f64>, EvalError> {
    let mut scores = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let (u, v) = resolve(g, pair)?;
        let record = g
            .remove_pair(u, v)
            .map_err(|_| EvalError::PairNotConnected {
                user: pair.user.clone(),
                venue: pair.venue.clone(),
            })?;
        let outcome = {
            let scorer = Scorer::with_window(g, predictor.clone(), window)
                .map_err(EvalError::Config)?;
            scorer.score_pair(u, v)
        };
        g.restore_pair(record);
        let score = match outcome {
            Ok(s) => s,
            Err(PredictError::IsolatedUser { .. }) => {
                *isolated += 1;
                0.0
            }
            Err(source) => {
                return Err(EvalError::Scorer {
                    user: pair.user.clone(),
                    venue: pair.venue.clone(),
                    source,
                })
            }
        };
        if !score.is_finite() {
            return Err(EvalError::NonFiniteScore {
                user: pair.user.clone(),
                venue: pair.venue.clone(),
            });
        }
        scores.push(score);
    }
    Ok(scores)
}

/// Win/tie/comparison counts behind an AUC value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AucCounts {
    pub n_wins: u64,
    pub n_ties: u64,
    pub n_comparisons: u64,
}

impl AucCounts {
    pub fn auc(&self) -> f64 {
        (self.n_wins as f64 + 0.5 * self.n_ties as f64) / self.n_comparisons as f64
    }
}

/// AUC over two raw score sets, without any graph involved.
pub fn auc_from_scores(pos: &[f64], neg: &[f64], mode: ComparisonMode) -> AucCounts {
    let (n_wins, n_ties, n_comparisons) = match mode {
        ComparisonMode::Exact => auc_exact(pos, neg),
        ComparisonMode::Sampled { n, seed } => auc_sampled(pos, neg, n, seed),
    };
    AucCounts {
        n_wins,
        n_ties,
        n_comparisons,
    }
}

/// Exact all-pairs comparison via a sorted negative array: for each positive
/// score, binary search counts strictly-lower and equal negatives.
fn auc_exact(pos: &[f64], neg: &[f64]) -> (u64, u64, u64) {
    let mut sorted: Vec<f64> = neg.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let mut wins = 0u64;
    let mut ties = 0u64;
    for &p in pos {
        let below = sorted.partition_point(|&x| x < p) as u64;
        let below_or_equal = sorted.partition_point(|&x| x <= p) as u64;
        wins += below;
        ties += below_or_equal - below;
    }
    (wins, ties, pos.len() as u64 * neg.len() as u64)
}

/// Randomly sampled comparisons, deterministic for a given seed.
fn auc_sampled(pos: &[f64], neg: &[f64], n: u64, seed: u64) -> (u64, u64, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut wins = 0u64;
    let mut ties = 0u64;
    for _ in 0..n {
        let p = pos[rng.gen_range(0..pos.len())];
        let q = neg[rng.gen_range(0..neg.len())];
        if p > q {
            wins += 1;
        } else if p == q {
            ties += 1;
        }
    }
    (wins, ties, n)
}

/// One cell of an evaluation grid.
#[derive(Debug)]
pub struct GridCell {
    pub sample_index: usize,
    pub method: PredictorConfig,
    pub result: Result<AucReport, EvalError>,
}

/// Evaluate the cross product of samples and predictors, ordered (sample,
/// predictor). Cell failures are recorded in place without aborting the
/// remaining cells. Batch samples are re-applied to `g` to derive their
/// residual graph; time samples run on a scratch copy.
pub fn evaluate_grid(
    g: &BipartiteGraph,
    samples: &[EvalSample],
    predictors: &[PredictorConfig],
    mode: ComparisonMode,
) -> Vec<GridCell> {
    let mut cells = Vec::with_capacity(samples.len() * predictors.len());
    for (sample_index, sample) in samples.iter().enumerate() {
        let base = match sample.mode {
            SampleMode::RandomBatch { .. } => apply_holdout(g, sample),
            SampleMode::TimeIncremental { .. } => Ok(g.clone()),
        };
        match base {
            Ok(mut base) => {
                for predictor in predictors {
                    let result = evaluate_auc(&mut base, sample, predictor, mode);
                    cells.push(GridCell {
                        sample_index,
                        method: predictor.clone(),
                        result,
                    });
                }
            }
            Err(err) => {
                // The sample itself cannot be applied; fail every cell of
                // this row with the same message.
                for predictor in predictors {
                    cells.push(GridCell {
                        sample_index,
                        method: predictor.clone(),
                        result: Err(EvalError::Sample(clone_sample_error(&err))),
                    });
                }
            }
        }
    }
    cells
}

fn clone_sample_error(err: &SampleError) -> SampleError {
    match err {
        SampleError::UnknownPair { user, venue } => SampleError::UnknownPair {
            user: user.clone(),
            venue: venue.clone(),
        },
        other => SampleError::BadSampleFile {
            line: 0,
            reason: other.to_string(),
        },
    }
}
