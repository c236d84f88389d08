//! Network-based inference: two-phase resource allocation.
//!
//! For a user, every distinct venue they checked in at starts with one unit
//! of resource. Step A spreads each venue's resource over its users, step B
//! spreads each user's resource back over their venues; one round is A then
//! B, and the venue resources after the final round are the scores. Under
//! binary adjacency the spread is an equal split over distinct neighbors;
//! under weighted adjacency shares are proportional to check-in counts.
//!
//! Both half-steps conserve total resource, which the tests lean on. The
//! derived variants either multiply the final scores by metadata factors
//! (venue type affinity, location proximity, global degree, trendiness) or
//! inject similarity-weighted resource into the user phase.

use crate::graph::{BipartiteGraph, UserIdx, VenueIdx};

use super::baselines::{haversine_km, mean_location};
use super::similarity::similarities_from;
use super::{Adjacency, PredictError, PredictorConfig, ScoreVector};

/// Venue resources for `u` after `steps` rounds of the two-phase flow.
pub fn nbi_vector(
    g: &BipartiteGraph,
    u: UserIdx,
    adjacency: Adjacency,
    steps: u32,
) -> Result<Vec<f64>, PredictError> {
    flow(g, u, adjacency, steps, 0.0, None)
}

/// [`nbi_vector`] with similarity-weighted resource added to every user
/// after each step A: user `u2` gains `sim_weight * sim(u, u2) / S` where
/// `S` sums similarities from `u` to everyone. No-op when `S` is zero.
pub fn nbi_us_vector(
    g: &BipartiteGraph,
    u: UserIdx,
    adjacency: Adjacency,
    steps: u32,
    sim_weight: f64,
) -> Result<Vec<f64>, PredictError> {
    flow(g, u, adjacency, steps, sim_weight, None)
}

/// [`nbi_vector`] recording the total resource after every half-step, in
/// order (A, B, A, B, ...). Used to check conservation.
pub fn nbi_vector_traced(
    g: &BipartiteGraph,
    u: UserIdx,
    adjacency: Adjacency,
    steps: u32,
    trace: &mut Vec<f64>,
) -> Result<Vec<f64>, PredictError> {
    flow(g, u, adjacency, steps, 0.0, Some(trace))
}

fn flow(
    g: &BipartiteGraph,
    u: UserIdx,
    adjacency: Adjacency,
    steps: u32,
    sim_weight: f64,
    mut trace: Option<&mut Vec<f64>>,
) -> Result<Vec<f64>, PredictError> {
    let seeds = g.user_venues(u);
    if seeds.is_empty() {
        return Err(PredictError::IsolatedUser {
            user: g.user_id(u).to_string(),
        });
    }
    let sims = if sim_weight > 0.0 {
        let sims = similarities_from(g, u, adjacency);
        let total: f64 = sims.iter().sum();
        (total > 0.0).then_some((sims, total))
    } else {
        None
    };

    let mut venue_res = vec![0.0; g.n_venues()];
    for &(v, _) in seeds {
        venue_res[v.as_usize()] = 1.0;
    }
    let mut user_res = vec![0.0; g.n_users()];
    for _ in 0..steps {
        // Step A: venues -> users.
        user_res.iter_mut().for_each(|r| *r = 0.0);
        for (vi, &res) in venue_res.iter().enumerate() {
            if res == 0.0 {
                continue;
            }
            let v = VenueIdx(vi as u32);
            let d = g.venue_degrees(v);
            match adjacency {
                Adjacency::Binary => {
                    let share = res / d.binary as f64;
                    for &(u2, _) in g.venue_users(v) {
                        user_res[u2.as_usize()] += share;
                    }
                }
                Adjacency::Weighted => {
                    for &(u2, c) in g.venue_users(v) {
                        user_res[u2.as_usize()] += res * c as f64 / d.weighted as f64;
                    }
                }
            }
        }
        if let Some(trace) = trace.as_deref_mut() {
            trace.push(user_res.iter().sum());
        }
        if let Some((sims, total)) = &sims {
            for (r, sim) in user_res.iter_mut().zip(sims) {
                *r += sim_weight * sim / total;
            }
        }
        // Step B: users -> venues.
        venue_res.iter_mut().for_each(|r| *r = 0.0);
        for (ui, &res) in user_res.iter().enumerate() {
            if res == 0.0 {
                continue;
            }
            let u2 = UserIdx(ui as u32);
            let d = g.user_degrees(u2);
            match adjacency {
                Adjacency::Binary => {
                    let share = res / d.binary as f64;
                    for &(v, _) in g.user_venues(u2) {
                        venue_res[v.as_usize()] += share;
                    }
                }
                Adjacency::Weighted => {
                    for &(v, c) in g.user_venues(u2) {
                        venue_res[v.as_usize()] += res * c as f64 / d.weighted as f64;
                    }
                }
            }
        }
        if let Some(trace) = trace.as_deref_mut() {
            trace.push(venue_res.iter().sum());
        }
    }
    Ok(venue_res)
}

/// Multiply NBI scores by the metadata factors of the modified variant:
/// `(1 + tw * typeFrac) * (1 + lw * exp(-dist/d0)) * (1 + dw * degNorm)`.
/// A factor whose metadata is missing defaults to 1.
pub fn apply_metadata_factors(
    g: &BipartiteGraph,
    u: UserIdx,
    mut scores: Vec<f64>,
    cfg: &PredictorConfig,
    max_binary_degree: f64,
) -> Vec<f64> {
    let user_loc = mean_location(g, u);
    // Per-category fraction of the user's check-ins, by multiplicity.
    let total_checkins = g.user_degrees(u).weighted as f64;
    let mut category_counts: std::collections::HashMap<&str, u64> =
        std::collections::HashMap::new();
    for &(v, c) in g.user_venues(u) {
        if let Some(meta) = g.venue_meta(v) {
            *category_counts.entry(meta.category.as_str()).or_insert(0) += c as u64;
        }
    }
    for (vi, score) in scores.iter_mut().enumerate() {
        if *score == 0.0 {
            continue;
        }
        let v = VenueIdx(vi as u32);
        let mut factor = 1.0;
        if let Some(meta) = g.venue_meta(v) {
            if total_checkins > 0.0 {
                let type_frac = category_counts
                    .get(meta.category.as_str())
                    .map(|&c| c as f64 / total_checkins)
                    .unwrap_or(0.0);
                factor *= 1.0 + cfg.type_weight * type_frac;
            }
            if let Some((lat, lon)) = user_loc {
                let dist = haversine_km(lat, lon, meta.latitude, meta.longitude);
                factor *= 1.0 + cfg.loc_weight * (-dist / cfg.loc_scale_km).exp();
            }
        }
        if max_binary_degree > 0.0 {
            let deg_norm = g.venue_degrees(v).binary as f64 / max_binary_degree;
            factor *= 1.0 + cfg.degree_weight * deg_norm;
        }
        *score *= factor;
    }
    scores
}

/// Basic NBI scores for one user (single round).
pub fn score_nbi(
    g: &BipartiteGraph,
    u: UserIdx,
    cfg: &PredictorConfig,
) -> Result<ScoreVector, PredictError> {
    let scores = nbi_vector(g, u, cfg.adjacency, cfg.steps)?;
    Ok(ScoreVector { user: u, scores })
}

/// NBI with `cfg.steps` rounds of the flow; `steps = 1` equals [`score_nbi`].
pub fn score_nbi_multistep(
    g: &BipartiteGraph,
    u: UserIdx,
    cfg: &PredictorConfig,
) -> Result<ScoreVector, PredictError> {
    score_nbi(g, u, cfg)
}

/// NBI scores scaled by venue metadata (type affinity, proximity, degree).
pub fn score_nbi_mod(
    g: &BipartiteGraph,
    u: UserIdx,
    cfg: &PredictorConfig,
) -> Result<ScoreVector, PredictError> {
    let base = nbi_vector(g, u, cfg.adjacency, cfg.steps)?;
    let max_degree = g
        .venues()
        .map(|v| g.venue_degrees(v).binary)
        .max()
        .unwrap_or(0) as f64;
    Ok(ScoreVector {
        user: u,
        scores: apply_metadata_factors(g, u, base, cfg, max_degree),
    })
}

/// NBI with similarity-seeded user resources.
pub fn score_nbi_us(
    g: &BipartiteGraph,
    u: UserIdx,
    cfg: &PredictorConfig,
) -> Result<ScoreVector, PredictError> {
    let scores = nbi_us_vector(g, u, cfg.adjacency, cfg.steps, cfg.sim_weight)?;
    Ok(ScoreVector { user: u, scores })
}

/// NBI scores scaled by venue trendiness around the sample window:
/// `score * (1 + trend_weight * trend(v))` where `trend(v)` is the fraction
/// of the venue's check-ins within `trend_window_secs` of the window.
pub fn score_nbi_time(
    g: &BipartiteGraph,
    u: UserIdx,
    window: (i64, i64),
    cfg: &PredictorConfig,
) -> Result<ScoreVector, PredictError> {
    let base = nbi_vector(g, u, cfg.adjacency, cfg.steps)?;
    let trend = super::trend_table(g, window, cfg.trend_window_secs);
    let scores = base
        .iter()
        .zip(&trend)
        .map(|(s, t)| s * (1.0 + cfg.trend_weight * t))
        .collect();
    Ok(ScoreVector { user: u, scores })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predict::Method;
    use crate::testfix::{checkin, toy_graph};
    use approx::assert_relative_eq;

    fn venue_scores(g: &BipartiteGraph, scores: &[f64]) -> Vec<(String, f64)> {
        g.venues()
            .map(|v| (g.venue_id(v).to_string(), scores[v.as_usize()]))
            .collect()
    }

    #[test]
    fn toy_single_round_scores() {
        // Hand-traced flow for U1: V1=5/6, V2=5/6, V3=1/3, V4=0.
        let g = toy_graph();
        let u1 = g.user_idx("U1").unwrap();
        let scores = nbi_vector(&g, u1, Adjacency::Binary, 1).unwrap();
        let by_id = venue_scores(&g, &scores);
        let expected = [
            ("V1", 5.0 / 6.0),
            ("V2", 5.0 / 6.0),
            ("V3", 1.0 / 3.0),
            ("V4", 0.0),
        ];
        for ((id, got), (eid, want)) in by_id.iter().zip(expected) {
            assert_eq!(id, eid);
            assert_relative_eq!(*got, want, max_relative = 1e-12);
        }
        // Initial total was 2 (two seeded venues) and is conserved.
        assert_relative_eq!(scores.iter().sum::<f64>(), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn toy_two_round_scores() {
        // Second round by hand: V1=3/4, V2=3/4, V3=5/12, V4=1/12.
        let g = toy_graph();
        let u1 = g.user_idx("U1").unwrap();
        let scores = nbi_vector(&g, u1, Adjacency::Binary, 2).unwrap();
        let expected = [3.0 / 4.0, 3.0 / 4.0, 5.0 / 12.0, 1.0 / 12.0];
        for (v, want) in g.venues().zip(expected) {
            assert_relative_eq!(scores[v.as_usize()], want, max_relative = 1e-12);
        }
    }

    #[test]
    fn conservation_at_every_half_step() {
        let g = toy_graph();
        for u in g.users() {
            for steps in 1..=4 {
                let mut trace = Vec::new();
                let scores =
                    nbi_vector_traced(&g, u, Adjacency::Binary, steps, &mut trace).unwrap();
                let initial = g.user_degrees(u).binary as f64;
                assert_eq!(trace.len(), 2 * steps as usize);
                for total in trace {
                    assert_relative_eq!(total, initial, max_relative = 1e-9);
                }
                assert_relative_eq!(
                    scores.iter().sum::<f64>(),
                    initial,
                    max_relative = 1e-9
                );
            }
        }
    }

    #[test]
    fn single_user_single_venue_fixed_point() {
        let g = BipartiteGraph::from_checkins(&[checkin("u", "v", 1)]);
        let u = g.user_idx("u").unwrap();
        for steps in 1..=5 {
            let scores = nbi_vector(&g, u, Adjacency::Binary, steps).unwrap();
            assert_eq!(scores, vec![1.0]);
        }
    }

    #[test]
    fn isolated_user_errors() {
        let g = toy_graph();
        // V4 has degree 1; dropping it isolates nobody, so remove U3's pairs.
        let mut g = g;
        let u3 = g.user_idx("U3").unwrap();
        let v3 = g.venue_idx("V3").unwrap();
        let v4 = g.venue_idx("V4").unwrap();
        g.remove_pair(u3, v3).unwrap();
        g.remove_pair(u3, v4).unwrap();
        assert!(matches!(
            nbi_vector(&g, u3, Adjacency::Binary, 1),
            Err(PredictError::IsolatedUser { .. })
        ));
    }

    #[test]
    fn many_steps_approach_stationary_scores() {
        // On a connected component under binary adjacency the flow operator
        // has a stationary distribution proportional to venue degree.
        let g = toy_graph();
        let u1 = g.user_idx("U1").unwrap();
        let scores = nbi_vector(&g, u1, Adjacency::Binary, 200).unwrap();
        let total: f64 = scores.iter().sum();
        let degree_total: f64 = g
            .venues()
            .map(|v| g.venue_degrees(v).binary as f64)
            .sum();
        for v in g.venues() {
            let want = total * g.venue_degrees(v).binary as f64 / degree_total;
            assert_relative_eq!(scores[v.as_usize()], want, max_relative = 1e-6);
        }
    }

    #[test]
    fn zero_weight_variants_reduce_to_basic_exactly() {
        let g = toy_graph();
        for u in g.users() {
            let basic = score_nbi(&g, u, &PredictorConfig::new(Method::Nbi)).unwrap();

            let mut cfg = PredictorConfig::new(Method::NbiMod);
            cfg.type_weight = 0.0;
            cfg.loc_weight = 0.0;
            cfg.degree_weight = 0.0;
            assert_eq!(score_nbi_mod(&g, u, &cfg).unwrap(), basic);

            let mut cfg = PredictorConfig::new(Method::NbiUs);
            cfg.sim_weight = 0.0;
            assert_eq!(score_nbi_us(&g, u, &cfg).unwrap(), basic);

            let mut cfg = PredictorConfig::new(Method::NbiTime);
            cfg.trend_weight = 0.0;
            assert_eq!(score_nbi_time(&g, u, (0, 100), &cfg).unwrap(), basic);

            let cfg = PredictorConfig::new(Method::NbiMultistep).with_steps(1);
            assert_eq!(score_nbi_multistep(&g, u, &cfg).unwrap(), basic);
        }
    }

    #[test]
    fn us_variant_toy_values() {
        // For U1 with sim_weight 1: sims are U2=2/ln2, U3=0, S=2/ln2, so U2
        // gains exactly 1 after step A. Final: V1=V2=1/2+2/3=7/6, V3=2/3.
        let g = toy_graph();
        let u1 = g.user_idx("U1").unwrap();
        let scores = nbi_us_vector(&g, u1, Adjacency::Binary, 1, 1.0).unwrap();
        let expected = [7.0 / 6.0, 7.0 / 6.0, 2.0 / 3.0, 0.0];
        for (v, want) in g.venues().zip(expected) {
            assert_relative_eq!(scores[v.as_usize()], want, max_relative = 1e-12);
        }
    }

    #[test]
    fn us_variant_without_similar_users_matches_basic() {
        // U3 relative to a graph where it shares no venues: build one.
        let g = BipartiteGraph::from_checkins(&[
            checkin("a", "x", 1),
            checkin("a", "y", 2),
            checkin("b", "z", 3),
        ]);
        let b = g.user_idx("b").unwrap();
        let basic = nbi_vector(&g, b, Adjacency::Binary, 1).unwrap();
        let us = nbi_us_vector(&g, b, Adjacency::Binary, 1, 5.0).unwrap();
        assert_eq!(basic, us);
    }

    #[test]
    fn weighted_adjacency_uses_counts() {
        // u1 visits v1 three times and v2 once; u2 visits v1 once.
        let g = BipartiteGraph::from_checkins(&[
            checkin("u1", "v1", 1),
            checkin("u1", "v1", 2),
            checkin("u1", "v1", 3),
            checkin("u1", "v2", 4),
            checkin("u2", "v1", 5),
        ]);
        let u1 = g.user_idx("u1").unwrap();
        let v1 = g.venue_idx("v1").unwrap();
        let v2 = g.venue_idx("v2").unwrap();
        // Step A: v1 holds 1, splits 3:1 -> u1 3/4, u2 1/4; v2 -> u1 1.
        // u1 total 7/4, splits 3:1 over v1:v2; u2 sends 1/4 to v1.
        let scores = nbi_vector(&g, u1, Adjacency::Weighted, 1).unwrap();
        assert_relative_eq!(
            scores[v1.as_usize()],
            (7.0 / 4.0) * 0.75 + 0.25,
            max_relative = 1e-12
        );
        assert_relative_eq!(scores[v2.as_usize()], (7.0 / 4.0) * 0.25, max_relative = 1e-12);
        // Conservation still holds.
        assert_relative_eq!(scores.iter().sum::<f64>(), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn metadata_factor_arithmetic() {
        // nbi=1/3, typeFrac=0.5, dist=0, degNorm=1, all weights 1
        // -> (1/3) * 1.5 * 2 * 2 = 2.
        let mut cfg = PredictorConfig::new(Method::NbiMod);
        cfg.type_weight = 1.0;
        cfg.loc_weight = 1.0;
        cfg.degree_weight = 1.0;
        let mut checkins = vec![
            checkin("u", "target", 1),
            checkin("u", "other", 2),
            checkin("x", "target", 3),
        ];
        // Give every venue the same location so dist(u, target) = 0, and
        // make half of u's check-ins share target's category.
        for c in &mut checkins {
            c.latitude = 10.0;
            c.longitude = 20.0;
        }
        checkins[1].category = "Cafe".into();
        let g = BipartiteGraph::from_checkins(&checkins);
        let u = g.user_idx("u").unwrap();
        let target = g.venue_idx("target").unwrap();
        let base = nbi_vector(&g, u, Adjacency::Binary, 1).unwrap();
        let modified = apply_metadata_factors(&g, u, base.clone(), &cfg, 2.0);
        // target: typeFrac = 1/2 ("Bar" check-ins of u), dist 0, degNorm = 2/2.
        assert_relative_eq!(
            modified[target.as_usize()],
            base[target.as_usize()] * 1.5 * 2.0 * 2.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn zero_nbi_score_stays_zero_under_metadata() {
        let g = toy_graph();
        let u1 = g.user_idx("U1").unwrap();
        let cfg = PredictorConfig::new(Method::NbiMod);
        let score = score_nbi_mod(&g, u1, &cfg).unwrap();
        let v4 = g.venue_idx("V4").unwrap();
        assert_eq!(score.get(v4), 0.0, "multiplicative zero");
    }

    #[test]
    fn trend_factor_arithmetic() {
        // Venue with 3 of its 10 check-ins in the widened window and trend
        // weight 1 scores base * 1.3.
        let mut checkins = Vec::new();
        checkins.push(checkin("u", "hot", 1_000)); // outside the window
        for i in 0..3 {
            checkins.push(checkin("x", "hot", 100 + i));
        }
        for i in 0..6 {
            checkins.push(checkin("x", "hot", 10_000 + i));
        }
        let g = BipartiteGraph::from_checkins(&checkins);
        let u = g.user_idx("u").unwrap();
        let hot = g.venue_idx("hot").unwrap();
        let mut cfg = PredictorConfig::new(Method::NbiTime);
        cfg.trend_weight = 1.0;
        cfg.trend_window_secs = 50;
        // Window [50, 150) widened to [0, 200): 3 of 10 check-ins inside.
        let base = nbi_vector(&g, u, Adjacency::Binary, 1).unwrap();
        let scored = score_nbi_time(&g, u, (50, 150), &cfg).unwrap();
        assert_relative_eq!(
            scored.get(hot),
            base[hot.as_usize()] * 1.3,
            max_relative = 1e-12
        );
        // A venue with every check-in inside the widened window trends at 1.
        let trend = crate::predict::trend_table(&g, (0, 20_000), 50);
        assert_eq!(trend[hot.as_usize()], 1.0);
    }
}
