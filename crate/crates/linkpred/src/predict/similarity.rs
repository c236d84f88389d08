//! User-user similarity and collaborative filtering.
//!
//! Similarity is the Adamic-Adar index over the bipartite structure: for a
//! pair of users, the sum of `1 / ln(degree)` over their common distinct
//! venues. Venues of binary degree <= 1 are skipped (they cannot be common
//! to two users and `ln 1` would blow up the share).
//!
//! Collaborative filtering scores a venue for a user as the similarity mass
//! of the other users who checked in there, normalized by the user's total
//! similarity mass, so scores stay in [0, 1].

use crate::graph::{BipartiteGraph, UserIdx, VenueIdx};

use super::Adjacency;

/// Contribution of one shared venue to the similarity sum. Under weighted
/// adjacency the venue's weighted degree replaces the distinct-user count.
fn venue_share(g: &BipartiteGraph, v: VenueIdx, adjacency: Adjacency) -> Option<f64> {
    let d = g.venue_degrees(v);
    if d.binary <= 1 {
        return None;
    }
    let degree = match adjacency {
        Adjacency::Binary => d.binary as f64,
        Adjacency::Weighted => d.weighted as f64,
    };
    Some(1.0 / degree.ln())
}

/// Adamic-Adar similarity between two users; zero when they share no venue.
/// Symmetric in its arguments.
pub fn user_similarity_aa(g: &BipartiteGraph, u1: UserIdx, u2: UserIdx) -> f64 {
    user_similarity(g, u1, u2, Adjacency::Binary)
}

/// [`user_similarity_aa`] with an explicit adjacency mode.
pub fn user_similarity(
    g: &BipartiteGraph,
    u1: UserIdx,
    u2: UserIdx,
    adjacency: Adjacency,
) -> f64 {
    let a = g.user_venues(u1);
    let b = g.user_venues(u2);
    let mut sum = 0.0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                if let Some(share) = venue_share(g, a[i].0, adjacency) {
                    sum += share;
                }
                i += 1;
                j += 1;
            }
        }
    }
    sum
}

/// Similarities from `u` to every user, dense by user index (`sims[u] = 0`).
/// One pass over the two-hop neighborhood; contributions accumulate in
/// ascending venue order, matching the pairwise formula term by term.
pub fn similarities_from(g: &BipartiteGraph, u: UserIdx, adjacency: Adjacency) -> Vec<f64> {
    let mut sims = vec![0.0; g.n_users()];
    for &(v, _) in g.user_venues(u) {
        if let Some(share) = venue_share(g, v, adjacency) {
            for &(u2, _) in g.venue_users(v) {
                if u2 != u {
                    sims[u2.as_usize()] += share;
                }
            }
        }
    }
    sims
}

/// Collaborative-filtering score of a single pair: the similarity sum of the
/// other users at `v`, normalized by the total similarity sum for `u`. Zero
/// when `u` is similar to nobody.
pub fn score_cf(g: &BipartiteGraph, u: UserIdx, v: VenueIdx, adjacency: Adjacency) -> f64 {
    let sims = similarities_from(g, u, adjacency);
    let total: f64 = sims.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let num: f64 = g
        .venue_users(v)
        .iter()
        .filter(|&&(u2, _)| u2 != u)
        .map(|&(u2, _)| sims[u2.as_usize()])
        .sum();
    num / total
}

/// Collaborative-filtering scores for every venue at once.
pub fn cf_vector(g: &BipartiteGraph, u: UserIdx, adjacency: Adjacency) -> Vec<f64> {
    let sims = similarities_from(g, u, adjacency);
    let total: f64 = sims.iter().sum();
    let mut scores = vec![0.0; g.n_venues()];
    if total <= 0.0 {
        return scores;
    }
    for (i, &sim) in sims.iter().enumerate() {
        if sim > 0.0 {
            for &(v, _) in g.user_venues(UserIdx(i as u32)) {
                scores[v.as_usize()] += sim;
            }
        }
    }
    for s in &mut scores {
        *s /= total;
    }
    scores
}
