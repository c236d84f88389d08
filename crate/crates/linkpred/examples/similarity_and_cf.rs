//! Adamic-Adar user similarity and collaborative filtering on a small graph
//! where the numbers can be followed by hand.
//!
//! Run with: `cargo run --example similarity_and_cf`

use linkpred::graph::BipartiteGraph;
use linkpred::ingest::CheckIn;
use linkpred::predict::{similarity, Adjacency};

fn checkin(user: &str, venue: &str) -> CheckIn {
    CheckIn {
        user_id: user.into(),
        venue_id: venue.into(),
        category: "Bar".into(),
        latitude: 1.0,
        longitude: 2.0,
        timestamp: 0,
    }
}

fn main() {
    // U1: V1,V2   U2: V1,V2,V3   U3: V3,V4 — every venue degree is 2
    // except V4 (degree 1).
    let g = BipartiteGraph::from_checkins(&[
        checkin("U1", "V1"),
        checkin("U1", "V2"),
        checkin("U2", "V1"),
        checkin("U2", "V2"),
        checkin("U2", "V3"),
        checkin("U3", "V3"),
        checkin("U3", "V4"),
    ]);

    println!("pairwise Adamic-Adar similarities (1/ln(degree) per shared venue):");
    for a in g.users() {
        for b in g.users() {
            if a < b {
                let sim = similarity::user_similarity_aa(&g, a, b);
                println!("  sim({}, {}) = {sim:.4}", g.user_id(a), g.user_id(b));
            }
        }
    }
    // U1 and U2 share V1 and V2: 2/ln(2) = 2.8854.
    // U2 and U3 share V3 only:   1/ln(2) = 1.4427.

    let u2 = g.user_idx("U2").unwrap();
    println!("\ncollaborative filtering scores for U2:");
    let scores = similarity::cf_vector(&g, u2, Adjacency::Binary);
    for v in g.venues() {
        println!("  score(U2, {}) = {:.4}", g.venue_id(v), scores[v.as_usize()]);
    }
    // V4 is visited only by U3, so score(U2, V4) is
    // sim(U2,U3) / (sim(U2,U1) + sim(U2,U3)) = 1/3.
    let v4 = g.venue_idx("V4").unwrap();
    let direct = similarity::score_cf(&g, u2, v4, Adjacency::Binary);
    println!("\nper-pair call agrees: score(U2, V4) = {direct:.4}");
}
