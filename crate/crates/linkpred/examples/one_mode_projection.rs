//! Project the bipartite graph onto users: two users connect when they share
//! a venue, weighted by how many venues they share.
//!
//! Run with: `cargo run --example one_mode_projection`

use linkpred::graph::BipartiteGraph;
use linkpred::ingest::CheckIn;

fn checkin(user: &str, venue: &str) -> CheckIn {
    CheckIn {
        user_id: user.into(),
        venue_id: venue.into(),
        category: "Cafe".into(),
        latitude: 46.05,
        longitude: 14.5,
        timestamp: 0,
    }
}

fn main() {
    // ana and bob share two venues; bob and cyd share one; ana and cyd none.
    let g = BipartiteGraph::from_checkins(&[
        checkin("ana", "espresso-bar", ),
        checkin("ana", "old-library"),
        checkin("bob", "espresso-bar"),
        checkin("bob", "old-library"),
        checkin("bob", "river-walk"),
        checkin("cyd", "river-walk"),
        checkin("cyd", "north-gym"),
    ]);

    let projection = g.project_users();
    println!(
        "projected {} users into {} weighted edges:",
        projection.n_users(),
        projection.n_edges()
    );
    for &(a, b, weight) in projection.edges() {
        println!(
            "  {} -- {}  (shared venues: {weight})",
            projection.user_id(a),
            projection.user_id(b)
        );
    }

    let ana = g.user_idx("ana").unwrap();
    let bob = g.user_idx("bob").unwrap();
    let cyd = g.user_idx("cyd").unwrap();
    assert_eq!(projection.weight(ana, bob), 2);
    assert_eq!(projection.weight(bob, cyd), 1);
    assert_eq!(projection.weight(ana, cyd), 0);
    println!("no edge between ana and cyd: they share no venue");
}
