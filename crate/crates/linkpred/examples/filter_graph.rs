//! Build the bipartite multigraph and apply the two preprocessing filters:
//! drop low-degree venues, then drop venues dominated by a single user.
//!
//! Run with: `cargo run --example filter_graph`

use linkpred::graph::{BipartiteGraph, DegreeKind};
use linkpred::synth::{generate, SynthConfig};

fn describe(label: &str, g: &BipartiteGraph) {
    println!(
        "{label:<18} {} users, {} venues, {} distinct pairs, {} check-ins",
        g.n_users(),
        g.n_venues(),
        g.n_pairs(),
        g.n_checkins()
    );
}

fn main() {
    let checkins = generate(&SynthConfig::default());
    let raw = BipartiteGraph::from_checkins(&checkins);
    describe("raw graph:", &raw);

    // Degree filter: venues need at least 20 check-ins to be predictable.
    let after_degree = raw.filter_low_degree_venues(20, DegreeKind::Weighted);
    describe("degree >= 20:", &after_degree);
    println!(
        "                   removed {:.0}% of distinct edges",
        100.0 * (1.0 - after_degree.n_pairs() as f64 / raw.n_pairs() as f64)
    );

    // Dominance filter: a venue where one user makes 90% of the check-ins
    // is somebody's home or office, not something to recommend.
    let filtered = after_degree.filter_dominated_venues(0.9);
    describe("not dominated:", &filtered);

    // Degree views: binary counts distinct neighbors, weighted multilinks.
    let busiest = filtered
        .venues()
        .max_by_key(|&v| filtered.venue_degrees(v).weighted)
        .expect("nonempty graph");
    let d = filtered.venue_degrees(busiest);
    println!(
        "busiest venue {} has {} visitors over {} check-ins",
        filtered.venue_id(busiest),
        d.binary,
        d.weighted
    );

    // The filtered graph serializes to a TSV edge list for caching.
    let mut tsv = Vec::new();
    filtered.write_edge_tsv(&mut tsv).expect("serialize");
    println!(
        "edge list: {} rows, {} bytes",
        filtered.n_pairs(),
        tsv.len()
    );
    let head = String::from_utf8_lossy(&tsv);
    for line in head.lines().take(3) {
        println!("  {line}");
    }
}
