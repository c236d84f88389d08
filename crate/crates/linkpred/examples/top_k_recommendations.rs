//! Produce a top-k venue recommendation list for one user, excluding the
//! venues they already visit.
//!
//! Run with: `cargo run --example top_k_recommendations`

use linkpred::graph::BipartiteGraph;
use linkpred::predict::{Method, PredictorConfig, Scorer};
use linkpred::synth::{generate, SynthConfig};

fn main() {
    let checkins = generate(&SynthConfig::default());
    let g = BipartiteGraph::from_checkins(&checkins);
    let user = g
        .users()
        .max_by_key(|&u| g.user_degrees(u).weighted)
        .expect("nonempty graph");
    println!(
        "recommending for {} ({} distinct venues, {} check-ins)\n",
        g.user_id(user),
        g.user_degrees(user).binary,
        g.user_degrees(user).weighted
    );

    let visited: Vec<_> = g.user_venues(user).iter().map(|&(v, _)| v).collect();
    for method in [Method::Grm, Method::Cf, Method::Nbi] {
        let scorer = Scorer::new(&g, PredictorConfig::new(method)).expect("config valid");
        let scores = scorer.score_user(user).expect("user has venues");
        // Connected venues may carry scores; ranking skips them.
        let ranked = scores.ranked(&visited);
        let top: Vec<String> = ranked
            .iter()
            .take(5)
            .map(|&v| format!("{} ({:.3})", g.venue_id(v), scores.get(v)))
            .collect();
        println!("{method:>4}: {}", top.join(", "));
    }
}
