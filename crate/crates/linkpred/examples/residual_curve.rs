//! Structure loss under batch holdout: how many check-ins survive as the
//! sampled fraction grows.
//!
//! Run with: `cargo run --example residual_curve`

use linkpred::graph::{BipartiteGraph, DegreeKind};
use linkpred::sampling::{residual_checkin_curve, PairWeighting, SampleOptions};
use linkpred::synth::{generate, SynthConfig};

fn main() {
    let checkins = generate(&SynthConfig::default());
    let g = BipartiteGraph::from_checkins(&checkins)
        .filter_low_degree_venues(10, DegreeKind::Weighted)
        .filter_dominated_venues(0.9);
    let total = g.n_checkins();
    println!("filtered graph holds {total} check-ins");

    let fractions = [0.05, 0.10, 0.15, 0.20, 0.25, 0.30];
    for weighting in [PairWeighting::Checkin, PairWeighting::Uniform] {
        let options = SampleOptions {
            weighting,
            ..SampleOptions::default()
        };
        // Nested: one permutation shared across the grid, so the curve is
        // monotone for a single seed.
        let curve =
            residual_checkin_curve(&g, &fractions, 7, true, &options).expect("curve");
        println!("\n{weighting} weighting:");
        println!("{:>10} {:>12} {:>10}", "fraction", "remaining", "percent");
        for (fraction, remaining) in curve {
            println!(
                "{fraction:>10.2} {remaining:>12} {:>9.1}%",
                100.0 * remaining as f64 / total as f64
            );
        }
    }
    println!(
        "\ncheck-in weighting removes heavy pairs first, so the network \
         collapses much faster than under uniform pair selection"
    );
}
