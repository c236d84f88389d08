//! The core benchmark loop: random batch holdout, then AUC for every method
//! at every sample size.
//!
//! Run with: `cargo run --example random_holdout_auc`

use linkpred::eval::{evaluate_grid, ComparisonMode};
use linkpred::graph::{BipartiteGraph, DegreeKind};
use linkpred::predict::{Method, PredictorConfig};
use linkpred::sampling::sample_random;
use linkpred::synth::{generate, SynthConfig};

fn main() {
    let checkins = generate(&SynthConfig::default());
    let g = BipartiteGraph::from_checkins(&checkins)
        .filter_low_degree_venues(10, DegreeKind::Weighted)
        .filter_dominated_venues(0.9);
    println!(
        "filtered graph: {} users, {} venues, {} check-ins\n",
        g.n_users(),
        g.n_venues(),
        g.n_checkins()
    );

    let fractions = [0.05, 0.10, 0.20, 0.30];
    let methods = [
        PredictorConfig::new(Method::Grm),
        PredictorConfig::new(Method::Assort),
        PredictorConfig::new(Method::Cf),
        PredictorConfig::new(Method::Nbi),
    ];

    // One sample per fraction; heavier pairs are held out preferentially
    // (check-in weighting), which is also why the residual shrinks so fast.
    let samples: Vec<_> = fractions
        .iter()
        .map(|&fraction| sample_random(&g, fraction, 42).expect("sample").0)
        .collect();

    let cells = evaluate_grid(&g, &samples, &methods, ComparisonMode::Exact);

    print!("{:>10}", "fraction");
    for m in &methods {
        print!("{:>10}", m.method.name());
    }
    println!();
    for (i, &fraction) in fractions.iter().enumerate() {
        print!("{fraction:>10.2}");
        for j in 0..methods.len() {
            let report = cells[i * methods.len() + j]
                .result
                .as_ref()
                .expect("cell evaluates");
            print!("{:>10.4}", report.auc);
        }
        println!();
    }
    println!("\neach cell compares every held-out pair against every unconnected pair");
}
