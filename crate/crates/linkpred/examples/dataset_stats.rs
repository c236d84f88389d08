//! Parse a check-in TSV and print dataset statistics as JSON.
//!
//! Run with: `cargo run --example dataset_stats [path/to/checkins.tsv]`
//!
//! Without an argument a small synthetic dataset is generated in memory so
//! the example is self-contained. Real dumps usually use the default
//! eight-column layout; the synthetic file uses the six-column identity
//! layout, picked here via `Schema::identity()`.

use linkpred::ingest::{load_checkins, load_dataset, OnError, Schema};
use linkpred::synth::{generate, to_tsv, SynthConfig};

fn main() {
    let loaded = match std::env::args().nth(1) {
        Some(path) => {
            println!("loading {path} with the default dump schema");
            load_dataset(&path, &Schema::default(), OnError::Skip).expect("load dataset")
        }
        None => {
            println!("no path given; generating a synthetic dataset");
            let tsv = to_tsv(&generate(&SynthConfig::default()), &Schema::identity());
            load_checkins(tsv.as_bytes(), &Schema::identity(), OnError::Skip).expect("parse")
        }
    };

    println!(
        "{}",
        serde_json::to_string_pretty(&loaded.stats).expect("stats are serializable")
    );
    if loaded.skipped_lines > 0 {
        println!("skipped {} malformed lines", loaded.skipped_lines);
    }

    let span_days = match (loaded.stats.time_min, loaded.stats.time_max) {
        (Some(a), Some(b)) => (b - a) as f64 / 86_400.0,
        _ => 0.0,
    };
    println!("timespan: {span_days:.0} days");
    println!(
        "check-ins per user: {:.1}",
        loaded.stats.n_checkins as f64 / loaded.stats.n_users.max(1) as f64
    );
}
