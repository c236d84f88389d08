//! Thin CLI over the benchmark pipeline: every subcommand parses flags into
//! a [`RunConfig`] and delegates to the library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use linkpred::bench::{self, Overrides, RunConfig};

#[derive(Parser)]
#[command(
    name = "linkpred",
    about = "Bipartite link prediction benchmarks on check-in data",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// TOML run configuration; flags below override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Check-in TSV dataset path.
    #[arg(long, global = true)]
    dataset: Option<PathBuf>,
    /// Output directory for reports and caches.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// RNG seed (replaces the config seed list).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 means one per core.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Predictor method, repeatable (grm, assort, cf, nbi, nbi_mod, nbi_us,
    /// nbi_multistep, nbi_time, loc_baseline, type_baseline).
    #[arg(long = "method", global = true)]
    methods: Vec<String>,
    /// Random holdout fraction in (0, 1], repeatable.
    #[arg(long = "fraction", global = true)]
    fractions: Vec<f64>,
    /// Time window START:END (epoch seconds or RFC 3339), repeatable.
    #[arg(long = "window", global = true)]
    windows: Vec<String>,
    /// Schema overrides, e.g. "user=0,venue=1,category=3,lat=4,lon=5,time=7".
    #[arg(long, global = true)]
    schema: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Dataset and filtered-graph statistics plus degree histograms.
    Stats(CommonArgs),
    /// Run the benchmark grid and write results.csv, curves and a manifest.
    Bench(CommonArgs),
    /// Residual check-ins after random holdout across the fraction grid.
    ResidualCurve(CommonArgs),
    /// Materialize evaluation samples to disk.
    Sample(CommonArgs),
    /// Materialize the filtered graph as a TSV edge list.
    Filter(CommonArgs),
}

fn build_config(args: &CommonArgs) -> Result<RunConfig, bench::BenchError> {
    let mut config = match &args.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    config.apply_overrides(&Overrides {
        dataset: args.dataset.clone(),
        out: args.out.clone(),
        seed: args.seed,
        workers: args.workers,
        methods: args.methods.clone(),
        fractions: args.fractions.clone(),
        windows: args.windows.clone(),
        schema: args.schema.clone(),
    })?;
    config.materialize_seeds();
    Ok(config)
}

fn run(command: &Command) -> Result<(), bench::BenchError> {
    match command {
        Command::Stats(args) => {
            let report = bench::run_stats(&build_config(args)?)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("json"));
        }
        Command::Bench(args) => {
            let out = bench::run_bench(&build_config(args)?)?;
            eprintln!(
                "wrote {} rows ({} failed cells) to {}",
                out.rows.len(),
                out.n_failed_cells,
                out.results_file.display()
            );
            for path in &out.curve_files {
                eprintln!("curve: {}", path.display());
            }
            eprintln!("manifest: {}", out.manifest_file.display());
        }
        Command::ResidualCurve(args) => {
            let out = bench::run_residual_curve(&build_config(args)?)?;
            println!("fraction,remaining_checkins");
            for row in &out.rows {
                println!("{},{}", row.fraction, row.remaining_checkins);
            }
            eprintln!("wrote {}", out.file.display());
        }
        Command::Sample(args) => {
            let out = bench::run_sample(&build_config(args)?)?;
            for path in &out.files {
                println!("{}", path.display());
            }
        }
        Command::Filter(args) => {
            let out = bench::run_filter(&build_config(args)?)?;
            println!("{}", serde_json::to_string_pretty(&out).expect("json"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
