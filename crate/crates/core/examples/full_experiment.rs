//! End-to-end run through the harness: writes the model, profit table,
//! sweep CSVs and a manifest, then prints the report.
//!
//! ```bash
//! cargo run --release -p margin-bench --example full_experiment
//! cargo run --release -p margin-bench --example full_experiment -- path/to/exp.cfg
//! ```

use std::path::PathBuf;

use margin_bench::harness::{report, run, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config_path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic.cfg"));
    let mut cfg = ExperimentConfig::load(&config_path)?;
    cfg.out_dir = std::env::temp_dir().join("margin-bench-example");

    let summary = run(&cfg)?;
    println!(
        "{} users, {} items; test RMSE {:.4}; config fingerprint {}",
        summary.n_users,
        summary.n_items,
        summary.test_rmse,
        &summary.config_fingerprint[..16]
    );
    for outcome in &summary.outcomes {
        println!("\n== {} ==", outcome.strategy);
        print!("{}", report(&outcome.csv_path)?);
    }
    Ok(())
}
