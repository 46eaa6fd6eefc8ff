//! Full in-process threshold sweep: the profit/accuracy tradeoff curve.
//!
//! ```bash
//! cargo run --release -p margin-bench --example threshold_sweep -- data/ml-1m/ratings.dat movielens-1m
//! ```
//!
//! Without arguments the bundled 200-rating fixture is used.

use std::path::PathBuf;
use std::time::Instant;

use margin_bench::evaluate::{threshold_grid, DEFAULT_RELEVANCE_CUTOFF};
use margin_bench::{
    assign_profits, find_optimal_threshold, load_ratings, split_holdout, sweep_thresholds, train, EvalSetup,
    Hyperparams, ProfitConfig, ProfitObjective, PurchaseModel, RatingFormat,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let (path, format) = match args.next() {
        Some(p) => (PathBuf::from(p), args.next().unwrap_or_else(|| "movielens-1m".into()).parse()?),
        None => (
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic_200.csv"),
            RatingFormat::Csv,
        ),
    };

    let started = Instant::now();
    let data = load_ratings(&path, format)?;
    let split = split_holdout(&data, 0.2, 42)?;
    let model = train(&split.train, &Hyperparams::default())?;
    println!(
        "{} ratings; test RMSE {:.4}; trained in {:.1}s",
        data.len(),
        model.rmse(&split.test),
        started.elapsed().as_secs_f64()
    );

    let profits = assign_profits(data.n_items(), &ProfitConfig::default())?;
    let setup = EvalSetup::new(
        &model,
        &profits,
        &split,
        10,
        PurchaseModel::relevance_decay(1.0),
        DEFAULT_RELEVANCE_CUTOFF,
    )?;
    let sweep = sweep_thresholds(&setup, &threshold_grid(5.0, 2.0, 0.1))?;

    println!("{:>9} {:>10} {:>10} {:>9} {:>8} {:>8}", "T_R", "profit", "relevance", "prec@10", "loss%", "gain%");
    for p in std::iter::once(&sweep.baseline).chain(&sweep.points) {
        println!(
            "{:>9.2} {:>10.4} {:>10.4} {:>9.4} {:>8.2} {:>8.2}",
            p.threshold,
            p.avg_profit_guaranteed,
            p.avg_profit_relevance,
            p.precision_at_n,
            p.accuracy_loss_pct,
            p.profit_gain_pct
        );
    }
    for (label, objective) in [("guaranteed", ProfitObjective::Guaranteed), ("relevance", ProfitObjective::Relevance)] {
        if let Some((t, v)) = find_optimal_threshold(&sweep, objective) {
            println!("best threshold ({label}): {t:.1} -> {v:.4}");
        }
    }
    println!("done in {:.1}s", started.elapsed().as_secs_f64());
    Ok(())
}
