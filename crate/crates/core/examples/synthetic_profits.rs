//! Draw per-item profits from a truncated Gaussian and export them.
//!
//! ```bash
//! cargo run -p margin-bench --example synthetic_profits
//! ```

use margin_bench::dataio::IndexMap;
use margin_bench::{assign_profits, ProfitConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ProfitConfig::default();
    let table = assign_profits(3706, &cfg)?;

    let mean = table.mean();
    let sd = (table.profit.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (table.len() - 1) as f64).sqrt();
    let (lo, hi) = table
        .profit
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| (lo.min(p), hi.max(p)));
    println!("{cfg:?}");
    println!("{} items: mean {mean:.4}, sd {sd:.4}, range [{lo:.4}, {hi:.4}]", table.len());

    let mut histogram = [0usize; 8];
    for p in &table.profit {
        histogram[((p - cfg.min) / (cfg.max - cfg.min) * 8.0).min(7.0) as usize] += 1;
    }
    for (bucket, count) in histogram.iter().enumerate() {
        let from = cfg.min + bucket as f64 * 0.5;
        println!("  ${from:.1}-{:.1} {}", from + 0.5, "#".repeat(count / 20));
    }

    let items = IndexMap::from_ids(1..=3706);
    let path = std::env::temp_dir().join("margin-bench-profits.csv");
    table.save_csv(&path, &items)?;
    println!("wrote {}", path.display());
    Ok(())
}
