//! Purchase probability under relevance decay, and how the two purchase
//! models value the same list.
//!
//! ```bash
//! cargo run -p margin-bench --example purchase_models
//! ```

use margin_bench::factor::Candidate;
use margin_bench::{expected_profit, purchase_probability, ProfitTable, PurchaseModel, RankedList};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>6} {:>8} {:>8} {:>8}", "r_hat", "l=0.5", "l=1", "l=2");
    for tenths in (20..=50).rev().step_by(5) {
        let r = f64::from(tenths) / 10.0;
        let p = |lambda| purchase_probability(r, &PurchaseModel::relevance_decay(lambda));
        println!("{r:>6.1} {:>8.4} {:>8.4} {:>8.4}", p(0.5)?, p(1.0)?, p(2.0)?);
    }

    let profits = ProfitTable {
        profit: vec![1.0, 3.0, 2.5, 3.8],
    };
    let list = RankedList {
        user: 0,
        entries: [(0, 4.9), (1, 4.6), (2, 4.2), (3, 3.7)]
            .into_iter()
            .map(|(item, predicted)| Candidate { item, predicted })
            .collect(),
    };
    println!();
    println!("guaranteed purchase: ${:.4}", expected_profit(&list, &profits, &PurchaseModel::guaranteed())?);
    for lambda in [1e-9, 0.5, 1.0, 2.0] {
        let v = expected_profit(&list, &profits, &PurchaseModel::relevance_decay(lambda))?;
        println!("relevance decay, lambda {lambda:<5}: ${v:.4}");
    }
    Ok(())
}
