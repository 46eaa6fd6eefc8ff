//! Compare the three list strategies on one hand-made user.
//!
//! ```bash
//! cargo run -p margin-bench --example rerank_strategies
//! ```

use margin_bench::factor::{by_prediction, Candidate};
use margin_bench::{
    expected_profit, rank_by_expected_margin, rerank_by_profit, topn_baseline, ProfitTable, PurchaseModel, RankedList,
    RerankConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let predicted = [4.95, 4.8, 4.7, 4.6, 4.45, 4.3, 4.1, 3.9, 3.6, 3.2];
    let profits = ProfitTable {
        profit: vec![0.4, 1.1, 3.6, 2.2, 3.9, 0.8, 3.1, 2.7, 3.8, 1.5],
    };
    let mut entries: Vec<Candidate> = predicted
        .iter()
        .enumerate()
        .map(|(item, &predicted)| Candidate { item, predicted })
        .collect();
    entries.sort_by(by_prediction);
    let ranked = RankedList { user: 0, entries };

    let decay = PurchaseModel::relevance_decay(1.0);
    let show = |label: &str, list: &RankedList| -> Result<(), Box<dyn std::error::Error>> {
        let items: Vec<usize> = list.items().collect();
        println!(
            "{label:<22} {items:?}  guaranteed ${:.3}  relevance-based ${:.3}",
            expected_profit(list, &profits, &PurchaseModel::guaranteed())?,
            expected_profit(list, &profits, &decay)?
        );
        Ok(())
    };

    let n = 3;
    show("baseline", &topn_baseline(&ranked, n))?;
    for threshold in [4.9, 4.6, 4.4, 4.0, f64::NEG_INFINITY] {
        let list = rerank_by_profit(&ranked, &profits, &RerankConfig::new(threshold, n))?;
        show(&format!("profit-rerank T={threshold}"), &list)?;
    }
    show("expected-margin", &rank_by_expected_margin(&ranked, &profits, &decay, n)?)?;
    Ok(())
}
