//! Profit-oriented list construction on top of a prediction ranking.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::factor::{by_prediction, Candidate, RankedList};
use crate::profitgen::ProfitTable;
use crate::purchase::{purchase_probability, PurchaseError, PurchaseModel};

#[derive(Debug, Error, PartialEq)]
pub enum RerankError {
    #[error("item index {0} has no profit entry")]
    MissingProfit(usize),
    #[error("list length must be at least 1")]
    ZeroLength,
    #[error(transparent)]
    Purchase(#[from] PurchaseError),
    #[error("unknown strategy `{0}` (expected baseline, profit-rerank or expected-margin)")]
    UnknownStrategy(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RerankConfig {
    /// Minimum predicted rating for profit-based selection. `-inf` disables
    /// the constraint.
    pub threshold: f64,
    pub n: usize,
}

impl RerankConfig {
    pub fn new(threshold: f64, n: usize) -> Self {
        RerankConfig { threshold, n }
    }
}

/// Ranking strategies, selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    Baseline,
    ProfitRerank,
    ExpectedMargin,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 3] = [StrategyKind::Baseline, StrategyKind::ProfitRerank, StrategyKind::ExpectedMargin];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Baseline => "baseline",
            StrategyKind::ProfitRerank => "profit-rerank",
            StrategyKind::ExpectedMargin => "expected-margin",
        }
    }
}

impl FromStr for StrategyKind {
    type Err = RerankError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| RerankError::UnknownStrategy(s.to_string()))
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A fully parameterized strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strategy {
    Baseline,
    ProfitRerank { threshold: f64 },
    ExpectedMargin { purchase: PurchaseModel },
}

impl Strategy {
    pub fn kind(&self) -> StrategyKind {
        match self {
            Strategy::Baseline => StrategyKind::Baseline,
            Strategy::ProfitRerank { .. } => StrategyKind::ProfitRerank,
            Strategy::ExpectedMargin { .. } => StrategyKind::ExpectedMargin,
        }
    }

    pub fn apply(&self, ranked: &RankedList, profits: &ProfitTable, n: usize) -> Result<RankedList, RerankError> {
        match *self {
            Strategy::Baseline => Ok(topn_baseline(ranked, n)),
            Strategy::ProfitRerank { threshold } => rerank_by_profit(ranked, profits, &RerankConfig { threshold, n }),
            Strategy::ExpectedMargin { purchase } => rank_by_expected_margin(ranked, profits, &purchase, n),
        }
    }
}

pub fn topn_baseline(ranked: &RankedList, n: usize) -> RankedList {
    RankedList {
        user: ranked.user,
        entries: ranked.entries.iter().take(n).copied().collect(),
    }
}

fn profit_of(profits: &ProfitTable, item: usize) -> Result<f64, RerankError> {
    profits.get(item).ok_or(RerankError::MissingProfit(item))
}

/// Threshold-constrained greedy profit re-ranking.
///
/// Candidates with prediction `>= threshold` form the feasible set; the `n`
/// most profitable of them are taken (ties: higher prediction, then lower
/// item index). Any slots left over are filled with the best-predicted
/// remaining candidates. Output lists the profit picks by profit desc,
/// followed by the fill in prediction order.
pub fn rerank_by_profit(ranked: &RankedList, profits: &ProfitTable, cfg: &RerankConfig) -> Result<RankedList, RerankError> {
    if cfg.n == 0 {
        return Err(RerankError::ZeroLength);
    }
    let n = cfg.n;
    // `ranked` is sorted by prediction, so the feasible set is a prefix.
    let feasible = ranked.entries.partition_point(|c| c.predicted >= cfg.threshold);

    let mut picks: Vec<(f64, Candidate)> = Vec::with_capacity(n + 1);
    for c in &ranked.entries[..feasible] {
        let profit = profit_of(profits, c.item)?;
        if picks.len() == n && by_profit(&(profit, *c), &picks[n - 1]) != Ordering::Less {
            continue;
        }
        let at = picks.partition_point(|p| by_profit(p, &(profit, *c)) == Ordering::Less);
        picks.insert(at, (profit, *c));
        picks.truncate(n);
    }
    for c in &ranked.entries[feasible..] {
        profit_of(profits, c.item)?;
    }

    let mut entries: Vec<Candidate> = picks.into_iter().map(|(_, c)| c).collect();
    if entries.len() < n {
        // Every feasible candidate was picked, so the fill is the next
        // candidates in prediction order.
        let fill = n - entries.len();
        entries.extend(ranked.entries[feasible..].iter().take(fill).copied());
    }
    Ok(RankedList {
        user: ranked.user,
        entries,
    })
}

/// Profit desc, then prediction desc, then item asc.
fn by_profit(a: &(f64, Candidate), b: &(f64, Candidate)) -> Ordering {
    b.0.total_cmp(&a.0).then_with(|| by_prediction(&a.1, &b.1))
}

/// Top `n` by `purchase_probability * profit`.
pub fn rank_by_expected_margin(
    ranked: &RankedList,
    profits: &ProfitTable,
    pm: &PurchaseModel,
    n: usize,
) -> Result<RankedList, RerankError> {
    if n == 0 {
        return Err(RerankError::ZeroLength);
    }
    pm.validate()?;
    let mut scored = ranked
        .entries
        .iter()
        .map(|c| Ok((purchase_probability(c.predicted, pm)? * profit_of(profits, c.item)?, *c)))
        .collect::<Result<Vec<_>, RerankError>>()?;
    if scored.len() > n {
        scored.select_nth_unstable_by(n - 1, by_profit);
        scored.truncate(n);
    }
    scored.sort_by(by_profit);
    Ok(RankedList {
        user: ranked.user,
        entries: scored.into_iter().map(|(_, c)| c).collect(),
    })
}
