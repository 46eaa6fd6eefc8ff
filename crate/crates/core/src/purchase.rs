//! Consumer purchase models over a recommendation list.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::factor::RankedList;
use crate::profitgen::ProfitTable;

#[derive(Debug, Error, PartialEq)]
pub enum PurchaseError {
    #[error("predicted rating {rating} exceeds r_max {r_max}")]
    AboveScale { rating: f64, r_max: f64 },
    #[error("item index {0} has no profit entry")]
    MissingProfit(usize),
    #[error("guaranteed purchase needs a non-empty list")]
    EmptyList,
    #[error("invalid purchase model: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PurchaseKind {
    /// The user buys exactly one list item, chosen uniformly.
    Guaranteed,
    /// The user looks at one uniformly chosen item and buys it with
    /// probability `exp(-lambda * (r_max - r_hat))`.
    RelevanceDecay,
}

impl FromStr for PurchaseKind {
    type Err = PurchaseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "guaranteed" => Ok(PurchaseKind::Guaranteed),
            "relevance-decay" | "relevance" => Ok(PurchaseKind::RelevanceDecay),
            other => Err(PurchaseError::Invalid(format!("unknown purchase kind `{other}`"))),
        }
    }
}

impl fmt::Display for PurchaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PurchaseKind::Guaranteed => "guaranteed",
            PurchaseKind::RelevanceDecay => "relevance-decay",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurchaseModel {
    pub kind: PurchaseKind,
    pub lambda: f64,
    pub r_max: f64,
}

impl PurchaseModel {
    pub fn guaranteed() -> Self {
        PurchaseModel {
            kind: PurchaseKind::Guaranteed,
            lambda: 0.0,
            r_max: 5.0,
        }
    }

    pub fn relevance_decay(lambda: f64) -> Self {
        PurchaseModel {
            kind: PurchaseKind::RelevanceDecay,
            lambda,
            r_max: 5.0,
        }
    }

    pub fn validate(&self) -> Result<(), PurchaseError> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(PurchaseError::Invalid(format!("lambda must be non-negative, got {}", self.lambda)));
        }
        if !self.r_max.is_finite() {
            return Err(PurchaseError::Invalid("r_max must be finite".into()));
        }
        Ok(())
    }
}

/// Probability that a user buys an item with the given predicted rating.
/// Always 1 under the guaranteed model.
pub fn purchase_probability(pred_rating: f64, pm: &PurchaseModel) -> Result<f64, PurchaseError> {
    if pred_rating > pm.r_max {
        return Err(PurchaseError::AboveScale {
            rating: pred_rating,
            r_max: pm.r_max,
        });
    }
    Ok(match pm.kind {
        PurchaseKind::Guaranteed => 1.0,
        PurchaseKind::RelevanceDecay => (-pm.lambda * (pm.r_max - pred_rating)).exp(),
    })
}

/// Expected profit from one user shown `list`.
pub fn expected_profit(list: &RankedList, profits: &ProfitTable, pm: &PurchaseModel) -> Result<f64, PurchaseError> {
    if list.is_empty() {
        return match pm.kind {
            PurchaseKind::Guaranteed => Err(PurchaseError::EmptyList),
            PurchaseKind::RelevanceDecay => Ok(0.0),
        };
    }
    let mut total = 0.0;
    for c in &list.entries {
        let profit = profits.get(c.item).ok_or(PurchaseError::MissingProfit(c.item))?;
        total += purchase_probability(c.predicted, pm)? * profit;
    }
    Ok(total / list.len() as f64)
}
