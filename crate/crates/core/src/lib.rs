//! Profit-aware top-N recommendation experiments.
//!
//! A biased matrix factorization model ranks unseen items per user; the
//! [`rerank`] strategies then trade predicted relevance for item profit, and
//! [`evaluate`] measures precision and expected profit under the purchase
//! models in [`purchase`] across a sweep of rating thresholds.
//!
//! Pipeline, bottom-up:
//!
//! - [`dataio`]: MovieLens / CSV ingestion and per-user holdout splits
//! - [`factor`]: SGD-trained biased MF, gradient checking, candidate ranking
//! - [`profitgen`]: truncated-Gaussian synthetic profits
//! - [`rerank`]: threshold-constrained profit re-ranking, expected margin
//! - [`purchase`]: guaranteed and relevance-decay purchase models
//! - [`evaluate`]: precision@n, expected profit, threshold sweeps
//! - [`harness`]: config files, end-to-end runs, CSV reports
//!
//! See the crate's `examples/` directory for one runnable program per stage.

pub mod dataio;
pub mod evaluate;
pub mod factor;
pub mod harness;
pub mod profitgen;
pub mod purchase;
pub mod rerank;

pub use dataio::{load_ratings, split_holdout, Interaction, InteractionSet, RatingFormat, Split};
pub use evaluate::{evaluate_config, find_optimal_threshold, sweep_thresholds, EvalPoint, EvalSetup, ProfitObjective, SweepResult};
pub use factor::{rank_candidates, train, FactorModel, Hyperparams, RankedList};
pub use harness::{run, ExperimentConfig};
pub use profitgen::{assign_profits, ProfitConfig, ProfitTable};
pub use purchase::{expected_profit, purchase_probability, PurchaseKind, PurchaseModel};
pub use rerank::{rank_by_expected_margin, rerank_by_profit, topn_baseline, RerankConfig, Strategy, StrategyKind};
