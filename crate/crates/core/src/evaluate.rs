//! Accuracy and profit measurement, threshold sweeps and optimum search.
//!
//! Per-user work runs in parallel, but sums are always accumulated in user
//! index order so results do not depend on the thread count.

use std::fmt::Write as _;

use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dataio::{Split, UserRatings};
use crate::factor::{rank_candidates, FactorError, FactorModel, RankedList};
use crate::profitgen::ProfitTable;
use crate::purchase::{expected_profit, PurchaseError, PurchaseKind, PurchaseModel};
use crate::rerank::{rerank_by_profit, topn_baseline, RerankConfig, RerankError, Strategy};

/// Held-out ratings at or above this count as relevant for precision.
pub const DEFAULT_RELEVANCE_CUTOFF: f64 = 4.0;

pub const CSV_HEADER: &str = "threshold,avg_profit_guaranteed,avg_profit_relevance,precision_at_n,accuracy_loss_pct,profit_gain_pct";

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),
    #[error("threshold grid is empty")]
    EmptyGrid,
    #[error("list length must be at least 1")]
    ZeroLength,
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error(transparent)]
    Rerank(#[from] RerankError),
    #[error(transparent)]
    Purchase(#[from] PurchaseError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPoint {
    pub threshold: f64,
    pub avg_profit_guaranteed: f64,
    pub avg_profit_relevance: f64,
    pub precision_at_n: f64,
    pub accuracy_loss_pct: f64,
    pub profit_gain_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Plain top-n lists; `threshold` is `+inf`.
    pub baseline: EvalPoint,
    /// One point per grid value, thresholds strictly decreasing.
    pub points: Vec<EvalPoint>,
    /// SHA-256 over every input that influenced the numbers.
    pub fingerprint: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfitObjective {
    Guaranteed,
    Relevance,
}

/// Fraction of `n` slots in `list` that hold a relevant item. `None` when
/// the user has nothing relevant, meaning the user is left out of averages.
pub fn precision_at_n(list: &RankedList, relevant: &[usize], n: usize) -> Option<f64> {
    if relevant.is_empty() || n == 0 {
        return None;
    }
    let hits = list.items().filter(|item| relevant.contains(item)).count();
    Some(hits as f64 / n as f64)
}

/// Everything a configuration is evaluated against.
pub struct EvalSetup<'a> {
    model: &'a FactorModel,
    profits: &'a ProfitTable,
    seen: UserRatings,
    /// Per user, sorted item indices of held-out ratings `>= cutoff`.
    relevant: Vec<Vec<usize>>,
    test_users: Vec<usize>,
    n: usize,
    relevance: PurchaseModel,
    relevance_cutoff: f64,
    test_digest: [u8; 32],
}

impl<'a> EvalSetup<'a> {
    /// `relevance` is the relevance-decay purchase model used for the
    /// relevance profit column and by expected-margin ranking.
    pub fn new(
        model: &'a FactorModel,
        profits: &'a ProfitTable,
        split: &Split,
        n: usize,
        relevance: PurchaseModel,
        relevance_cutoff: f64,
    ) -> Result<Self, EvalError> {
        if n == 0 {
            return Err(EvalError::ZeroLength);
        }
        if !split.train.shares_maps_with(&split.test) {
            return Err(EvalError::Inconsistent("train and test use different index maps".into()));
        }
        if model.n_users() != split.train.n_users() || model.n_items() != split.train.n_items() {
            return Err(EvalError::Inconsistent(format!(
                "model is {}x{} but data has {} users and {} items",
                model.n_users(),
                model.n_items(),
                split.train.n_users(),
                split.train.n_items()
            )));
        }
        if profits.len() != split.train.n_items() {
            return Err(EvalError::Inconsistent(format!(
                "profit table has {} entries for {} items",
                profits.len(),
                split.train.n_items()
            )));
        }
        relevance.validate()?;
        if relevance.kind != PurchaseKind::RelevanceDecay {
            return Err(EvalError::Inconsistent("relevance column needs a relevance-decay model".into()));
        }

        let test = split.test.by_user();
        let mut relevant = vec![Vec::new(); test.n_users()];
        let mut test_users = Vec::new();
        for (u, rel) in relevant.iter_mut().enumerate() {
            let items = test.items(u);
            if !items.is_empty() {
                test_users.push(u);
            }
            *rel = items
                .iter()
                .zip(test.values(u))
                .filter(|(_, &v)| v >= relevance_cutoff)
                .map(|(&i, _)| i)
                .collect();
        }

        let mut hasher = Sha256::new();
        for r in split.test.ratings() {
            hasher.update((r.user as u64).to_le_bytes());
            hasher.update((r.item as u64).to_le_bytes());
            hasher.update(r.value.to_le_bytes());
        }
        for r in split.train.ratings() {
            hasher.update((r.user as u64).to_le_bytes());
            hasher.update((r.item as u64).to_le_bytes());
        }

        Ok(EvalSetup {
            model,
            profits,
            seen: split.train.by_user(),
            relevant,
            test_users,
            n,
            relevance,
            relevance_cutoff,
            test_digest: hasher.finalize().into(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn test_users(&self) -> &[usize] {
        &self.test_users
    }

    pub fn relevant_items(&self, user: usize) -> &[usize] {
        self.relevant.get(user).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn relevance_model(&self) -> &PurchaseModel {
        &self.relevance
    }

    /// Full candidate ranking for `user` (all items unrated in train).
    pub fn rank(&self, user: usize) -> Result<RankedList, EvalError> {
        Ok(rank_candidates(self.model, user, &self.seen)?)
    }

    fn score_list(&self, list: &RankedList) -> Result<UserScore, EvalError> {
        let profit = if list.is_empty() {
            None
        } else {
            Some((
                expected_profit(list, self.profits, &PurchaseModel::guaranteed())?,
                expected_profit(list, self.profits, &self.relevance)?,
            ))
        };
        Ok(UserScore {
            profit,
            precision: precision_at_n(list, self.relevant_items(list.user), self.n),
        })
    }

    /// Applies `strategies` to every test user's ranking; returns per-user
    /// scores indexed `[strategy][test user]`.
    fn score_users(&self, strategies: &[Strategy]) -> Result<Vec<Aggregate>, EvalError> {
        let per_user: Vec<Vec<UserScore>> = self
            .test_users
            .par_iter()
            .map(|&user| {
                let ranked = self.rank(user)?;
                strategies
                    .iter()
                    .map(|s| self.score_list(&s.apply(&ranked, self.profits, self.n)?))
                    .collect::<Result<Vec<_>, EvalError>>()
            })
            .collect::<Result<_, _>>()?;

        let mut totals = vec![Aggregate::default(); strategies.len()];
        for scores in &per_user {
            for (total, score) in totals.iter_mut().zip(scores) {
                total.add(score);
            }
        }
        Ok(totals)
    }

    fn fingerprint(&self, extra: &[f64]) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.test_digest);
        hasher.update((self.n as u64).to_le_bytes());
        for x in [self.relevance.lambda, self.relevance.r_max, self.relevance_cutoff, self.model.global_mean] {
            hasher.update(x.to_le_bytes());
        }
        for v in [&self.model.user_bias, &self.model.item_bias, &self.model.user_factors, &self.model.item_factors] {
            for x in v.iter() {
                hasher.update(x.to_le_bytes());
            }
        }
        for x in &self.profits.profit {
            hasher.update(x.to_le_bytes());
        }
        for x in extra {
            hasher.update(x.to_le_bytes());
        }
        hex::encode(hasher.finalize())
    }
}

#[derive(Debug, Clone, Copy)]
struct UserScore {
    profit: Option<(f64, f64)>,
    precision: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default)]
struct Aggregate {
    guaranteed: f64,
    relevance: f64,
    profit_users: usize,
    precision: f64,
    precision_users: usize,
}

impl Aggregate {
    fn add(&mut self, s: &UserScore) {
        if let Some((g, r)) = s.profit {
            self.guaranteed += g;
            self.relevance += r;
            self.profit_users += 1;
        }
        if let Some(p) = s.precision {
            self.precision += p;
            self.precision_users += 1;
        }
    }

    fn point(&self, threshold: f64, baseline: Option<&EvalPoint>) -> EvalPoint {
        let mean = |sum: f64, count: usize| if count == 0 { 0.0 } else { sum / count as f64 };
        let mut p = EvalPoint {
            threshold,
            avg_profit_guaranteed: mean(self.guaranteed, self.profit_users),
            avg_profit_relevance: mean(self.relevance, self.profit_users),
            precision_at_n: mean(self.precision, self.precision_users),
            accuracy_loss_pct: 0.0,
            profit_gain_pct: 0.0,
        };
        let base = *baseline.unwrap_or(&p);
        p.accuracy_loss_pct = relative_pct(base.precision_at_n - p.precision_at_n, base.precision_at_n);
        p.profit_gain_pct = relative_pct(p.avg_profit_guaranteed - base.avg_profit_guaranteed, base.avg_profit_guaranteed);
        p
    }
}

fn relative_pct(delta: f64, base: f64) -> f64 {
    if base == 0.0 {
        if delta == 0.0 {
            0.0
        } else {
            f64::NAN
        }
    } else {
        delta / base * 100.0
    }
}

/// Evaluates one strategy against the top-n baseline on the same inputs.
///
/// The returned point's `threshold` is the profit-rerank threshold, `+inf`
/// for the baseline and `-inf` for expected-margin (no rating constraint).
pub fn evaluate_config(setup: &EvalSetup<'_>, strategy: &Strategy) -> Result<EvalPoint, EvalError> {
    let totals = setup.score_users(&[Strategy::Baseline, *strategy])?;
    let baseline = totals[0].point(f64::INFINITY, None);
    let threshold = match strategy {
        Strategy::Baseline => f64::INFINITY,
        Strategy::ProfitRerank { threshold } => *threshold,
        Strategy::ExpectedMargin { .. } => f64::NEG_INFINITY,
    };
    Ok(totals[1].point(threshold, Some(&baseline)))
}

/// Profit re-ranking at every grid threshold, plus the baseline.
pub fn sweep_thresholds(setup: &EvalSetup<'_>, grid: &[f64]) -> Result<SweepResult, EvalError> {
    if grid.is_empty() {
        return Err(EvalError::EmptyGrid);
    }
    let mut grid = grid.to_vec();
    grid.sort_by(|a, b| b.total_cmp(a));
    grid.dedup();

    let per_user: Vec<Vec<UserScore>> = setup
        .test_users
        .par_iter()
        .map(|&user| {
            let ranked = setup.rank(user)?;
            let mut scores = Vec::with_capacity(grid.len() + 1);
            scores.push(setup.score_list(&topn_baseline(&ranked, setup.n))?);
            for &threshold in &grid {
                let list = rerank_by_profit(&ranked, setup.profits, &RerankConfig::new(threshold, setup.n))?;
                scores.push(setup.score_list(&list)?);
            }
            Ok(scores)
        })
        .collect::<Result<_, EvalError>>()?;

    let mut totals = vec![Aggregate::default(); grid.len() + 1];
    for scores in &per_user {
        for (total, score) in totals.iter_mut().zip(scores) {
            total.add(score);
        }
    }
    let baseline = totals[0].point(f64::INFINITY, None);
    let points = grid
        .iter()
        .zip(&totals[1..])
        .map(|(&t, agg)| agg.point(t, Some(&baseline)))
        .collect();
    Ok(SweepResult {
        baseline,
        points,
        fingerprint: setup.fingerprint(&grid),
    })
}

/// Best grid point for the chosen profit column. Ties go to the higher
/// threshold; the baseline row is not a candidate.
pub fn find_optimal_threshold(sweep: &SweepResult, objective: ProfitObjective) -> Option<(f64, f64)> {
    let value = |p: &EvalPoint| match objective {
        ProfitObjective::Guaranteed => p.avg_profit_guaranteed,
        ProfitObjective::Relevance => p.avg_profit_relevance,
    };
    let mut best: Option<&EvalPoint> = None;
    for p in &sweep.points {
        match best {
            Some(b) if value(p) < value(b) || (value(p) == value(b) && p.threshold <= b.threshold) => {}
            _ => best = Some(p),
        }
    }
    best.map(|p| (p.threshold, value(p)))
}

/// The standard grid: `start` down to `stop` in steps of `step`, rounded to
/// ten decimals so values like 4.5 are exact.
pub fn threshold_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    if step <= 0.0 || start < stop {
        return vec![start];
    }
    let count = ((start - stop) / step + 1e-9).floor() as usize;
    (0..=count)
        .map(|i| ((start - i as f64 * step) * 1e10).round() / 1e10)
        .collect()
}

fn format_threshold(t: f64) -> String {
    if t == f64::INFINITY {
        "inf".to_string()
    } else if t == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{t:.6}")
    }
}

fn csv_row(out: &mut String, p: &EvalPoint) {
    let _ = writeln!(
        out,
        "{},{:.6},{:.6},{:.6},{:.6},{:.6}",
        format_threshold(p.threshold),
        p.avg_profit_guaranteed,
        p.avg_profit_relevance,
        p.precision_at_n,
        p.accuracy_loss_pct,
        p.profit_gain_pct
    );
}

impl SweepResult {
    /// CSV with the baseline row first (threshold `inf`), six decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        csv_row(&mut out, &self.baseline);
        for p in &self.points {
            csv_row(&mut out, p);
        }
        out
    }

    /// A result holding a single non-sweep evaluation, e.g. expected-margin.
    pub fn single(baseline: EvalPoint, point: Option<EvalPoint>, fingerprint: String) -> Self {
        SweepResult {
            baseline,
            points: point.into_iter().collect(),
            fingerprint,
        }
    }
}

/// Fingerprint for a single-configuration evaluation.
pub fn config_fingerprint(setup: &EvalSetup<'_>, strategy: &Strategy) -> String {
    let tag = match strategy {
        Strategy::Baseline => vec![0.0],
        Strategy::ProfitRerank { threshold } => vec![1.0, *threshold],
        Strategy::ExpectedMargin { purchase } => vec![2.0, purchase.lambda, purchase.r_max],
    };
    setup.fingerprint(&tag)
}
