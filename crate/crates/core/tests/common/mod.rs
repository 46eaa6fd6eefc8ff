//! Independent reference implementations shared by the integration tests and
//! the acceptance target. Kept deliberately naive.
#![allow(dead_code)]

use margin_bench::factor::{Candidate, RankedList};

/// Candidates sorted by prediction desc, item asc.
pub fn ranked_list(preds: &[f64]) -> RankedList {
    let mut entries: Vec<Candidate> = preds
        .iter()
        .enumerate()
        .map(|(item, &predicted)| Candidate { item, predicted })
        .collect();
    entries.sort_by(|a, b| b.predicted.total_cmp(&a.predicted).then(a.item.cmp(&b.item)));
    RankedList { user: 0, entries }
}

/// Exhaustive search for the threshold re-ranking result, as a set of items.
///
/// Among all subsets of size `min(n, m)` it keeps those that use as many
/// feasible items as possible, then maximizes the feasible items' total
/// profit, then the total prediction of the remaining items. Assumes
/// distinct profits and predictions (no ties to break).
pub fn brute_force_rerank(preds: &[f64], profits: &[f64], threshold: f64, n: usize) -> Vec<usize> {
    let m = preds.len();
    let size = n.min(m);
    let n_feasible = preds.iter().filter(|&&p| p >= threshold).count();
    let want_feasible = n.min(n_feasible);
    let mut best: Option<(f64, f64, u32)> = None;
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize != size {
            continue;
        }
        let mut feasible = 0;
        let mut profit = 0.0;
        let mut fill_pred = 0.0;
        for i in 0..m {
            if mask & (1 << i) == 0 {
                continue;
            }
            if preds[i] >= threshold {
                feasible += 1;
                profit += profits[i];
            } else {
                fill_pred += preds[i];
            }
        }
        if feasible != want_feasible {
            continue;
        }
        let better = match best {
            None => true,
            Some((bp, bf, _)) => profit > bp || (profit == bp && fill_pred > bf),
        };
        if better {
            best = Some((profit, fill_pred, mask));
        }
    }
    let mask = best.map(|b| b.2).unwrap_or(0);
    (0..m).filter(|i| mask & (1 << i) != 0).collect()
}

/// Argsort of `exp(-lambda (r_max - pred)) * profit`, descending, with ties
/// broken by prediction desc then item asc; first `n`.
pub fn argsort_expected_margin(preds: &[f64], profits: &[f64], lambda: f64, r_max: f64, n: usize) -> Vec<usize> {
    let score: Vec<f64> = preds
        .iter()
        .zip(profits)
        .map(|(&r, &p)| (-lambda * (r_max - r)).exp() * p)
        .collect();
    let mut idx: Vec<usize> = (0..preds.len()).collect();
    idx.sort_by(|&a, &b| {
        score[b]
            .partial_cmp(&score[a])
            .unwrap()
            .then(preds[b].partial_cmp(&preds[a]).unwrap())
            .then(a.cmp(&b))
    });
    idx.truncate(n);
    idx
}

/// Simpson's rule on `[a, b]` with `steps` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, steps: usize) -> f64 {
    let h = (b - a) / steps as f64;
    let mut s = f(a) + f(b);
    for k in 1..steps {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}

/// Standard deviation of N(mean, sigma^2) truncated to [lo, hi].
pub fn truncated_normal_sd(mean: f64, sigma: f64, lo: f64, hi: f64) -> f64 {
    let pdf = |x: f64| (-(x - mean).powi(2) / (2.0 * sigma * sigma)).exp();
    let z = simpson(pdf, lo, hi, 20_000);
    let m = simpson(|x| x * pdf(x), lo, hi, 20_000) / z;
    let v = simpson(|x| (x - m).powi(2) * pdf(x), lo, hi, 20_000) / z;
    v.sqrt()
}
