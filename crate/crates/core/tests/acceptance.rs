//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.
//!
//! The ML-1M criteria read `data/ml-1m/ratings.dat` at the workspace root, or
//! the path in `MARGIN_BENCH_ML1M`.

mod common;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use common::{argsort_expected_margin, brute_force_rerank, ranked_list};
use margin_bench::dataio::{load_ratings, split_holdout, RatingFormat, Split};
use margin_bench::evaluate::{
    find_optimal_threshold, sweep_thresholds, threshold_grid, EvalSetup, ProfitObjective, SweepResult,
};
use margin_bench::factor::{gradient_check, train, FactorModel, Hyperparams, Objective};
use margin_bench::harness::{self, ExperimentConfig};
use margin_bench::profitgen::{assign_profits, ProfitConfig, ProfitTable};
use margin_bench::purchase::PurchaseModel;
use margin_bench::rerank::{rank_by_expected_margin, rerank_by_profit, RerankConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Report {
    failed: usize,
}

impl Report {
    fn check(&mut self, id: &str, pass: bool, detail: String) {
        if !pass {
            self.failed += 1;
        }
        println!("[{}] criterion {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn dataset_path() -> PathBuf {
    std::env::var_os("MARGIN_BENCH_ML1M")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/ml-1m/ratings.dat"))
}

/// Random distinct values in `[lo, hi)`.
fn distinct(rng: &mut ChaCha8Rng, m: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(m);
    while out.len() < m {
        let x = rng.random_range(lo..hi);
        if out.iter().all(|&y| y != x) {
            out.push(x);
        }
    }
    out
}

fn greedy_oracle(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let m = rng.random_range(1..=12);
        let n = rng.random_range(1..=4);
        let preds = distinct(&mut rng, m, 1.0, 5.0);
        let profits = distinct(&mut rng, m, 0.0, 4.0);
        let t = rng.random_range(1.0..5.2);
        let out = rerank_by_profit(&ranked_list(&preds), &ProfitTable { profit: profits.clone() }, &RerankConfig::new(t, n))
            .expect("valid instance");
        let mut got: Vec<usize> = out.items().collect();
        got.sort_unstable();
        if got != brute_force_rerank(&preds, &profits, t, n) {
            mismatches += 1;
        }
    }
    r.check("5", mismatches == 0, format!("greedy re-ranking vs exhaustive enumeration: {mismatches}/1000 mismatches"));
}

fn expected_margin_oracle(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut mismatches = 0;
    for _ in 0..500 {
        let m = rng.random_range(1..=15);
        let n = rng.random_range(1..=6);
        let lambda = rng.random_range(0.0..3.0);
        let preds = distinct(&mut rng, m, 1.0, 5.0);
        let profits = distinct(&mut rng, m, 0.0, 4.0);
        let out = rank_by_expected_margin(
            &ranked_list(&preds),
            &ProfitTable { profit: profits.clone() },
            &PurchaseModel::relevance_decay(lambda),
            n,
        )
        .expect("valid instance");
        if out.items().collect::<Vec<_>>() != argsort_expected_margin(&preds, &profits, lambda, 5.0, n) {
            mismatches += 1;
        }
    }
    r.check("6", mismatches == 0, format!("expected-margin order vs independent argsort: {mismatches}/500 mismatches"));
}

fn gradient_oracle() -> (f64, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut failing = 0;
    for _ in 0..100 {
        let (users, items, k) = (rng.random_range(1..5), rng.random_range(1..6), rng.random_range(1..9));
        let mut model = FactorModel::zeros(users, items, k, rng.random_range(1.0..5.0));
        for x in model
            .user_bias
            .iter_mut()
            .chain(model.item_bias.iter_mut())
            .chain(model.user_factors.iter_mut())
            .chain(model.item_factors.iter_mut())
        {
            *x = rng.random_range(-1.0..1.0);
        }
        let objective = Objective {
            regularization: rng.random_range(0.0..0.2),
            include_residual: true,
        };
        let (u, i) = (rng.random_range(0..users), rng.random_range(0..items));
        let rating = rng.random_range(1..=5) as f64;
        let dev = gradient_check(&model, &objective, u, i, rating, 1e-5).max_relative_deviation;
        if dev >= 1e-4 {
            failing += 1;
        }
        worst = worst.max(dev);
    }
    (worst, failing)
}

struct Ml1m {
    split: Split,
    model: FactorModel,
    profits: ProfitTable,
    n: usize,
}

fn ml1m_pipeline(cfg: &ExperimentConfig) -> Result<Ml1m, String> {
    let data = load_ratings(&cfg.data_path, cfg.data_format).map_err(|e| e.to_string())?;
    let split = split_holdout(&data, cfg.test_fraction, cfg.split_seed).map_err(|e| e.to_string())?;
    let model = train(&split.train, &cfg.mf).map_err(|e| e.to_string())?;
    let profits = assign_profits(data.n_items(), &cfg.profit).map_err(|e| e.to_string())?;
    Ok(Ml1m {
        split,
        model,
        profits,
        n: cfg.n,
    })
}

fn point_at(sweep: &SweepResult, t: f64) -> Option<&margin_bench::evaluate::EvalPoint> {
    sweep.points.iter().find(|p| (p.threshold - t).abs() < 1e-9)
}

fn ml1m_criteria(r: &mut Report, cfg: &ExperimentConfig) {
    let started = Instant::now();
    let run = match ml1m_pipeline(cfg) {
        Ok(run) => run,
        Err(e) => {
            for id in ["1", "2", "3", "4", "7b", "8", "9b"] {
                r.check(id, false, format!("ML-1M unavailable: {e}"));
            }
            return;
        }
    };
    let relevance = PurchaseModel::relevance_decay(cfg.lambda);
    let setup = EvalSetup::new(&run.model, &run.profits, &run.split, run.n, relevance, cfg.relevance_cutoff)
        .expect("consistent setup");
    let grid = threshold_grid(5.0, 2.0, 0.1);
    let sweep = sweep_thresholds(&setup, &grid).expect("sweep");
    let elapsed = started.elapsed().as_secs_f64();
    let b = sweep.baseline;

    r.check(
        "1",
        (b.avg_profit_guaranteed - 2.0).abs() <= 0.05,
        format!(
            "baseline top-{} avg profit (guaranteed) = {:.4}, want 2.00 +- 0.05 [{elapsed:.1}s train+sweep]",
            run.n, b.avg_profit_guaranteed
        ),
    );

    let (p45, p40) = (point_at(&sweep, 4.5).unwrap(), point_at(&sweep, 4.0).unwrap());
    let ok45 = p45.profit_gain_pct >= 30.0 && p45.accuracy_loss_pct <= 5.0;
    let ok40 = p40.profit_gain_pct >= 55.0 && p40.accuracy_loss_pct <= 15.0;
    r.check(
        "2",
        ok45 && ok40,
        format!(
            "T_R=4.5 gain {:.2}% (>= 30) loss {:.2}% (<= 5); T_R=4.0 gain {:.2}% (>= 55) loss {:.2}% (<= 15)",
            p45.profit_gain_pct, p45.accuracy_loss_pct, p40.profit_gain_pct, p40.accuracy_loss_pct
        ),
    );

    // Feasibility is checked per user from the raw rankings, independently of
    // the sweep code.
    let min_feasible = |t: f64| {
        setup
            .test_users()
            .iter()
            .map(|&u| setup.rank(u).unwrap().entries.iter().filter(|c| c.predicted >= t).count())
            .min()
            .unwrap_or(0)
    };
    let sub: Vec<_> = sweep.points.iter().filter(|p| min_feasible(p.threshold) >= run.n).collect();
    let monotone = sub
        .windows(2)
        .all(|w| w[1].avg_profit_guaranteed >= w[0].avg_profit_guaranteed);
    let full = sweep
        .points
        .windows(2)
        .all(|w| w[1].avg_profit_guaranteed >= w[0].avg_profit_guaranteed);
    let span = match (sub.first(), sub.last()) {
        (Some(a), Some(z)) => format!("T_R {:.1} down to {:.1}", a.threshold, z.threshold),
        _ => "empty".into(),
    };
    r.check(
        "3",
        monotone && sub.len() >= 2,
        format!(
            "guaranteed profit non-decreasing over the {}-point feasible sub-grid ({span}); whole grid, informational: {full}",
            sub.len()
        ),
    );

    let opt = find_optimal_threshold(&sweep, ProfitObjective::Relevance);
    let ok4 = matches!(opt, Some((t, v)) if t < 5.0 - 1e-9 && t > 2.0 + 1e-9 && v > b.avg_profit_relevance);
    r.check(
        "4",
        ok4,
        match opt {
            Some((t, v)) => format!(
                "relevance-decay optimum at T_R={t:.1} with {v:.4} vs baseline {:.4} (lambda {})",
                b.avg_profit_relevance, cfg.lambda
            ),
            None => "no optimum".into(),
        },
    );

    let rmse = run.model.rmse(&run.split.test);
    let mu = run.model.global_mean;
    let mean_rmse = (run.split.test.ratings().iter().map(|x| (x.value - mu).powi(2)).sum::<f64>()
        / run.split.test.len() as f64)
        .sqrt();
    let improvement = 1.0 - rmse / mean_rmse;
    r.check(
        "7b",
        improvement >= 0.15,
        format!(
            "held-out RMSE {rmse:.4} vs global mean {mean_rmse:.4}: {:.1}% better (>= 15%)",
            improvement * 100.0
        ),
    );

    let below = sweep
        .points
        .iter()
        .chain(std::iter::once(&b))
        .all(|p| p.avg_profit_relevance <= p.avg_profit_guaranteed + 1e-12);
    let flat = EvalSetup::new(
        &run.model,
        &run.profits,
        &run.split,
        run.n,
        PurchaseModel::relevance_decay(1e-9),
        cfg.relevance_cutoff,
    )
    .expect("consistent setup");
    let flat_sweep = sweep_thresholds(&flat, &grid).expect("sweep");
    let collapse = flat_sweep
        .points
        .iter()
        .chain(std::iter::once(&flat_sweep.baseline))
        .map(|p| (p.avg_profit_relevance - p.avg_profit_guaranteed).abs())
        .fold(0.0, f64::max);
    r.check(
        "9b",
        below && collapse <= 1e-6,
        format!(
            "ML-1M sweep: relevance <= guaranteed at all {} points: {below}; lambda=1e-9 max gap {collapse:.2e} (<= 1e-6)",
            sweep.points.len() + 1
        ),
    );

    // Two full harness runs, compared byte for byte, and against the sweep above.
    let dir = tempfile::tempdir().expect("tempdir");
    let mut outs = Vec::new();
    for name in ["a", "b"] {
        let mut c = cfg.clone();
        c.out_dir = dir.path().join(name);
        match harness::run(&c) {
            Ok(s) => outs.push(s),
            Err(e) => {
                r.check("8", false, format!("harness run failed: {e}"));
                return;
            }
        }
    }
    let mut identical = 0;
    let mut total = 0;
    for (x, y) in outs[0].outcomes.iter().zip(&outs[1].outcomes) {
        total += 1;
        if std::fs::read(&x.csv_path).ok() == std::fs::read(&y.csv_path).ok() {
            identical += 1;
        }
    }
    let harness_sweep = outs[0]
        .outcomes
        .iter()
        .find(|o| o.csv_path.ends_with("sweep_profit-rerank.csv"))
        .map(|o| std::fs::read_to_string(&o.csv_path).unwrap_or_default());
    let agrees = harness_sweep.as_deref() == Some(sweep.to_csv().as_str());
    r.check(
        "8",
        identical == total && total > 0 && agrees,
        format!(
            "{identical}/{total} sweep CSVs byte-identical across two runs ({:.1}s, {:.1}s); matches in-process sweep: {agrees}",
            outs[0].wall_clock_secs, outs[1].wall_clock_secs
        ),
    );
}

fn main() -> ExitCode {
    let mut r = Report { failed: 0 };

    greedy_oracle(&mut r);
    expected_margin_oracle(&mut r);

    let (worst, failing) = gradient_oracle();
    r.check(
        "7a",
        failing == 0,
        format!("gradient vs central differences (eps 1e-5) on 100 toy models: max relative deviation {worst:.2e} (< 1e-4)"),
    );

    let mut collapse: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let m = rng.random_range(1..=10);
        let preds = distinct(&mut rng, m, 1.0, 5.0);
        let profits = ProfitTable {
            profit: distinct(&mut rng, m, 0.0, 4.0),
        };
        let list = ranked_list(&preds);
        let g = margin_bench::purchase::expected_profit(&list, &profits, &PurchaseModel::guaranteed()).unwrap();
        let d = margin_bench::purchase::expected_profit(&list, &profits, &PurchaseModel::relevance_decay(1e-9)).unwrap();
        collapse = collapse.max((g - d).abs());
    }
    r.check(
        "9a",
        collapse <= 1e-6,
        format!("relevance-decay at lambda=1e-9 vs guaranteed on 200 random lists: max gap {collapse:.2e} (<= 1e-6)"),
    );

    let path = dataset_path();
    let cfg = ExperimentConfig {
        data_path: path,
        data_format: RatingFormat::MovieLens1M,
        mf: Hyperparams::default(),
        profit: ProfitConfig::default(),
        ..ExperimentConfig::default()
    };
    ml1m_criteria(&mut r, &cfg);

    println!("acceptance: {} criteria failed", r.failed);
    if r.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
