//! Experiment configuration, end-to-end runs and sweep reports.
//!
//! Configs are flat `key = value` files with dotted section prefixes
//! (`mf.k = 32`). Blank lines and `#` comments are ignored, as are
//! `manifest.*` keys, so a run manifest can be fed back in as a config.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dataio::{load_ratings, split_holdout, DataError, RatingFormat};
use crate::evaluate::{
    config_fingerprint, evaluate_config, find_optimal_threshold, sweep_thresholds, threshold_grid, EvalError, EvalPoint,
    EvalSetup, ProfitObjective, SweepResult, CSV_HEADER, DEFAULT_RELEVANCE_CUTOFF,
};
use crate::factor::{train, FactorError, Hyperparams};
use crate::profitgen::{assign_profits, ProfitConfig, ProfitError, ProfitTable};
use crate::purchase::PurchaseModel;
use crate::rerank::{Strategy, StrategyKind};

pub const THREADS_ENV: &str = "MARGIN_BENCH_THREADS";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("dataio: {0}")]
    Data(#[from] DataError),
    #[error("factor: {0}")]
    Factor(#[from] FactorError),
    #[error("profitgen: {0}")]
    Profit(#[from] ProfitError),
    #[error("evaluate: {0}")]
    Eval(#[from] EvalError),
    #[error("harness: cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("report: {0}")]
    Report(String),
}

impl HarnessError {
    /// 1 usage/config, 2 data, 3 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 1,
            HarnessError::Factor(FactorError::InvalidHyperparams(_)) => 1,
            HarnessError::Profit(ProfitError::InvalidConfig(_)) => 1,
            HarnessError::Factor(FactorError::Diverged { .. }) => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub data_path: PathBuf,
    pub data_format: RatingFormat,
    pub test_fraction: f64,
    pub split_seed: u64,
    pub mf: Hyperparams,
    pub profit: ProfitConfig,
    /// Replays a saved `item_id,profit` table instead of sampling.
    pub profit_table: Option<PathBuf>,
    pub n: usize,
    pub grid_start: f64,
    pub grid_stop: f64,
    pub grid_step: f64,
    /// Explicit thresholds; overrides start/stop/step when set.
    pub grid: Option<Vec<f64>>,
    pub lambda: f64,
    pub r_max: f64,
    pub relevance_cutoff: f64,
    pub strategies: Vec<StrategyKind>,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            data_path: PathBuf::from("data/ml-1m/ratings.dat"),
            data_format: RatingFormat::MovieLens1M,
            test_fraction: 0.2,
            split_seed: 42,
            mf: Hyperparams::default(),
            profit: ProfitConfig::default(),
            profit_table: None,
            n: 10,
            grid_start: 5.0,
            grid_stop: 2.0,
            grid_step: 0.1,
            grid: None,
            lambda: 1.0,
            r_max: 5.0,
            relevance_cutoff: DEFAULT_RELEVANCE_CUTOFF,
            strategies: StrategyKind::ALL.to_vec(),
            out_dir: PathBuf::from("out"),
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, HarnessError> {
    value
        .parse()
        .map_err(|_| HarnessError::Config(format!("bad value `{value}` for `{key}`")))
}

fn join_floats(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    /// Parses config text. Relative paths are resolved against `base_dir`.
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self, HarnessError> {
        let mut cfg = ExperimentConfig::default();
        let mut data_path_set = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("line {}: expected `key = value`", idx + 1)))?;
            let key = key.trim();
            if key == "data.path" {
                data_path_set = true;
            }
            cfg.set(key, value.trim())?;
        }
        if let Some(base) = base_dir {
            let resolve = |p: &mut PathBuf| {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            };
            if data_path_set {
                resolve(&mut cfg.data_path);
            }
            if let Some(p) = cfg.profit_table.as_mut() {
                resolve(p);
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, path.parent())
    }

    /// Sets one dotted key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        match key {
            "data.path" => self.data_path = PathBuf::from(value),
            "data.format" => {
                self.data_format = value.parse().map_err(|e: DataError| HarnessError::Config(e.to_string()))?
            }
            "split.test_fraction" => self.test_fraction = parse_value(key, value)?,
            "split.seed" => self.split_seed = parse_value(key, value)?,
            "mf.k" => self.mf.k = parse_value(key, value)?,
            "mf.epochs" => self.mf.epochs = parse_value(key, value)?,
            "mf.learning_rate" => self.mf.learning_rate = parse_value(key, value)?,
            "mf.regularization" => self.mf.regularization = parse_value(key, value)?,
            "mf.init_scale" => self.mf.init_scale = parse_value(key, value)?,
            "mf.seed" => self.mf.seed = parse_value(key, value)?,
            "profit.mean" => self.profit.mean = parse_value(key, value)?,
            "profit.min" => self.profit.min = parse_value(key, value)?,
            "profit.max" => self.profit.max = parse_value(key, value)?,
            "profit.sigma" => self.profit.sigma = parse_value(key, value)?,
            "profit.seed" => self.profit.seed = parse_value(key, value)?,
            "profit.table" => {
                self.profit_table = (!value.is_empty()).then(|| PathBuf::from(value));
            }
            "rerank.n" => self.n = parse_value(key, value)?,
            "rerank.grid_start" => self.grid_start = parse_value(key, value)?,
            "rerank.grid_stop" => self.grid_stop = parse_value(key, value)?,
            "rerank.grid_step" => self.grid_step = parse_value(key, value)?,
            "rerank.grid" => {
                self.grid = if value.is_empty() {
                    None
                } else {
                    Some(
                        value
                            .split(',')
                            .map(|v| parse_value(key, v.trim()))
                            .collect::<Result<_, _>>()?,
                    )
                }
            }
            "purchase.lambda" => self.lambda = parse_value(key, value)?,
            "purchase.r_max" => self.r_max = parse_value(key, value)?,
            "eval.relevance_cutoff" => self.relevance_cutoff = parse_value(key, value)?,
            "run.strategies" => {
                self.strategies = value
                    .split(',')
                    .map(|s| s.trim().parse::<StrategyKind>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| HarnessError::Config(e.to_string()))?
            }
            "run.out" => self.out_dir = PathBuf::from(value),
            k if k.starts_with("manifest.") => {}
            other => return Err(HarnessError::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Sets all three seeds at once.
    pub fn set_seed(&mut self, seed: u64) {
        self.split_seed = seed;
        self.mf.seed = seed;
        self.profit.seed = seed;
    }

    pub fn grid_values(&self) -> Vec<f64> {
        match &self.grid {
            Some(g) => g.clone(),
            None => threshold_grid(self.grid_start, self.grid_stop, self.grid_step),
        }
    }

    pub fn relevance_model(&self) -> PurchaseModel {
        PurchaseModel {
            r_max: self.r_max,
            ..PurchaseModel::relevance_decay(self.lambda)
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if !(0.0..=1.0).contains(&self.test_fraction) {
            return bad(format!("split.test_fraction {} outside [0, 1]", self.test_fraction));
        }
        if self.n == 0 {
            return bad("rerank.n must be at least 1".into());
        }
        if self.grid_values().is_empty() || self.grid_values().iter().any(|t| t.is_nan()) {
            return bad("threshold grid is empty or has NaN".into());
        }
        if self.strategies.is_empty() {
            return bad("run.strategies is empty".into());
        }
        self.mf.validate()?;
        self.profit.validate()?;
        self.relevance_model()
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(())
    }

    /// Canonical `key = value` text. `parse(to_text())` gives back `self`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (key, value) in self.entries() {
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }

    fn entries(&self) -> Vec<(&'static str, String)> {
        let mut e = vec![
            ("data.path", self.data_path.display().to_string()),
            ("data.format", self.data_format.to_string()),
            ("split.test_fraction", format!("{:?}", self.test_fraction)),
            ("split.seed", self.split_seed.to_string()),
            ("mf.k", self.mf.k.to_string()),
            ("mf.epochs", self.mf.epochs.to_string()),
            ("mf.learning_rate", format!("{:?}", self.mf.learning_rate)),
            ("mf.regularization", format!("{:?}", self.mf.regularization)),
            ("mf.init_scale", format!("{:?}", self.mf.init_scale)),
            ("mf.seed", self.mf.seed.to_string()),
            ("profit.mean", format!("{:?}", self.profit.mean)),
            ("profit.min", format!("{:?}", self.profit.min)),
            ("profit.max", format!("{:?}", self.profit.max)),
            ("profit.sigma", format!("{:?}", self.profit.sigma)),
            ("profit.seed", self.profit.seed.to_string()),
        ];
        if let Some(p) = &self.profit_table {
            e.push(("profit.table", p.display().to_string()));
        }
        e.extend([
            ("rerank.n", self.n.to_string()),
            ("rerank.grid_start", format!("{:?}", self.grid_start)),
            ("rerank.grid_stop", format!("{:?}", self.grid_stop)),
            ("rerank.grid_step", format!("{:?}", self.grid_step)),
        ]);
        if let Some(g) = &self.grid {
            e.push(("rerank.grid", join_floats(g)));
        }
        e.extend([
            ("purchase.lambda", format!("{:?}", self.lambda)),
            ("purchase.r_max", format!("{:?}", self.r_max)),
            ("eval.relevance_cutoff", format!("{:?}", self.relevance_cutoff)),
            (
                "run.strategies",
                self.strategies.iter().map(|s| s.name()).collect::<Vec<_>>().join(","),
            ),
            ("run.out", self.out_dir.display().to_string()),
        ]);
        e
    }

    /// SHA-256 of the canonical text minus the output directory.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for (key, value) in self.entries() {
            if key != "run.out" {
                hasher.update(format!("{key}={value}\n"));
            }
        }
        hex::encode(hasher.finalize())
    }
}

/// Default config text, as printed by `gen-config`.
pub fn default_config_text() -> String {
    let mut out = String::from("# margin-bench experiment config\n# Relative paths resolve against this file's directory.\n");
    out.push_str(&ExperimentConfig::default().to_text());
    out
}

#[derive(Debug, Clone)]
pub struct StrategyOutcome {
    pub strategy: StrategyKind,
    pub sweep: SweepResult,
    pub csv_path: PathBuf,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub n_users: usize,
    pub n_items: usize,
    pub n_ratings: usize,
    pub test_rmse: f64,
    pub global_mean_rmse: f64,
    pub outcomes: Vec<StrategyOutcome>,
    pub config_fingerprint: String,
    pub wall_clock_secs: f64,
}

fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    fs::write(path, contents).map_err(|source| HarnessError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

/// Load, split, train, assign profits, evaluate every strategy and write
/// `model.txt`, `profits.csv`, `sweep_<strategy>.csv` and `manifest.cfg`.
pub fn run(config: &ExperimentConfig) -> Result<RunSummary, HarnessError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    pool.install(|| run_in_pool(config))
}

fn run_in_pool(config: &ExperimentConfig) -> Result<RunSummary, HarnessError> {
    let started = Instant::now();
    let data = load_ratings(&config.data_path, config.data_format)?;
    let split = split_holdout(&data, config.test_fraction, config.split_seed)?;
    let model = train(&split.train, &config.mf)?;

    let profits = match &config.profit_table {
        Some(path) => ProfitTable::load_csv(path, data.items())?,
        None => assign_profits(data.n_items(), &config.profit)?,
    };

    let relevance = config.relevance_model();
    let setup = EvalSetup::new(&model, &profits, &split, config.n, relevance, config.relevance_cutoff)?;

    fs::create_dir_all(&config.out_dir).map_err(|source| HarnessError::Write {
        path: config.out_dir.clone(),
        source,
    })?;

    let mut outcomes = Vec::new();
    let mut baseline_point: Option<EvalPoint> = None;
    let mut baseline = || -> Result<EvalPoint, HarnessError> {
        if let Some(p) = baseline_point {
            return Ok(p);
        }
        let p = evaluate_config(&setup, &Strategy::Baseline)?;
        baseline_point = Some(p);
        Ok(p)
    };
    for &kind in &config.strategies {
        let sweep = match kind {
            StrategyKind::ProfitRerank => sweep_thresholds(&setup, &config.grid_values())?,
            StrategyKind::Baseline => {
                SweepResult::single(baseline()?, None, config_fingerprint(&setup, &Strategy::Baseline))
            }
            StrategyKind::ExpectedMargin => {
                let strategy = Strategy::ExpectedMargin { purchase: relevance };
                let point = evaluate_config(&setup, &strategy)?;
                SweepResult::single(baseline()?, Some(point), config_fingerprint(&setup, &strategy))
            }
        };
        let csv_path = config.out_dir.join(format!("sweep_{}.csv", kind.name()));
        write_file(&csv_path, &sweep.to_csv())?;
        outcomes.push(StrategyOutcome {
            strategy: kind,
            sweep,
            csv_path,
        });
    }

    let model_path = config.out_dir.join("model.txt");
    model.save(&model_path)?;
    profits.save_csv(&config.out_dir.join("profits.csv"), data.items())?;

    let global_mean_rmse = {
        let mu = model.global_mean;
        let n = split.test.len().max(1) as f64;
        (split.test.ratings().iter().map(|r| (r.value - mu).powi(2)).sum::<f64>() / n).sqrt()
    };
    let summary = RunSummary {
        out_dir: config.out_dir.clone(),
        n_users: data.n_users(),
        n_items: data.n_items(),
        n_ratings: data.len(),
        test_rmse: model.rmse(&split.test),
        global_mean_rmse,
        outcomes,
        config_fingerprint: config.fingerprint(),
        wall_clock_secs: started.elapsed().as_secs_f64(),
    };
    write_file(&config.out_dir.join("manifest.cfg"), &manifest_text(config, &summary))?;
    Ok(summary)
}

fn manifest_text(config: &ExperimentConfig, summary: &RunSummary) -> String {
    let mut resolved = config.clone();
    if let Ok(abs) = fs::canonicalize(&resolved.data_path) {
        resolved.data_path = abs;
    }
    let mut out = String::from("# margin-bench run manifest; usable as a config.\n");
    out.push_str(&resolved.to_text());
    let _ = writeln!(out, "manifest.version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "manifest.config_fingerprint = {}", summary.config_fingerprint);
    let _ = writeln!(out, "manifest.n_users = {}", summary.n_users);
    let _ = writeln!(out, "manifest.n_items = {}", summary.n_items);
    let _ = writeln!(out, "manifest.n_ratings = {}", summary.n_ratings);
    let _ = writeln!(out, "manifest.test_rmse = {:.6}", summary.test_rmse);
    let _ = writeln!(out, "manifest.global_mean_rmse = {:.6}", summary.global_mean_rmse);
    for o in &summary.outcomes {
        let _ = writeln!(out, "manifest.sweep_fingerprint.{} = {}", o.strategy.name(), o.sweep.fingerprint);
    }
    let _ = writeln!(out, "manifest.wall_clock_secs = {:.3}", summary.wall_clock_secs);
    out
}

/// One CSV row, keeping the original text of every field.
#[derive(Debug, Clone)]
struct ReportRow {
    fields: Vec<String>,
    point: EvalPoint,
}

fn parse_threshold(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "+inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        other => other.parse().ok(),
    }
}

fn read_sweep_rows(path: &Path) -> Result<Vec<ReportRow>, HarnessError> {
    let fail = |m: String| HarnessError::Report(format!("{}: {m}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| fail(e.to_string()))?;
    let header = reader.headers().map_err(|e| fail(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(fail(format!("expected header `{CSV_HEADER}`")));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| fail(e.to_string()))?;
        let line = i + 2;
        let fields: Vec<String> = record.iter().map(|f| f.trim().to_string()).collect();
        let num = |idx: usize| -> Result<f64, HarnessError> {
            fields[idx]
                .parse()
                .map_err(|_| fail(format!("line {line}: bad number `{}`", fields[idx])))
        };
        let point = EvalPoint {
            threshold: parse_threshold(&fields[0]).ok_or_else(|| fail(format!("line {line}: bad threshold")))?,
            avg_profit_guaranteed: num(1)?,
            avg_profit_relevance: num(2)?,
            precision_at_n: num(3)?,
            accuracy_loss_pct: num(4)?,
            profit_gain_pct: num(5)?,
        };
        rows.push(ReportRow { fields, point });
    }
    if rows.is_empty() || rows[0].point.threshold != f64::INFINITY {
        return Err(fail("first row must be the baseline (threshold `inf`)".into()));
    }
    Ok(rows)
}

/// Thresholds the report always mentions.
pub const REPORT_THRESHOLDS: [f64; 2] = [4.5, 4.0];

/// Human-readable summary of a sweep CSV.
pub fn report(csv_path: &Path) -> Result<String, HarnessError> {
    let rows = read_sweep_rows(csv_path)?;
    let (base, points) = rows.split_first().expect("non-empty");
    let mut out = String::new();
    let _ = writeln!(out, "sweep: {}", csv_path.display());
    let _ = writeln!(
        out,
        "baseline (top-n, no re-ranking): avg profit guaranteed {} | relevance-based {} | precision@n {}",
        base.fields[1], base.fields[2], base.fields[3]
    );
    if points.is_empty() {
        let _ = writeln!(out, "no sweep points");
        return Ok(out);
    }

    let sweep = SweepResult {
        baseline: base.point,
        points: points.iter().map(|r| r.point).collect(),
        fingerprint: String::new(),
    };
    for (label, objective, column) in [
        ("guaranteed purchase", ProfitObjective::Guaranteed, 1),
        ("relevance-based purchase", ProfitObjective::Relevance, 2),
    ] {
        if let Some((t, _)) = find_optimal_threshold(&sweep, objective) {
            let row = points.iter().find(|r| r.point.threshold == t).expect("optimum is a row");
            let _ = writeln!(
                out,
                "optimal threshold ({label}): {} with avg profit {} (gain {}%, accuracy loss {}%)",
                row.fields[0], row.fields[column], row.fields[5], row.fields[4]
            );
        }
    }
    for t in REPORT_THRESHOLDS {
        match points.iter().find(|r| (r.point.threshold - t).abs() < 1e-9) {
            Some(row) => {
                let _ = writeln!(
                    out,
                    "T_R = {t:.1}: profit gain {}%, accuracy loss {}% (avg profit {} guaranteed, {} relevance-based)",
                    row.fields[5], row.fields[4], row.fields[1], row.fields[2]
                );
            }
            None => {
                let _ = writeln!(out, "T_R = {t:.1}: not in grid");
            }
        }
    }
    Ok(out)
}

/// Parses command-line overrides: `--key value`, `--key=value` or
/// `key=value`.
pub fn parse_overrides(args: &[String]) -> Result<BTreeMap<String, String>, HarnessError> {
    let mut out = BTreeMap::new();
    let mut iter = args.iter();
    while let Some(arg) = iter.next() {
        let body = arg.strip_prefix("--").unwrap_or(arg);
        if let Some((k, v)) = body.split_once('=') {
            out.insert(k.to_string(), v.to_string());
        } else if arg.starts_with("--") {
            let value = iter
                .next()
                .ok_or_else(|| HarnessError::Config(format!("override `{arg}` needs a value")))?;
            out.insert(body.to_string(), value.clone());
        } else {
            return Err(HarnessError::Config(format!("cannot parse override `{arg}`")));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_text_round_trips() {
        let mut cfg = ExperimentConfig::default();
        cfg.grid = Some(vec![4.5, 4.0, 3.3]);
        cfg.mf.learning_rate = 0.0123;
        cfg.profit_table = Some(PathBuf::from("/tmp/p.csv"));
        cfg.strategies = vec![StrategyKind::ExpectedMargin];
        assert_eq!(ExperimentConfig::parse(&cfg.to_text(), None).unwrap(), cfg);
        let defaults = ExperimentConfig::parse(&default_config_text(), None).unwrap();
        assert_eq!(defaults, ExperimentConfig::default());
    }

    #[test]
    fn relative_data_path_resolves_against_config_dir() {
        let cfg = ExperimentConfig::parse("data.path = r.csv\n", Some(Path::new("/a/b"))).unwrap();
        assert_eq!(cfg.data_path, PathBuf::from("/a/b/r.csv"));
        let cfg = ExperimentConfig::parse("data.path = /x/r.csv\n", Some(Path::new("/a/b"))).unwrap();
        assert_eq!(cfg.data_path, PathBuf::from("/x/r.csv"));
    }

    #[test]
    fn config_errors() {
        assert!(ExperimentConfig::parse("mf.k 3\n", None).is_err());
        assert!(ExperimentConfig::parse("mf.bogus = 3\n", None).is_err());
        assert!(ExperimentConfig::parse("mf.k = many\n", None).is_err());
        assert!(ExperimentConfig::parse("run.strategies = nope\n", None).is_err());
        assert!(ExperimentConfig::parse("manifest.anything = 1\n# note\n\n", None).is_ok());
        let mut cfg = ExperimentConfig::default();
        cfg.n = 0;
        assert_eq!(cfg.validate().unwrap_err().exit_code(), 1);
    }

    #[test]
    fn fingerprint_ignores_output_dir_only() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        b.out_dir = PathBuf::from("elsewhere");
        assert_eq!(a.fingerprint(), b.fingerprint());
        b.mf.seed += 1;
        assert_ne!(a.fingerprint(), b.fingerprint());
    }

    #[test]
    fn override_syntaxes() {
        let args: Vec<String> = ["--mf.k", "8", "--profit.sigma=0.5", "rerank.n=5"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let o = parse_overrides(&args).unwrap();
        assert_eq!(o["mf.k"], "8");
        assert_eq!(o["profit.sigma"], "0.5");
        assert_eq!(o["rerank.n"], "5");
        assert!(parse_overrides(&["--mf.k".to_string()]).is_err());
        assert!(parse_overrides(&["loose".to_string()]).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(HarnessError::Config("x".into()).exit_code(), 1);
        let data = HarnessError::Data(DataError::InvalidFraction(2.0));
        assert_eq!(data.exit_code(), 2);
        let numeric = HarnessError::Factor(FactorError::Diverged { epoch: 1, learning_rate: 1.0 });
        assert_eq!(numeric.exit_code(), 3);
    }
}
