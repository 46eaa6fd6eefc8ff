//! Synthetic per-item profits drawn from a truncated Gaussian.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::dataio::IndexMap;

#[derive(Debug, Error)]
pub enum ProfitError {
    #[error("invalid profit config: {0}")]
    InvalidConfig(String),
    #[error("profit table {path}: {reason}")]
    Table { path: String, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfitConfig {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub sigma: f64,
    pub seed: u64,
}

impl Default for ProfitConfig {
    fn default() -> Self {
        ProfitConfig {
            mean: 2.0,
            min: 0.0,
            max: 4.0,
            sigma: 1.0,
            seed: 42,
        }
    }
}

impl ProfitConfig {
    pub fn validate(&self) -> Result<(), ProfitError> {
        let bad = |msg: String| Err(ProfitError::InvalidConfig(msg));
        if ![self.mean, self.min, self.max, self.sigma].iter().all(|x| x.is_finite()) {
            return bad("all values must be finite".into());
        }
        if self.min >= self.max {
            return bad(format!("min {} must be below max {}", self.min, self.max));
        }
        if self.mean < self.min || self.mean > self.max {
            return bad(format!("mean {} outside [{}, {}]", self.mean, self.min, self.max));
        }
        if self.sigma <= 0.0 {
            return bad(format!("sigma must be positive, got {}", self.sigma));
        }
        Ok(())
    }
}

/// Profit in dollars per item index.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfitTable {
    pub profit: Vec<f64>,
}

impl ProfitTable {
    pub fn len(&self) -> usize {
        self.profit.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profit.is_empty()
    }

    pub fn get(&self, item: usize) -> Option<f64> {
        self.profit.get(item).copied()
    }

    pub fn mean(&self) -> f64 {
        self.profit.iter().sum::<f64>() / self.profit.len() as f64
    }

    /// CSV `item_id,profit` with raw item ids and six decimals.
    pub fn to_csv(&self, items: &IndexMap) -> String {
        let mut out = String::from("item_id,profit\n");
        for (idx, p) in self.profit.iter().enumerate() {
            let raw = items.raw_id(idx).expect("profit table longer than item map");
            let _ = writeln!(out, "{raw},{p:.6}");
        }
        out
    }

    pub fn save_csv(&self, path: &Path, items: &IndexMap) -> Result<(), ProfitError> {
        fs::write(path, self.to_csv(items)).map_err(|e| ProfitError::Table {
            path: path.display().to_string(),
            reason: e.to_string(),
        })
    }

    /// Reads a table written by [`ProfitTable::save_csv`]. Every item in
    /// `items` must be present; unknown ids are rejected.
    pub fn load_csv(path: &Path, items: &IndexMap) -> Result<Self, ProfitError> {
        let fail = |reason: String| ProfitError::Table {
            path: path.display().to_string(),
            reason,
        };
        let mut reader = csv::Reader::from_path(path).map_err(|e| fail(e.to_string()))?;
        let mut profit = vec![f64::NAN; items.len()];
        for (row, record) in reader.records().enumerate() {
            let record = record.map_err(|e| fail(e.to_string()))?;
            let line = row + 2;
            if record.len() != 2 {
                return Err(fail(format!("line {line}: expected 2 fields")));
            }
            let raw: u32 = record[0]
                .trim()
                .parse()
                .map_err(|_| fail(format!("line {line}: bad item id `{}`", &record[0])))?;
            let value: f64 = record[1]
                .trim()
                .parse()
                .map_err(|_| fail(format!("line {line}: bad profit `{}`", &record[1])))?;
            let idx = items
                .index_of(raw)
                .ok_or_else(|| fail(format!("line {line}: unknown item id {raw}")))?;
            profit[idx] = value;
        }
        if let Some(idx) = profit.iter().position(|p| p.is_nan()) {
            return Err(fail(format!("no profit for item id {}", items.raw_id(idx).unwrap_or(0))));
        }
        Ok(ProfitTable { profit })
    }
}

/// Independent Gaussian draws, resampled until they land in `[min, max]`.
pub fn assign_profits(n_items: usize, cfg: &ProfitConfig) -> Result<ProfitTable, ProfitError> {
    cfg.validate()?;
    let normal = Normal::new(cfg.mean, cfg.sigma).map_err(|e| ProfitError::InvalidConfig(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let profit = (0..n_items)
        .map(|_| loop {
            let draw = normal.sample(&mut rng);
            if (cfg.min..=cfg.max).contains(&draw) {
                break draw;
            }
        })
        .collect();
    Ok(ProfitTable { profit })
}
