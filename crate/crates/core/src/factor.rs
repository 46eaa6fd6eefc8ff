//! Biased matrix factorization trained with stochastic gradient descent.
//!
//! The model predicts `mu + b_u + b_i + p_u . q_i`, clamped to the rating
//! scale. Training minimizes, per observed rating,
//!
//! ```text
//! L = (r - r_hat)^2 + reg * (b_u^2 + b_i^2 + |p_u|^2 + |q_i|^2)
//! ```
//!
//! with the unclamped `r_hat`, stepping each touched parameter by
//! `-lr * dL/dtheta / 2`.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dataio::{InteractionSet, UserRatings, MAX_RATING, MIN_RATING};

#[derive(Debug, Error)]
pub enum FactorError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("training diverged at epoch {epoch} (non-finite loss); try a smaller learning rate than {learning_rate}")]
    Diverged { epoch: usize, learning_rate: f64 },
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(String),
    #[error("user index {0} out of range")]
    UserOutOfRange(usize),
    #[error("item index {0} out of range")]
    ItemOutOfRange(usize),
    #[error("model file {path}: {reason}")]
    Persist { path: String, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hyperparams {
    pub k: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub regularization: f64,
    pub init_scale: f64,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            k: 32,
            epochs: 20,
            learning_rate: 0.005,
            regularization: 0.02,
            init_scale: 0.1,
            seed: 42,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<(), FactorError> {
        let bad = |msg: String| Err(FactorError::InvalidHyperparams(msg));
        if self.k == 0 {
            return bad("k must be at least 1".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        if !(self.regularization >= 0.0 && self.regularization.is_finite()) {
            return bad(format!("regularization must be non-negative, got {}", self.regularization));
        }
        if !(self.init_scale > 0.0 && self.init_scale.is_finite()) {
            return bad(format!("init_scale must be positive, got {}", self.init_scale));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorModel {
    pub global_mean: f64,
    pub user_bias: Vec<f64>,
    pub item_bias: Vec<f64>,
    /// Row-major, `n_users x k`.
    pub user_factors: Vec<f64>,
    /// Row-major, `n_items x k`.
    pub item_factors: Vec<f64>,
    pub k: usize,
}

impl FactorModel {
    /// A model whose every parameter is zero.
    pub fn zeros(n_users: usize, n_items: usize, k: usize, global_mean: f64) -> Self {
        FactorModel {
            global_mean,
            user_bias: vec![0.0; n_users],
            item_bias: vec![0.0; n_items],
            user_factors: vec![0.0; n_users * k],
            item_factors: vec![0.0; n_items * k],
            k,
        }
    }

    pub fn n_users(&self) -> usize {
        self.user_bias.len()
    }

    pub fn n_items(&self) -> usize {
        self.item_bias.len()
    }

    pub fn user_vector(&self, user: usize) -> &[f64] {
        &self.user_factors[user * self.k..(user + 1) * self.k]
    }

    pub fn item_vector(&self, item: usize) -> &[f64] {
        &self.item_factors[item * self.k..(item + 1) * self.k]
    }

    /// Unclamped score. Indices must be in range.
    pub fn raw_score(&self, user: usize, item: usize) -> f64 {
        self.global_mean + self.user_bias[user] + self.item_bias[item] + dot(self.user_vector(user), self.item_vector(item))
    }

    pub fn predict(&self, user: usize, item: usize) -> Result<f64, FactorError> {
        if user >= self.n_users() {
            return Err(FactorError::UserOutOfRange(user));
        }
        if item >= self.n_items() {
            return Err(FactorError::ItemOutOfRange(item));
        }
        Ok(clamp_rating(self.raw_score(user, item)))
    }

    pub fn all_finite(&self) -> bool {
        self.global_mean.is_finite()
            && [&self.user_bias, &self.item_bias, &self.user_factors, &self.item_factors]
                .iter()
                .all(|v| v.iter().all(|x| x.is_finite()))
    }

    /// Root mean squared error of clamped predictions over `data`.
    pub fn rmse(&self, data: &InteractionSet) -> f64 {
        if data.is_empty() {
            return 0.0;
        }
        let sse: f64 = data
            .ratings()
            .iter()
            .map(|r| {
                let e = r.value - clamp_rating(self.raw_score(r.user, r.item));
                e * e
            })
            .sum();
        (sse / data.len() as f64).sqrt()
    }

    pub fn save(&self, path: &Path) -> Result<(), FactorError> {
        fs::write(path, self.to_text()).map_err(|e| FactorError::Persist {
            path: path.display().to_string(),
            reason: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, FactorError> {
        let text = fs::read_to_string(path).map_err(|e| FactorError::Persist {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::from_text(&text).map_err(|reason| FactorError::Persist {
            path: path.display().to_string(),
            reason,
        })
    }

    /// Text dump. Floats use Rust's shortest round-trip formatting, so
    /// `from_text(to_text(m)) == m` bit for bit.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MODEL_MAGIC} {MODEL_VERSION}");
        let _ = writeln!(out, "dims {} {} {}", self.n_users(), self.n_items(), self.k);
        let _ = writeln!(out, "clamp {MIN_RATING:?} {MAX_RATING:?}");
        let _ = writeln!(out, "global_mean {:?}", self.global_mean);
        write_row(&mut out, "user_bias", &self.user_bias);
        write_row(&mut out, "item_bias", &self.item_bias);
        for u in 0..self.n_users() {
            write_row(&mut out, "p", self.user_vector(u));
        }
        for i in 0..self.n_items() {
            write_row(&mut out, "q", self.item_vector(i));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        let mut next = |label: &str| -> Result<Vec<&str>, String> {
            let line = lines.next().ok_or_else(|| format!("truncated before `{label}`"))?;
            let mut fields = line.split(' ');
            match fields.next() {
                Some(tag) if tag == label => Ok(fields.collect()),
                other => Err(format!("expected `{label}`, found `{}`", other.unwrap_or(""))),
            }
        };
        let header = next(MODEL_MAGIC)?;
        if header != [MODEL_VERSION] {
            return Err(format!("unsupported version {header:?}"));
        }
        let dims = parse_usizes(&next("dims")?)?;
        let [n_users, n_items, k] = dims[..] else {
            return Err("dims needs three values".into());
        };
        next("clamp")?;
        let global_mean = parse_floats(&next("global_mean")?, 1)?[0];
        let user_bias = parse_floats(&next("user_bias")?, n_users)?;
        let item_bias = parse_floats(&next("item_bias")?, n_items)?;
        let mut user_factors = Vec::with_capacity(n_users * k);
        for _ in 0..n_users {
            user_factors.extend(parse_floats(&next("p")?, k)?);
        }
        let mut item_factors = Vec::with_capacity(n_items * k);
        for _ in 0..n_items {
            item_factors.extend(parse_floats(&next("q")?, k)?);
        }
        Ok(FactorModel {
            global_mean,
            user_bias,
            item_bias,
            user_factors,
            item_factors,
            k,
        })
    }
}

const MODEL_MAGIC: &str = "margin-bench-model";
const MODEL_VERSION: &str = "1";

fn write_row(out: &mut String, tag: &str, values: &[f64]) {
    out.push_str(tag);
    for v in values {
        let _ = write!(out, " {v:?}");
    }
    out.push('\n');
}

fn parse_usizes(fields: &[&str]) -> Result<Vec<usize>, String> {
    fields
        .iter()
        .map(|f| f.parse().map_err(|_| format!("bad integer `{f}`")))
        .collect()
}

fn parse_floats(fields: &[&str], expected: usize) -> Result<Vec<f64>, String> {
    if fields.len() != expected {
        return Err(format!("expected {expected} values, found {}", fields.len()));
    }
    fields
        .iter()
        .map(|f| f.parse().map_err(|_| format!("bad float `{f}`")))
        .collect()
}

pub fn clamp_rating(x: f64) -> f64 {
    x.clamp(MIN_RATING, MAX_RATING)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn train(data: &InteractionSet, hp: &Hyperparams) -> Result<FactorModel, FactorError> {
    hp.validate()?;
    let global_mean = data.mean_rating().ok_or(FactorError::EmptyTrainingSet)?;
    let (n_users, n_items, k) = (data.n_users(), data.n_items(), hp.k);
    if hp.epochs == 0 {
        return Ok(FactorModel::zeros(n_users, n_items, k, global_mean));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
    let mut model = FactorModel::zeros(n_users, n_items, k, global_mean);
    let scale = hp.init_scale;
    for x in model.user_factors.iter_mut().chain(model.item_factors.iter_mut()) {
        *x = rng.random_range(-scale..scale);
    }

    let ratings = data.ratings();
    let mut order: Vec<usize> = (0..ratings.len()).collect();
    let (lr, reg) = (hp.learning_rate, hp.regularization);
    for epoch in 1..=hp.epochs {
        order.shuffle(&mut rng);
        let mut loss = 0.0;
        for &idx in &order {
            let r = ratings[idx];
            let err = r.value - model.raw_score(r.user, r.item);
            loss += err * err;

            let bu = &mut model.user_bias[r.user];
            *bu += lr * (err - reg * *bu);
            let bi = &mut model.item_bias[r.item];
            *bi += lr * (err - reg * *bi);

            let p = &mut model.user_factors[r.user * k..(r.user + 1) * k];
            let q = &mut model.item_factors[r.item * k..(r.item + 1) * k];
            for (pf, qf) in p.iter_mut().zip(q.iter_mut()) {
                let (pv, qv) = (*pf, *qf);
                *pf += lr * (err * qv - reg * pv);
                *qf += lr * (err * pv - reg * qv);
            }
        }
        if !loss.is_finite() || !model.all_finite() {
            return Err(FactorError::Diverged {
                epoch,
                learning_rate: lr,
            });
        }
    }
    Ok(model)
}

/// Per-rating training objective.
#[derive(Debug, Clone, Copy)]
pub struct Objective {
    pub regularization: f64,
    /// When false the squared-error term is dropped, leaving only the penalty.
    pub include_residual: bool,
}

impl Objective {
    pub fn loss(&self, model: &FactorModel, user: usize, item: usize, rating: f64) -> f64 {
        let penalty = model.user_bias[user].powi(2)
            + model.item_bias[item].powi(2)
            + dot(model.user_vector(user), model.user_vector(user))
            + dot(model.item_vector(item), model.item_vector(item));
        let residual = if self.include_residual {
            (rating - model.raw_score(user, item)).powi(2)
        } else {
            0.0
        };
        residual + self.regularization * penalty
    }

    /// Analytic gradient over the parameters touched by `(user, item)`, in
    /// [`touched_parameters`] order.
    pub fn gradient(&self, model: &FactorModel, user: usize, item: usize, rating: f64) -> Vec<f64> {
        let e = if self.include_residual {
            rating - model.raw_score(user, item)
        } else {
            0.0
        };
        let reg = self.regularization;
        let (p, q) = (model.user_vector(user), model.item_vector(item));
        let mut g = Vec::with_capacity(2 + 2 * model.k);
        g.push(-2.0 * e + 2.0 * reg * model.user_bias[user]);
        g.push(-2.0 * e + 2.0 * reg * model.item_bias[item]);
        g.extend(p.iter().zip(q).map(|(pf, qf)| -2.0 * e * qf + 2.0 * reg * pf));
        g.extend(q.iter().zip(p).map(|(qf, pf)| -2.0 * e * pf + 2.0 * reg * qf));
        g
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    UserBias(usize),
    ItemBias(usize),
    UserFactor(usize, usize),
    ItemFactor(usize, usize),
}

pub fn touched_parameters(k: usize, user: usize, item: usize) -> Vec<Param> {
    let mut params = vec![Param::UserBias(user), Param::ItemBias(item)];
    params.extend((0..k).map(|f| Param::UserFactor(user, f)));
    params.extend((0..k).map(|f| Param::ItemFactor(item, f)));
    params
}

fn param_mut(model: &mut FactorModel, param: Param) -> &mut f64 {
    let k = model.k;
    match param {
        Param::UserBias(u) => &mut model.user_bias[u],
        Param::ItemBias(i) => &mut model.item_bias[i],
        Param::UserFactor(u, f) => &mut model.user_factors[u * k + f],
        Param::ItemFactor(i, f) => &mut model.item_factors[i * k + f],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientCheck {
    pub analytic: Vec<f64>,
    pub numeric: Vec<f64>,
    pub max_relative_deviation: f64,
}

/// Compares the analytic gradient against central finite differences.
///
/// Relative deviation per parameter is `|a - n| / max(|a|, |n|, 1e-6)`.
pub fn gradient_check(
    model: &FactorModel,
    objective: &Objective,
    user: usize,
    item: usize,
    rating: f64,
    epsilon: f64,
) -> GradientCheck {
    let analytic = objective.gradient(model, user, item, rating);
    let mut probe = model.clone();
    let numeric: Vec<f64> = touched_parameters(model.k, user, item)
        .into_iter()
        .map(|param| {
            let original = *param_mut(&mut probe, param);
            *param_mut(&mut probe, param) = original + epsilon;
            let up = objective.loss(&probe, user, item, rating);
            *param_mut(&mut probe, param) = original - epsilon;
            let down = objective.loss(&probe, user, item, rating);
            *param_mut(&mut probe, param) = original;
            (up - down) / (2.0 * epsilon)
        })
        .collect();
    let max_relative_deviation = analytic
        .iter()
        .zip(&numeric)
        .map(|(a, n)| (a - n).abs() / a.abs().max(n.abs()).max(1e-6))
        .fold(0.0, f64::max);
    GradientCheck {
        analytic,
        numeric,
        max_relative_deviation,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub item: usize,
    pub predicted: f64,
}

/// Candidates for one user, ordered by predicted rating desc then item asc.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    pub user: usize,
    pub entries: Vec<Candidate>,
}

impl RankedList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn items(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|c| c.item)
    }
}

/// Descending by prediction, then ascending by item index.
pub fn by_prediction(a: &Candidate, b: &Candidate) -> Ordering {
    b.predicted.total_cmp(&a.predicted).then(a.item.cmp(&b.item))
}

/// Ranks every item the user has not rated in `seen`.
pub fn rank_candidates(model: &FactorModel, user: usize, seen: &UserRatings) -> Result<RankedList, FactorError> {
    if user >= model.n_users() {
        return Err(FactorError::UserOutOfRange(user));
    }
    let rated = seen.items(user);
    let mut entries: Vec<Candidate> = (0..model.n_items())
        .filter(|item| rated.binary_search(item).is_err())
        .map(|item| Candidate {
            item,
            predicted: clamp_rating(model.raw_score(user, item)),
        })
        .collect();
    entries.sort_by(by_prediction);
    Ok(RankedList { user, entries })
}
