//! Rating ingestion and train/test partitioning.
//!
//! Raw user and item ids are remapped to dense 0-based indices when a file is
//! loaded. Every split of a set shares the source's index maps, so models,
//! profit tables and evaluation all agree on what index `i` means.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub const MIN_RATING: f64 = 1.0;
pub const MAX_RATING: f64 = 5.0;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed record: {reason}")]
    Malformed {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("{path}:{line}: rating out of range: {rating} not in [1, 5]")]
    RatingOutOfRange {
        path: PathBuf,
        line: usize,
        rating: f64,
    },
    #[error("{path}:{line}: duplicate rating for user {user_id}, item {item_id}")]
    Duplicate {
        path: PathBuf,
        line: usize,
        user_id: u32,
        item_id: u32,
    },
    #[error("test fraction {0} outside [0, 1]")]
    InvalidFraction(f64),
    #[error("unknown rating format `{0}` (expected movielens-1m, movielens-100k or csv)")]
    UnknownFormat(String),
}

/// On-disk layout of a ratings file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatingFormat {
    /// `UserID::MovieID::Rating::Timestamp`
    MovieLens1M,
    /// Tab separated `user item rating timestamp`.
    MovieLens100K,
    /// `user,item,rating[,timestamp]` with a header line.
    Csv,
}

impl RatingFormat {
    pub fn name(self) -> &'static str {
        match self {
            RatingFormat::MovieLens1M => "movielens-1m",
            RatingFormat::MovieLens100K => "movielens-100k",
            RatingFormat::Csv => "csv",
        }
    }
}

impl FromStr for RatingFormat {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "movielens-1m" | "ml-1m" => Ok(RatingFormat::MovieLens1M),
            "movielens-100k" | "ml-100k" => Ok(RatingFormat::MovieLens100K),
            "csv" => Ok(RatingFormat::Csv),
            other => Err(DataError::UnknownFormat(other.to_string())),
        }
    }
}

impl fmt::Display for RatingFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interaction {
    pub user_id: u32,
    pub item_id: u32,
    pub rating: f64,
    pub timestamp: Option<i64>,
}

/// Bijection between raw ids and contiguous indices, ordered by raw id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexMap {
    raw: Vec<u32>,
    lookup: HashMap<u32, usize>,
}

impl IndexMap {
    pub fn from_ids(ids: impl IntoIterator<Item = u32>) -> Self {
        let mut raw: Vec<u32> = ids.into_iter().collect();
        raw.sort_unstable();
        raw.dedup();
        let lookup = raw.iter().enumerate().map(|(idx, &id)| (id, idx)).collect();
        IndexMap { raw, lookup }
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn index_of(&self, raw_id: u32) -> Option<usize> {
        self.lookup.get(&raw_id).copied()
    }

    pub fn raw_id(&self, index: usize) -> Option<u32> {
        self.raw.get(index).copied()
    }

    pub fn raw_ids(&self) -> &[u32] {
        &self.raw
    }
}

/// A rating in index space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rating {
    pub user: usize,
    pub item: usize,
    pub value: f64,
}

/// Ratings plus the user/item index maps they were built against.
#[derive(Debug, Clone)]
pub struct InteractionSet {
    interactions: Vec<Interaction>,
    ratings: Vec<Rating>,
    users: Arc<IndexMap>,
    items: Arc<IndexMap>,
}

impl InteractionSet {
    /// Builds a set whose index maps cover exactly the ids present.
    ///
    /// Panics on duplicate (user, item) pairs; loaders report those as errors
    /// before getting here.
    pub fn from_interactions(interactions: Vec<Interaction>) -> Self {
        let users = Arc::new(IndexMap::from_ids(interactions.iter().map(|x| x.user_id)));
        let items = Arc::new(IndexMap::from_ids(interactions.iter().map(|x| x.item_id)));
        let mut seen = HashSet::with_capacity(interactions.len());
        for x in &interactions {
            assert!(
                seen.insert((x.user_id, x.item_id)),
                "duplicate pair ({}, {})",
                x.user_id,
                x.item_id
            );
        }
        Self::with_maps(interactions, users, items)
    }

    fn with_maps(interactions: Vec<Interaction>, users: Arc<IndexMap>, items: Arc<IndexMap>) -> Self {
        let ratings = interactions
            .iter()
            .map(|x| Rating {
                user: users.index_of(x.user_id).expect("user id in map"),
                item: items.index_of(x.item_id).expect("item id in map"),
                value: x.rating,
            })
            .collect();
        InteractionSet {
            interactions,
            ratings,
            users,
            items,
        }
    }

    pub fn interactions(&self) -> &[Interaction] {
        &self.interactions
    }

    pub fn ratings(&self) -> &[Rating] {
        &self.ratings
    }

    pub fn len(&self) -> usize {
        self.interactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interactions.is_empty()
    }

    pub fn users(&self) -> &IndexMap {
        &self.users
    }

    pub fn items(&self) -> &IndexMap {
        &self.items
    }

    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    /// True when both sets were built against the same index maps.
    pub fn shares_maps_with(&self, other: &InteractionSet) -> bool {
        (Arc::ptr_eq(&self.users, &other.users) || self.users == other.users)
            && (Arc::ptr_eq(&self.items, &other.items) || self.items == other.items)
    }

    pub fn mean_rating(&self) -> Option<f64> {
        if self.ratings.is_empty() {
            return None;
        }
        Some(self.ratings.iter().map(|r| r.value).sum::<f64>() / self.ratings.len() as f64)
    }

    /// The interactions for which `keep` holds, under this set's index maps.
    pub fn subset(&self, mut keep: impl FnMut(&Interaction) -> bool) -> InteractionSet {
        let kept = self.interactions.iter().filter(|x| keep(x)).copied().collect();
        Self::with_maps(kept, self.users.clone(), self.items.clone())
    }

    /// Groups ratings by user index.
    pub fn by_user(&self) -> UserRatings {
        UserRatings::new(self.n_users(), &self.ratings)
    }
}

/// Compressed per-user view of a rating set: items for user `u` sit in
/// `items[offsets[u]..offsets[u + 1]]`, sorted by item index.
#[derive(Debug, Clone)]
pub struct UserRatings {
    offsets: Vec<usize>,
    items: Vec<usize>,
    values: Vec<f64>,
}

impl UserRatings {
    fn new(n_users: usize, ratings: &[Rating]) -> Self {
        let mut counts = vec![0usize; n_users + 1];
        for r in ratings {
            counts[r.user + 1] += 1;
        }
        for u in 0..n_users {
            counts[u + 1] += counts[u];
        }
        let offsets = counts;
        let mut cursor = offsets.clone();
        let mut pairs = vec![(0usize, 0.0f64); ratings.len()];
        for r in ratings {
            pairs[cursor[r.user]] = (r.item, r.value);
            cursor[r.user] += 1;
        }
        for u in 0..n_users {
            pairs[offsets[u]..offsets[u + 1]].sort_by_key(|p| p.0);
        }
        let (items, values) = pairs.into_iter().unzip();
        UserRatings {
            offsets,
            items,
            values,
        }
    }

    pub fn n_users(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Item indices rated by `user`, ascending. Empty for unknown users.
    pub fn items(&self, user: usize) -> &[usize] {
        match self.range(user) {
            Some((lo, hi)) => &self.items[lo..hi],
            None => &[],
        }
    }

    pub fn values(&self, user: usize) -> &[f64] {
        match self.range(user) {
            Some((lo, hi)) => &self.values[lo..hi],
            None => &[],
        }
    }

    pub fn contains(&self, user: usize, item: usize) -> bool {
        self.items(user).binary_search(&item).is_ok()
    }

    fn range(&self, user: usize) -> Option<(usize, usize)> {
        (user + 1 < self.offsets.len()).then(|| (self.offsets[user], self.offsets[user + 1]))
    }
}

#[derive(Debug, Clone)]
pub struct Split {
    pub train: InteractionSet,
    pub test: InteractionSet,
    pub seed: u64,
    pub test_fraction: f64,
}

pub fn load_ratings(path: &Path, format: RatingFormat) -> Result<InteractionSet, DataError> {
    let text = fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_ratings(&text, format, path)
}

/// Parses ratings from in-memory text; `origin` is only used in error messages.
pub fn parse_ratings(text: &str, format: RatingFormat, origin: &Path) -> Result<InteractionSet, DataError> {
    let malformed = |line: usize, reason: String| DataError::Malformed {
        path: origin.to_path_buf(),
        line,
        reason,
    };

    let mut interactions = Vec::new();
    let mut seen = HashSet::new();
    let mut header_pending = format == RatingFormat::Csv;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() {
            continue;
        }
        if header_pending {
            header_pending = false;
            if line.starts_with(|c: char| c.is_ascii_alphabetic()) {
                let cols: Vec<&str> = line.split(',').map(str::trim).collect();
                if cols.len() < 3 || cols[..3] != ["user", "item", "rating"] {
                    return Err(malformed(
                        line_no,
                        format!("expected header `user,item,rating[,timestamp]`, got `{line}`"),
                    ));
                }
                continue;
            }
        }

        let fields: Vec<&str> = match format {
            RatingFormat::MovieLens1M => line.split("::").collect(),
            RatingFormat::MovieLens100K => line.split(['\t', ' ']).filter(|f| !f.is_empty()).collect(),
            RatingFormat::Csv => line.split(',').map(str::trim).collect(),
        };
        if fields.len() < 3 {
            return Err(malformed(line_no, format!("expected at least 3 fields, found {}", fields.len())));
        }

        let parse_id = |field: &str, what: &str| -> Result<u32, DataError> {
            let id: u32 = field
                .parse()
                .map_err(|_| malformed(line_no, format!("{what} id `{field}` is not a positive integer")))?;
            if id == 0 {
                return Err(malformed(line_no, format!("{what} id must be positive")));
            }
            Ok(id)
        };
        let user_id = parse_id(fields[0], "user")?;
        let item_id = parse_id(fields[1], "item")?;
        let rating: f64 = fields[2]
            .parse()
            .map_err(|_| malformed(line_no, format!("rating `{}` is not a number", fields[2])))?;
        if !(MIN_RATING..=MAX_RATING).contains(&rating) {
            return Err(DataError::RatingOutOfRange {
                path: origin.to_path_buf(),
                line: line_no,
                rating,
            });
        }
        let timestamp = match fields.get(3) {
            Some(ts) => Some(
                ts.parse::<i64>()
                    .map_err(|_| malformed(line_no, format!("timestamp `{ts}` is not an integer")))?,
            ),
            None => None,
        };

        if !seen.insert((user_id, item_id)) {
            return Err(DataError::Duplicate {
                path: origin.to_path_buf(),
                line: line_no,
                user_id,
                item_id,
            });
        }
        interactions.push(Interaction {
            user_id,
            item_id,
            rating,
            timestamp,
        });
    }

    Ok(InteractionSet::from_interactions(interactions))
}

/// Per-user stratified holdout.
///
/// Each user with `c >= 2` ratings sends `round(test_fraction * c)` of them,
/// chosen by a seeded shuffle, to the test side. Users with one rating stay in
/// train. Both partitions keep the source order and the source index maps.
pub fn split_holdout(data: &InteractionSet, test_fraction: f64, seed: u64) -> Result<Split, DataError> {
    if !(0.0..=1.0).contains(&test_fraction) {
        return Err(DataError::InvalidFraction(test_fraction));
    }

    let mut positions: Vec<Vec<usize>> = vec![Vec::new(); data.n_users()];
    for (pos, r) in data.ratings.iter().enumerate() {
        positions[r.user].push(pos);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_test = vec![false; data.len()];
    for user_positions in &mut positions {
        let count = user_positions.len();
        if count < 2 {
            continue;
        }
        let n_test = ((test_fraction * count as f64).round() as usize).min(count);
        let (chosen, _) = user_positions.partial_shuffle(&mut rng, n_test);
        for &pos in chosen.iter() {
            in_test[pos] = true;
        }
    }

    let mut train = Vec::with_capacity(data.len());
    let mut test = Vec::new();
    for (x, &is_test) in data.interactions.iter().zip(&in_test) {
        if is_test {
            test.push(*x);
        } else {
            train.push(*x);
        }
    }

    Ok(Split {
        train: InteractionSet::with_maps(train, data.users.clone(), data.items.clone()),
        test: InteractionSet::with_maps(test, data.users.clone(), data.items.clone()),
        seed,
        test_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, format: RatingFormat) -> Result<InteractionSet, DataError> {
        parse_ratings(text, format, Path::new("<mem>"))
    }

    fn grid(users: u32, items: u32) -> InteractionSet {
        let mut xs = Vec::new();
        for u in 1..=users {
            for i in 1..=items {
                xs.push(Interaction {
                    user_id: u,
                    item_id: i,
                    rating: f64::from((u + i) % 5 + 1),
                    timestamp: None,
                });
            }
        }
        InteractionSet::from_interactions(xs)
    }

    #[test]
    fn parses_movielens_1m_line() {
        let set = parse("1::1193::5::978300760\n", RatingFormat::MovieLens1M).unwrap();
        assert_eq!(
            set.interactions()[0],
            Interaction {
                user_id: 1,
                item_id: 1193,
                rating: 5.0,
                timestamp: Some(978300760)
            }
        );
        assert_eq!((set.n_users(), set.n_items()), (1, 1));
    }

    #[test]
    fn parses_100k_and_csv() {
        let a = parse("196\t242\t3\t881250949\n186\t302\t3\t891717742\n", RatingFormat::MovieLens100K).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a.users().raw_ids(), &[186, 196]);
        let b = parse("user,item,rating\n3,7,4.5\n1,7,2\n", RatingFormat::Csv).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b.interactions()[0].rating, 4.5);
        assert_eq!(b.interactions()[0].timestamp, None);
        assert_eq!(b.ratings()[0], Rating { user: 1, item: 0, value: 4.5 });
    }

    #[test]
    fn empty_input_is_empty_set() {
        let set = parse("", RatingFormat::MovieLens1M).unwrap();
        assert!(set.is_empty());
        assert_eq!((set.n_users(), set.n_items()), (0, 0));
    }

    #[test]
    fn rejects_out_of_range_rating() {
        let err = parse("1::1193::9::0\n", RatingFormat::MovieLens1M).unwrap_err();
        assert!(matches!(err, DataError::RatingOutOfRange { line: 1, .. }));
        assert!(err.to_string().contains("rating out of range"));
    }

    #[test]
    fn reports_malformed_line_number() {
        let err = parse("1::2::3::4\n1::x::3::4\n", RatingFormat::MovieLens1M).unwrap_err();
        assert!(matches!(err, DataError::Malformed { line: 2, .. }), "{err}");
        let err = parse("1::2\n", RatingFormat::MovieLens1M).unwrap_err();
        assert!(matches!(err, DataError::Malformed { line: 1, .. }));
        let err = parse("0::2::3\n", RatingFormat::MovieLens1M).unwrap_err();
        assert!(matches!(err, DataError::Malformed { line: 1, .. }));
    }

    #[test]
    fn rejects_duplicate_pairs() {
        let err = parse("1::2::3::4\n2::2::3::4\n1::2::5::9\n", RatingFormat::MovieLens1M).unwrap_err();
        assert!(matches!(err, DataError::Duplicate { line: 3, user_id: 1, item_id: 2, .. }));
    }

    #[test]
    fn missing_file_names_path() {
        let err = load_ratings(Path::new("/nonexistent/ratings.dat"), RatingFormat::MovieLens1M).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/ratings.dat"));
    }

    #[test]
    fn index_maps_are_dense_and_sorted() {
        let set = parse("10::5::3\n2::99::4\n10::7::1\n", RatingFormat::MovieLens1M).unwrap();
        assert_eq!(set.users().raw_ids(), &[2, 10]);
        assert_eq!(set.items().raw_ids(), &[5, 7, 99]);
        for idx in 0..set.n_items() {
            let raw = set.items().raw_id(idx).unwrap();
            assert_eq!(set.items().index_of(raw), Some(idx));
        }
    }

    #[test]
    fn zero_fraction_keeps_everything_in_train() {
        let data = grid(5, 6);
        let split = split_holdout(&data, 0.0, 1).unwrap();
        assert!(split.test.is_empty());
        assert_eq!(split.train.interactions(), data.interactions());
    }

    #[test]
    fn full_fraction_moves_all_of_a_user() {
        let data = grid(1, 4);
        let split = split_holdout(&data, 1.0, 1).unwrap();
        assert_eq!(split.test.len(), 4);
        assert!(split.train.is_empty());
    }

    #[test]
    fn single_rating_user_stays_in_train() {
        let data = parse("1::1::3\n2::1::4\n2::2::5\n", RatingFormat::MovieLens1M).unwrap();
        let split = split_holdout(&data, 1.0, 3).unwrap();
        assert_eq!(split.train.interactions(), &data.interactions()[..1]);
        assert_eq!(split.test.len(), 2);
    }

    #[test]
    fn per_user_counts_are_rounded_fraction() {
        let data = grid(7, 13);
        let split = split_holdout(&data, 0.2, 42).unwrap();
        let test = split.test.by_user();
        for u in 0..7 {
            assert_eq!(test.items(u).len(), 3); // round(2.6)
        }
        assert!(split.train.shares_maps_with(&split.test));
    }

    #[test]
    fn split_rejects_bad_fraction() {
        let data = grid(2, 2);
        assert!(matches!(split_holdout(&data, 1.5, 0), Err(DataError::InvalidFraction(_))));
        assert!(split_holdout(&data, -0.1, 0).is_err());
    }

    #[test]
    fn split_is_deterministic() {
        let data = grid(20, 17);
        let a = split_holdout(&data, 0.2, 42).unwrap();
        let b = split_holdout(&data, 0.2, 42).unwrap();
        assert_eq!(a.train.interactions(), b.train.interactions());
        assert_eq!(a.test.interactions(), b.test.interactions());
        let c = split_holdout(&data, 0.2, 43).unwrap();
        assert_ne!(a.test.interactions(), c.test.interactions());
    }

    #[test]
    fn user_ratings_lookup() {
        let data = parse("1::5::3\n1::2::4\n2::5::1\n", RatingFormat::MovieLens1M).unwrap();
        let by_user = data.by_user();
        assert_eq!(by_user.items(0), &[0, 1]);
        assert_eq!(by_user.values(0), &[4.0, 3.0]);
        assert!(by_user.contains(1, 1));
        assert!(!by_user.contains(1, 0));
        assert!(by_user.items(9).is_empty());
    }
}
