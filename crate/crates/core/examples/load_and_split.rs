//! Load a ratings file and make a per-user stratified holdout split.
//!
//! ```bash
//! cargo run -p margin-bench --example load_and_split
//! cargo run -p margin-bench --example load_and_split -- data/ml-1m/ratings.dat movielens-1m
//! ```

use std::path::PathBuf;

use margin_bench::{load_ratings, split_holdout, RatingFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let (path, format) = match args.next() {
        Some(p) => (PathBuf::from(p), args.next().unwrap_or_else(|| "movielens-1m".into()).parse()?),
        None => (
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic_200.csv"),
            RatingFormat::Csv,
        ),
    };

    let data = load_ratings(&path, format)?;
    println!(
        "{}: {} ratings, {} users, {} items, mean rating {:.3}",
        path.display(),
        data.len(),
        data.n_users(),
        data.n_items(),
        data.mean_rating().unwrap_or(f64::NAN)
    );

    let split = split_holdout(&data, 0.2, 42)?;
    println!("train {} / test {} (fraction 0.2, seed 42)", split.train.len(), split.test.len());

    let per_user = split.test.by_user();
    let with_test = (0..data.n_users()).filter(|&u| !per_user.items(u).is_empty()).count();
    println!("{with_test} users have held-out ratings");

    if let Some(first) = data.interactions().first() {
        let user = data.users().index_of(first.user_id).unwrap();
        println!(
            "user id {} -> index {user}; {} training ratings",
            first.user_id,
            split.train.by_user().items(user).len()
        );
    }
    Ok(())
}
