//! Train the biased MF predictor, check its gradient and persist it.
//!
//! ```bash
//! cargo run --release -p margin-bench --example train_factor_model -- data/ml-1m/ratings.dat movielens-1m
//! ```

use std::path::PathBuf;

use margin_bench::factor::{gradient_check, Objective};
use margin_bench::{load_ratings, rank_candidates, split_holdout, train, FactorModel, Hyperparams, RatingFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let (path, format, hp) = match args.next() {
        Some(p) => (
            PathBuf::from(p),
            args.next().unwrap_or_else(|| "movielens-1m".into()).parse()?,
            Hyperparams::default(),
        ),
        None => (
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic_200.csv"),
            RatingFormat::Csv,
            Hyperparams {
                k: 4,
                epochs: 30,
                learning_rate: 0.01,
                ..Hyperparams::default()
            },
        ),
    };

    let data = load_ratings(&path, format)?;
    let split = split_holdout(&data, 0.2, 42)?;
    let model = train(&split.train, &hp)?;

    let mu = model.global_mean;
    let baseline_rmse = (split.test.ratings().iter().map(|r| (r.value - mu).powi(2)).sum::<f64>()
        / split.test.len().max(1) as f64)
        .sqrt();
    println!("{hp:?}");
    println!("train RMSE {:.4}", model.rmse(&split.train));
    println!("test RMSE {:.4} vs global mean {:.4}", model.rmse(&split.test), baseline_rmse);

    let r = split.train.ratings()[0];
    let objective = Objective {
        regularization: hp.regularization,
        include_residual: true,
    };
    let check = gradient_check(&model, &objective, r.user, r.item, r.value, 1e-5);
    println!("gradient check on one rating: max relative deviation {:.2e}", check.max_relative_deviation);

    let ranked = rank_candidates(&model, 0, &split.train.by_user())?;
    println!("user index 0, top 5 candidates:");
    for c in ranked.entries.iter().take(5) {
        println!("  item {:>5}  predicted {:.3}", data.items().raw_id(c.item).unwrap(), c.predicted);
    }

    let out = std::env::temp_dir().join("margin-bench-model.txt");
    model.save(&out)?;
    assert_eq!(FactorModel::load(&out)?, model);
    println!("saved and reloaded {}", out.display());
    Ok(())
}
