use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use margin_bench::harness::{self, ExperimentConfig, HarnessError};

#[derive(Parser)]
#[command(name = "margin-bench", version, about = "Profit-aware top-N re-ranking experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write artifacts to the output directory.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the split, model and profit seeds.
        #[arg(long)]
        seed: Option<u64>,
        /// Dotted-key overrides: `--mf.k 16`, `--mf.k=16` or `mf.k=16`.
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        overrides: Vec<String>,
    },
    /// Summarize a sweep CSV.
    Report { csv: PathBuf },
    /// Print the default config.
    GenConfig,
}

fn run(config: PathBuf, out: Option<PathBuf>, seed: Option<u64>, overrides: Vec<String>) -> Result<(), HarnessError> {
    let mut cfg = ExperimentConfig::load(&config)?;
    for (key, value) in harness::parse_overrides(&overrides)? {
        cfg.set(&key, &value)?;
    }
    if let Some(seed) = seed {
        cfg.set_seed(seed);
    }
    if let Some(out) = out {
        cfg.out_dir = out;
    }
    let summary = harness::run(&cfg)?;
    println!(
        "{} ratings, {} users, {} items; test RMSE {:.4} (global mean {:.4})",
        summary.n_ratings, summary.n_users, summary.n_items, summary.test_rmse, summary.global_mean_rmse
    );
    for o in &summary.outcomes {
        println!("{}: {}", o.strategy, o.csv_path.display());
    }
    println!("artifacts in {} ({:.1}s)", summary.out_dir.display(), summary.wall_clock_secs);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run { config, out, seed, overrides } => run(config, out, seed, overrides),
        Command::Report { csv } => harness::report(&csv).map(|text| print!("{text}")),
        Command::GenConfig => {
            print!("{}", harness::default_config_text());
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("margin-bench: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
