//! Command-line front end. Each subcommand is a thin wrapper over the
//! library; all real logic lives in `recbench::{corpus, models, metrics,
//! harness}`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use recbench::corpus::{
    binarize, build_matrix, load_interactions, pcore_filter, split_repeated_holdout, DatasetStats,
    InteractionMatrix, PrepManifest, SplitSet,
};
use recbench::harness::{
    borda_count, default_trials, emit_report, search_space, tune, AlgorithmKind, ExperimentConfig,
    ReportInputs, RunOutcome, STRONG_CORRELATION,
};
use recbench::metrics::{CorrelationMatrix, Metric, MetricReport};
use recbench::{Error, Result};

#[derive(Parser)]
#[command(
    name = "recbench",
    version,
    about = "Benchmark top-N recommenders with reproducible splits and reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a dataset, apply the rating threshold and core filter, and
    /// write the prepared interactions with stats and a manifest
    Prep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Prepare and then carve the repeated holdout folds, recording a
    /// checksum per fold so reruns can be verified
    Split {
        #[arg(long)]
        config: PathBuf,
    },
    /// Random-search one algorithm's hyperparameters on the first fold
    Tune {
        #[arg(long)]
        config: PathBuf,
        /// Algorithm name, e.g. UserKNN or EASE
        #[arg(long)]
        algorithm: String,
        /// Search budget; defaults to a size based on the space dimension
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Full benchmark: prepare, split, train every configured algorithm on
    /// every fold, evaluate, and write all report artifacts
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Consensus leaderboard across datasets and accuracy measures from a
    /// saved metrics.csv
    Borda {
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long, default_value_t = 10)]
        cutoff: usize,
    },
    /// Pearson correlations between measures from a saved metrics.csv
    Correlate {
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long, default_value_t = 10)]
        cutoff: usize,
        /// Flag pairs at or above this magnitude
        #[arg(long, default_value_t = STRONG_CORRELATION)]
        threshold: f64,
    },
    /// Regenerate report artifacts from a saved metrics.csv
    Report {
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Prep { config } => cmd_prep(&config),
        Command::Split { config } => cmd_split(&config),
        Command::Tune {
            config,
            algorithm,
            trials,
        } => cmd_tune(&config, &algorithm, trials),
        Command::Run { config } => cmd_run(&config),
        Command::Borda { metrics, cutoff } => cmd_borda(&metrics, cutoff),
        Command::Correlate {
            metrics,
            cutoff,
            threshold,
        } => cmd_correlate(&metrics, cutoff, threshold),
        Command::Report { metrics, out } => cmd_report(&metrics, &out),
    }
}

/// Runs the preprocessing chain from the config: load, threshold (skipped
/// for formats without a rating column), core filter, index.
fn prepare(cfg: &ExperimentConfig) -> Result<InteractionMatrix> {
    let format = cfg.dataset.input_format()?;
    let raw = load_interactions(&cfg.dataset.path, &format)?;
    eprintln!(
        "loaded {} interactions from {}",
        raw.interactions.len(),
        cfg.dataset.path.display()
    );
    let raw = if format.rating_col.is_some() {
        let kept = binarize(raw, cfg.dataset.rating_threshold);
        eprintln!(
            "kept {} interactions above rating {}",
            kept.interactions.len(),
            cfg.dataset.rating_threshold
        );
        kept
    } else {
        raw
    };
    let raw = if cfg.dataset.core > 1 {
        let filtered = pcore_filter(raw, cfg.dataset.core as u32)?;
        eprintln!(
            "{}-core filter left {} interactions",
            cfg.dataset.core,
            filtered.interactions.len()
        );
        filtered
    } else {
        raw
    };
    Ok(build_matrix(&raw))
}

fn manifest_for(cfg: &ExperimentConfig, matrix: &InteractionMatrix) -> PrepManifest {
    let format_has_ratings = cfg
        .dataset
        .input_format()
        .map(|f| f.rating_col.is_some())
        .unwrap_or(false);
    PrepManifest::new(
        &cfg.dataset.name,
        format_has_ratings.then_some(cfg.dataset.rating_threshold),
        cfg.dataset.core as u32,
        matrix,
    )
}

fn write_text(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|e| Error::io(path, e))
}

fn ensure_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn cmd_prep(config: &Path) -> Result<ExitCode> {
    let cfg = ExperimentConfig::load(config)?;
    let matrix = prepare(&cfg)?;
    let stats = DatasetStats::of(&matrix);
    let out = cfg.resolve_output_dir().join("prep");
    ensure_dir(&out)?;

    let mut interactions = String::from("user,item\n");
    for (u, i) in matrix.pairs() {
        interactions.push_str(&matrix.ids.users[u as usize]);
        interactions.push(',');
        interactions.push_str(&matrix.ids.items[i as usize]);
        interactions.push('\n');
    }
    write_text(&out.join("interactions.csv"), &interactions)?;
    write_text(
        &out.join("stats.csv"),
        &format!("{}\n{}\n", DatasetStats::csv_header(), stats.csv_row()),
    )?;
    manifest_for(&cfg, &matrix).save(out.join("manifest.json"))?;

    println!(
        "{}: {} users, {} items, {} interactions (density {:.5})",
        cfg.dataset.name, stats.users, stats.items, stats.interactions, stats.density
    );
    println!("wrote {}", out.display());
    Ok(ExitCode::SUCCESS)
}

fn make_split(cfg: &ExperimentConfig, matrix: &InteractionMatrix) -> SplitSet {
    split_repeated_holdout(matrix, cfg.repeats, cfg.test_fraction, cfg.seed)
}

fn cmd_split(config: &Path) -> Result<ExitCode> {
    let cfg = ExperimentConfig::load(config)?;
    let matrix = prepare(&cfg)?;
    let split = make_split(&cfg, &matrix);
    let out = cfg.resolve_output_dir().join("splits");
    ensure_dir(&out)?;

    let mut folds = String::from("fold,train,test\n");
    for (k, fold) in split.folds.iter().enumerate() {
        folds.push_str(&format!(
            "{},{},{}\n",
            k,
            fold.train.n_interactions(),
            fold.test.n_interactions()
        ));
    }
    write_text(&out.join("folds.csv"), &folds)?;
    manifest_for(&cfg, &matrix)
        .with_split(&split)
        .save(out.join("manifest.json"))?;

    for (k, fold) in split.folds.iter().enumerate() {
        println!(
            "fold {k}: {} train / {} test interactions",
            fold.train.n_interactions(),
            fold.test.n_interactions()
        );
    }
    println!("wrote {}", out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_tune(config: &Path, algorithm: &str, trials: Option<usize>) -> Result<ExitCode> {
    let cfg = ExperimentConfig::load(config)?;
    let kind = AlgorithmKind::parse(algorithm)
        .ok_or_else(|| Error::Config(format!("unknown algorithm `{algorithm}`")))?;
    let matrix = prepare(&cfg)?;
    let split = make_split(&cfg, &matrix);
    let space = search_space(kind);
    let budget = trials.unwrap_or_else(|| default_trials(kind));

    println!(
        "tuning {kind} over {} dimensions, {budget} trials",
        space.n_dims()
    );
    let result = tune(kind, &space, budget, &split.folds[0], cfg.seed)?;
    for t in &result.trials {
        match (&t.score, &t.error) {
            (Some(s), _) => println!("  trial {:>3}  {:.6}  {}", t.trial, s, t.params),
            (None, Some(e)) => println!("  trial {:>3}  failed: {e}", t.trial),
            _ => unreachable!("a trial is either scored or failed"),
        }
    }
    println!(
        "best: trial {} scoring {:.6} with {}",
        result.best_trial, result.best_score, result.best
    );

    let out = cfg.resolve_output_dir().join("tune");
    ensure_dir(&out)?;
    let mut doc = format!("kind = \"{kind}\"\n\n[params]\n");
    let params_toml =
        toml::to_string(&result.best).map_err(|e| Error::Config(format!("{e}")))?;
    doc.push_str(&params_toml);
    let path = out.join(format!("{kind}.toml"));
    write_text(&path, &doc)?;
    println!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_run(config: &Path) -> Result<ExitCode> {
    let cfg = ExperimentConfig::load(config)?;
    let specs = cfg.resolved_algorithms()?;
    if specs.is_empty() {
        return Err(Error::Config(
            "no algorithms configured; add [[algorithms]] entries".into(),
        ));
    }
    let matrix = prepare(&cfg)?;
    let split = make_split(&cfg, &matrix);

    let outcome = recbench::harness::run_experiment(
        &cfg.dataset.name,
        &split,
        &specs,
        &cfg.cutoffs,
        cfg.seed,
    );
    let out = cfg.resolve_output_dir();
    let written = emit_report(
        &ReportInputs {
            outcome: &outcome,
            cutoffs: &cfg.cutoffs,
        },
        &out,
    )?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    if outcome.fully_successful() {
        println!(
            "{} algorithms x {} folds completed cleanly",
            specs.len(),
            split.folds.len()
        );
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("{} cell(s) failed; see failures.csv", outcome.failures.len());
        Ok(ExitCode::FAILURE)
    }
}

fn accuracy_metrics() -> Vec<Metric> {
    Metric::ALL
        .iter()
        .copied()
        .filter(|m| m.is_accuracy())
        .collect()
}

fn cmd_borda(metrics: &Path, cutoff: usize) -> Result<ExitCode> {
    let report = MetricReport::read_csv(metrics)?;
    let board = borda_count(&report.fold_means(), &accuracy_metrics(), cutoff)?;
    println!("{:<5} {:<16} {:>8} {:>10}", "rank", "algorithm", "points", "mean rank");
    for (i, e) in board.iter().enumerate() {
        println!(
            "{:<5} {:<16} {:>8} {:>10.2}",
            i + 1,
            e.algorithm,
            e.points,
            e.mean_rank()
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_correlate(metrics: &Path, cutoff: usize, threshold: f64) -> Result<ExitCode> {
    let report = MetricReport::read_csv(metrics)?;
    let columns = report.metric_columns(cutoff)?;
    let matrix = CorrelationMatrix::from_columns(&columns);
    print!("{}", matrix.to_csv());
    let strong = matrix.strong_pairs(threshold);
    if strong.is_empty() {
        eprintln!("no pairs at |r| >= {threshold}");
    } else {
        for (a, b, r) in strong {
            eprintln!("|r| >= {threshold}: {a} and {b} (r = {r:.3})");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_report(metrics: &Path, out: &Path) -> Result<ExitCode> {
    let report = MetricReport::read_csv(metrics)?;
    let mut cutoffs: Vec<usize> = report.rows.iter().map(|r| r.cutoff).collect();
    cutoffs.sort_unstable();
    cutoffs.dedup();
    if cutoffs.is_empty() {
        return Err(Error::Config("metrics file holds no rows".into()));
    }
    let outcome = RunOutcome {
        report,
        timings: Vec::new(),
        failures: Vec::new(),
    };
    let written = emit_report(
        &ReportInputs {
            outcome: &outcome,
            cutoffs: &cutoffs,
        },
        out,
    )?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}
