//! End to end in one process: generate a rating file, prepare it, split it,
//! run a small roster over every fold, and write the full report bundle.
//!
//!   cargo run --example full_benchmark

use std::io::Write;

use recbench::corpus::{
    binarize, build_matrix, load_interactions, pcore_filter, split_repeated_holdout, InputFormat,
};
use recbench::harness::{
    emit_report, run_experiment, AlgorithmKind, AlgorithmSpec, HyperParams, ReportInputs,
};

fn main() -> recbench::Result<()> {
    // deterministic synthetic ratings: four taste groups with dedicated
    // items, a shared popular head, and low ratings for the threshold to
    // strip; only a model that picks up the groups can beat popularity
    let mut file = tempfile::NamedTempFile::new().expect("temp file");
    let mut state = 0xfeedu64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    for u in 0..80u64 {
        let group = u % 4;
        for d in 0..10u64 {
            // roughly a third of each user's block is held back by rating
            let rating = if next() % 3 == 0 { 2 } else { 4 + next() % 2 };
            writeln!(file, "u{u},g{group}i{d},{rating},0").expect("write");
        }
        for p in 0..5u64 {
            let rating = 1 + next() % 5;
            writeln!(file, "u{u},pop{p},{rating},0").expect("write");
        }
    }

    let raw = load_interactions(file.path(), &InputFormat::csv())?;
    let cored = pcore_filter(binarize(raw, 3.0), 3)?;
    let matrix = build_matrix(&cored);
    println!(
        "prepared: {} users x {} items, {} interactions",
        matrix.n_users(),
        matrix.n_items(),
        matrix.n_interactions()
    );

    let split = split_repeated_holdout(&matrix, 5, 0.2, 2024);
    let specs = vec![
        AlgorithmSpec::new(AlgorithmKind::Random, HyperParams::new()),
        AlgorithmSpec::new(AlgorithmKind::MostPop, HyperParams::new()),
        AlgorithmSpec::new(
            AlgorithmKind::UserKnn,
            HyperParams::new()
                .with_int("topk", 20)
                .with_text("similarity", "cosine"),
        ),
        AlgorithmSpec::new(AlgorithmKind::Ease, HyperParams::new().with_float("l2", 30.0)),
    ];

    let outcome = run_experiment("synthetic", &split, &specs, &[10, 20], 2024);
    println!(
        "ran {} cells, {} failures",
        specs.len() * split.folds.len(),
        outcome.failures.len()
    );

    let dir = tempfile::tempdir().expect("temp dir");
    let written = emit_report(
        &ReportInputs {
            outcome: &outcome,
            cutoffs: &[10, 20],
        },
        dir.path(),
    )?;
    println!("report bundle:");
    for path in &written {
        let bytes = std::fs::metadata(path).map(|m| m.len()).unwrap_or(0);
        println!("  {} ({bytes} bytes)", path.file_name().unwrap().to_string_lossy());
    }

    let leaderboard = std::fs::read_to_string(dir.path().join("leaderboard.csv"))
        .expect("leaderboard was written");
    println!("\n{leaderboard}");

    // the personalized models must outrank the unpersonalized baselines
    let order: Vec<&str> = leaderboard
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    let pos = |name: &str| order.iter().position(|&a| a == name).unwrap();
    assert!(pos("EASE") < pos("MostPop"));
    assert!(pos("UserKNN") < pos("Random"));
    println!("sanity: EASE and UserKNN outrank the baselines");
    Ok(())
}
