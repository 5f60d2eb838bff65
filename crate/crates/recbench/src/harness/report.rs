//! Writes experiment artifacts: raw and aggregated CSVs, a consensus
//! leaderboard, the metric correlation table, a JSON dump, and a
//! human-oriented markdown summary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::harness::borda::{borda_count, LeaderboardEntry};
use crate::harness::runner::RunOutcome;
use crate::metrics::{AggregateRow, CorrelationMatrix, Metric};
use crate::{Error, Result};

/// Correlations at or above this magnitude get called out in the report.
pub const STRONG_CORRELATION: f64 = 0.9;

/// Everything derived from one run that the report files need.
pub struct ReportInputs<'a> {
    pub outcome: &'a RunOutcome,
    pub cutoffs: &'a [usize],
}

fn hardware_line() -> String {
    let threads = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    format!(
        "{}/{}, {} threads",
        std::env::consts::OS,
        std::env::consts::ARCH,
        threads
    )
}

fn quote_csv(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn write_file(dir: &Path, name: &str, content: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, content).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

fn summary_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::from("algorithm,dataset,cutoff,metric,mean,std,folds\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.algorithm, r.dataset, r.cutoff, r.metric, r.mean, r.std, r.folds
        );
    }
    out
}

fn timings_csv(outcome: &RunOutcome) -> String {
    let mut out = String::from("algorithm,dataset,fold,train_seconds,eval_seconds\n");
    for t in &outcome.timings {
        let _ = writeln!(
            out,
            "{},{},{},{:.6},{:.6}",
            t.algorithm, t.dataset, t.fold, t.train_seconds, t.eval_seconds
        );
    }
    out
}

fn failures_csv(outcome: &RunOutcome) -> String {
    let mut out = String::from("algorithm,dataset,fold,error\n");
    for f in &outcome.failures {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            f.algorithm,
            f.dataset,
            f.fold,
            quote_csv(&f.error)
        );
    }
    out
}

fn leaderboard_csv(board: &[LeaderboardEntry]) -> String {
    let mut out = String::from("rank,algorithm,points,mean_rank\n");
    for (i, e) in board.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{:.3}",
            i + 1,
            e.algorithm,
            e.points,
            e.mean_rank()
        );
    }
    out
}

/// Cross-fold means for one (dataset, cutoff), keyed algorithm -> metric.
type CellTable = std::collections::BTreeMap<String, std::collections::BTreeMap<&'static str, f64>>;

fn cell_table(rows: &[AggregateRow], dataset: &str, cutoff: usize) -> CellTable {
    let mut table = CellTable::new();
    for r in rows.iter().filter(|r| r.dataset == dataset && r.cutoff == cutoff) {
        table
            .entry(r.algorithm.clone())
            .or_default()
            .insert(r.metric.label(), r.mean);
    }
    table
}

fn markdown_table(
    out: &mut String,
    table: &CellTable,
    metrics: &[Metric],
    sort_by: &'static str,
) {
    let _ = write!(out, "| algorithm |");
    for m in metrics {
        let _ = write!(out, " {m} |");
    }
    out.push('\n');
    let _ = write!(out, "|---|");
    for _ in metrics {
        let _ = write!(out, "---|");
    }
    out.push('\n');

    let mut names: Vec<&String> = table.keys().collect();
    names.sort_by(|a, b| {
        let va = table[*a].get(sort_by).copied().unwrap_or(f64::NEG_INFINITY);
        let vb = table[*b].get(sort_by).copied().unwrap_or(f64::NEG_INFINITY);
        vb.total_cmp(&va).then(a.cmp(b))
    });
    for name in names {
        let _ = write!(out, "| {name} |");
        for m in metrics {
            match table[name].get(m.label()) {
                Some(v) => {
                    let _ = write!(out, " {v:.4} |");
                }
                None => {
                    let _ = write!(out, " - |");
                }
            }
        }
        out.push('\n');
    }
}

fn markdown_report(
    inputs: &ReportInputs,
    summary: &[AggregateRow],
    board: Option<&[LeaderboardEntry]>,
    correlation: Option<&CorrelationMatrix>,
    primary_cutoff: usize,
) -> String {
    let mut md = String::new();
    let _ = writeln!(md, "# Benchmark report\n");
    let _ = writeln!(md, "Hardware: {}\n", hardware_line());

    let mut datasets: Vec<&str> = summary.iter().map(|r| r.dataset.as_str()).collect();
    datasets.sort_unstable();
    datasets.dedup();

    let accuracy: Vec<Metric> = Metric::ALL
        .iter()
        .copied()
        .filter(|m| m.is_accuracy())
        .collect();
    let beyond: Vec<Metric> = Metric::ALL
        .iter()
        .copied()
        .filter(|m| !m.is_accuracy())
        .collect();

    for dataset in &datasets {
        let table = cell_table(summary, dataset, primary_cutoff);
        let _ = writeln!(md, "## {dataset} @ {primary_cutoff}\n");
        let _ = writeln!(md, "### Ranking accuracy\n");
        markdown_table(&mut md, &table, &accuracy, Metric::Ndcg.label());
        let _ = writeln!(md, "\n### Coverage, novelty, and popularity bias\n");
        markdown_table(&mut md, &table, &beyond, Metric::Ndcg.label());
        md.push('\n');
    }

    if !inputs.outcome.timings.is_empty() {
        let _ = writeln!(md, "## Training time\n");
        let _ = writeln!(md, "| algorithm | dataset | mean train s | mean eval s |");
        let _ = writeln!(md, "|---|---|---|---|");
        // average the folds, then order slowest first
        let mut agg: std::collections::BTreeMap<(String, String), (f64, f64, usize)> =
            std::collections::BTreeMap::new();
        for t in &inputs.outcome.timings {
            let e = agg
                .entry((t.algorithm.clone(), t.dataset.clone()))
                .or_insert((0.0, 0.0, 0));
            e.0 += t.train_seconds;
            e.1 += t.eval_seconds;
            e.2 += 1;
        }
        let mut lines: Vec<(String, String, f64, f64)> = agg
            .into_iter()
            .map(|((a, d), (tr, ev, n))| (a, d, tr / n as f64, ev / n as f64))
            .collect();
        lines.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)));
        for (a, d, tr, ev) in lines {
            let _ = writeln!(md, "| {a} | {d} | {tr:.3} | {ev:.3} |");
        }
        md.push('\n');
    }

    if let Some(board) = board {
        let _ = writeln!(md, "## Consensus leaderboard\n");
        let _ = writeln!(md, "| rank | algorithm | points | mean rank |");
        let _ = writeln!(md, "|---|---|---|---|");
        for (i, e) in board.iter().enumerate() {
            let _ = writeln!(
                md,
                "| {} | {} | {} | {:.2} |",
                i + 1,
                e.algorithm,
                e.points,
                e.mean_rank()
            );
        }
        md.push('\n');
    }

    if let Some(corr) = correlation {
        let strong = corr.strong_pairs(STRONG_CORRELATION);
        let _ = writeln!(md, "## Strongly correlated measures (|r| >= {STRONG_CORRELATION})\n");
        if strong.is_empty() {
            let _ = writeln!(md, "None.\n");
        } else {
            for (a, b, r) in strong {
                let _ = writeln!(md, "- {a} and {b}: r = {r:.3}");
            }
            md.push('\n');
        }
    }

    if !inputs.outcome.failures.is_empty() {
        let _ = writeln!(md, "## Failures\n");
        for f in &inputs.outcome.failures {
            let _ = writeln!(
                md,
                "- {} on {} fold {}: {}",
                f.algorithm, f.dataset, f.fold, f.error
            );
        }
        md.push('\n');
    }

    md
}

fn json_report(
    summary: &[AggregateRow],
    inputs: &ReportInputs,
    board: Option<&[LeaderboardEntry]>,
    correlation: Option<&CorrelationMatrix>,
) -> String {
    let board_json: Vec<serde_json::Value> = board
        .unwrap_or(&[])
        .iter()
        .enumerate()
        .map(|(i, e)| {
            serde_json::json!({
                "rank": i + 1,
                "algorithm": e.algorithm,
                "points": e.points,
                "mean_rank": e.mean_rank(),
            })
        })
        .collect();
    let strong: Vec<serde_json::Value> = correlation
        .map(|c| {
            c.strong_pairs(STRONG_CORRELATION)
                .into_iter()
                .map(|(a, b, r)| serde_json::json!({"a": a, "b": b, "r": r}))
                .collect()
        })
        .unwrap_or_default();
    let value = serde_json::json!({
        "hardware": hardware_line(),
        "summary": summary,
        "timings": inputs.outcome.timings,
        "failures": inputs.outcome.failures,
        "leaderboard": board_json,
        "strong_correlations": strong,
    });
    serde_json::to_string_pretty(&value).expect("report serialization cannot fail")
}

/// Writes every artifact into `out_dir` (created if missing) and returns
/// the paths. The leaderboard and correlation table need a complete grid;
/// when failures punched holes in it they are skipped and the markdown
/// notes the gap instead.
pub fn emit_report(inputs: &ReportInputs, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();

    let summary = inputs.outcome.report.fold_means();
    let primary_cutoff = inputs.cutoffs.first().copied().unwrap_or(10);

    write_file(out_dir, "metrics.csv", &inputs.outcome.report.to_csv(), &mut written)?;
    write_file(out_dir, "summary.csv", &summary_csv(&summary), &mut written)?;
    write_file(out_dir, "timings.csv", &timings_csv(inputs.outcome), &mut written)?;
    write_file(out_dir, "failures.csv", &failures_csv(inputs.outcome), &mut written)?;

    let accuracy: Vec<Metric> = Metric::ALL
        .iter()
        .copied()
        .filter(|m| m.is_accuracy())
        .collect();
    let board = borda_count(&summary, &accuracy, primary_cutoff).ok();
    if let Some(board) = &board {
        write_file(out_dir, "leaderboard.csv", &leaderboard_csv(board), &mut written)?;
    }

    let correlation = inputs
        .outcome
        .report
        .metric_columns(primary_cutoff)
        .ok()
        .map(|cols| CorrelationMatrix::from_columns(&cols));
    if let Some(corr) = &correlation {
        write_file(out_dir, "correlations.csv", &corr.to_csv(), &mut written)?;
    }

    let md = markdown_report(
        inputs,
        &summary,
        board.as_deref(),
        correlation.as_ref(),
        primary_cutoff,
    );
    write_file(out_dir, "report.md", &md, &mut written)?;

    let json = json_report(&summary, inputs, board.as_deref(), correlation.as_ref());
    write_file(out_dir, "report.json", &json, &mut written)?;

    Ok(written)
}
