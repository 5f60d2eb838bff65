//! Tabular run results: one row per (algorithm, dataset, fold, cutoff,
//! measure) cell, with CSV and JSON round-trips. Floats are written with the
//! shortest representation that parses back to the same bits, so a re-run of
//! the same experiment produces byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::metrics::Metric;
use crate::{Error, Result};

const CSV_HEADER: &str = "algorithm,dataset,fold,cutoff,metric,value";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub algorithm: String,
    pub dataset: String,
    pub fold: usize,
    pub cutoff: usize,
    pub metric: Metric,
    pub value: f64,
}

/// Mean and spread of one cell across folds. `std` is the population
/// standard deviation over the folds that actually ran.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateRow {
    pub algorithm: String,
    pub dataset: String,
    pub cutoff: usize,
    pub metric: Metric,
    pub mean: f64,
    pub std: f64,
    pub folds: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub rows: Vec<ReportRow>,
}

impl MetricReport {
    pub fn new() -> MetricReport {
        MetricReport::default()
    }

    pub fn push(&mut self, row: ReportRow) {
        assert!(
            !row.algorithm.contains(',') && !row.dataset.contains(','),
            "names must stay comma-free for the CSV layout"
        );
        self.rows.push(row);
    }

    pub fn extend_from(&mut self, other: MetricReport) {
        self.rows.extend(other.rows);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.algorithm, r.dataset, r.fold, r.cutoff, r.metric, r.value
            )
            .expect("writing to a String cannot fail");
        }
        out
    }

    pub fn from_csv(text: &str, origin: &Path) -> Result<MetricReport> {
        let err = |line: usize, message: String| Error::Parse {
            path: origin.to_path_buf(),
            line,
            message,
        };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h == CSV_HEADER => {}
            Some((_, h)) => {
                return Err(err(1, format!("expected header `{CSV_HEADER}`, got `{h}`")))
            }
            None => {
                return Err(Error::EmptyInput {
                    path: origin.to_path_buf(),
                })
            }
        }
        let mut report = MetricReport::new();
        for (idx, line) in lines {
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 6 {
                return Err(err(lineno, format!("expected 6 fields, got {}", fields.len())));
            }
            let fold = fields[2]
                .parse::<usize>()
                .map_err(|e| err(lineno, format!("bad fold `{}`: {e}", fields[2])))?;
            let cutoff = fields[3]
                .parse::<usize>()
                .map_err(|e| err(lineno, format!("bad cutoff `{}`: {e}", fields[3])))?;
            let metric = Metric::parse(fields[4])
                .ok_or_else(|| err(lineno, format!("unknown metric `{}`", fields[4])))?;
            let value = fields[5]
                .parse::<f64>()
                .map_err(|e| err(lineno, format!("bad value `{}`: {e}", fields[5])))?;
            report.push(ReportRow {
                algorithm: fields[0].to_string(),
                dataset: fields[1].to_string(),
                fold,
                cutoff,
                metric,
                value,
            });
        }
        Ok(report)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<MetricReport> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        MetricReport::from_csv(&text, path)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report rows always serialize")
    }

    /// Collapses folds. Output is sorted by (dataset, cutoff, metric label,
    /// algorithm) so downstream files are stable.
    pub fn fold_means(&self) -> Vec<AggregateRow> {
        use std::collections::BTreeMap;
        let mut cells: BTreeMap<(String, usize, &'static str, String), Vec<f64>> =
            BTreeMap::new();
        for r in &self.rows {
            cells
                .entry((
                    r.dataset.clone(),
                    r.cutoff,
                    r.metric.label(),
                    r.algorithm.clone(),
                ))
                .or_default()
                .push(r.value);
        }
        cells
            .into_iter()
            .map(|((dataset, cutoff, label, algorithm), values)| {
                let n = values.len() as f64;
                let mean = values.iter().sum::<f64>() / n;
                let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
                AggregateRow {
                    algorithm,
                    dataset,
                    cutoff,
                    metric: Metric::parse(label).expect("label came from a metric"),
                    mean,
                    std: var.sqrt(),
                    folds: values.len(),
                }
            })
            .collect()
    }

    /// One column per measure at the given cutoff, one entry per
    /// (algorithm, dataset, fold) observation, for correlation analysis.
    /// Observations are sorted; every observation must carry every measure
    /// that appears anywhere at this cutoff.
    pub fn metric_columns(&self, cutoff: usize) -> Result<Vec<(String, Vec<f64>)>> {
        use std::collections::{BTreeMap, BTreeSet};
        let mut metrics: BTreeSet<&'static str> = BTreeSet::new();
        let mut cells: BTreeMap<(String, String, usize), BTreeMap<&'static str, f64>> =
            BTreeMap::new();
        for r in self.rows.iter().filter(|r| r.cutoff == cutoff) {
            metrics.insert(r.metric.label());
            cells
                .entry((r.algorithm.clone(), r.dataset.clone(), r.fold))
                .or_default()
                .insert(r.metric.label(), r.value);
        }
        // keep canonical metric order rather than alphabetical
        let ordered: Vec<&'static str> = Metric::ALL
            .iter()
            .map(|m| m.label())
            .filter(|l| metrics.contains(l))
            .collect();
        let mut columns: Vec<(String, Vec<f64>)> = ordered
            .iter()
            .map(|l| (l.to_string(), Vec::with_capacity(cells.len())))
            .collect();
        for ((algorithm, dataset, fold), values) in &cells {
            for (slot, label) in columns.iter_mut().zip(&ordered) {
                match values.get(label) {
                    Some(&v) => slot.1.push(v),
                    None => {
                        return Err(Error::Config(format!(
                            "observation ({algorithm}, {dataset}, fold {fold}) lacks {label}@{cutoff}"
                        )))
                    }
                }
            }
        }
        Ok(columns)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(alg: &str, fold: usize, metric: Metric, value: f64) -> ReportRow {
        ReportRow {
            algorithm: alg.to_string(),
            dataset: "toy".to_string(),
            fold,
            cutoff: 10,
            metric,
            value,
        }
    }

    fn sample() -> MetricReport {
        let mut r = MetricReport::new();
        r.push(row("alpha", 0, Metric::Ndcg, 0.25));
        r.push(row("alpha", 1, Metric::Ndcg, 0.35));
        r.push(row("beta", 0, Metric::Ndcg, 0.1234567890123));
        r.push(row("beta", 0, Metric::Arp, 1746.7));
        r
    }

    #[test]
    fn csv_round_trip_is_byte_identical() {
        let report = sample();
        let csv = report.to_csv();
        let back = MetricReport::from_csv(&csv, Path::new("sample.csv")).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.to_csv(), csv);
    }

    #[test]
    fn csv_preserves_float_bits() {
        let mut report = MetricReport::new();
        for v in [0.1 + 0.2, 1.0 / 3.0, 1e-12, 123456.789012345] {
            report.push(row("a", 0, Metric::Map, v));
        }
        let back =
            MetricReport::from_csv(&report.to_csv(), Path::new("bits.csv")).unwrap();
        for (a, b) in back.rows.iter().zip(&report.rows) {
            assert_eq!(a.value.to_bits(), b.value.to_bits());
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad_fields = format!("{CSV_HEADER}\na,toy,0,10,nDCG,0.5,extra");
        match MetricReport::from_csv(&bad_fields, Path::new("x.csv")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        let bad_metric = format!("{CSV_HEADER}\na,toy,0,10,Bogus,0.5");
        assert!(matches!(
            MetricReport::from_csv(&bad_metric, Path::new("x.csv")),
            Err(Error::Parse { line: 2, .. })
        ));
        let bad_header = "alg,data,value\n";
        assert!(matches!(
            MetricReport::from_csv(bad_header, Path::new("x.csv")),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn fold_means_collapse_and_sort() {
        let agg = sample().fold_means();
        assert_eq!(agg.len(), 3);
        let alpha = agg
            .iter()
            .find(|a| a.algorithm == "alpha" && a.metric == Metric::Ndcg)
            .unwrap();
        assert_eq!(alpha.folds, 2);
        assert!((alpha.mean - 0.30).abs() < 1e-12);
        assert!((alpha.std - 0.05).abs() < 1e-12);
        // sorted by (dataset, cutoff, metric label, algorithm): ARP < nDCG
        assert_eq!(agg[0].metric, Metric::Arp);
    }

    #[test]
    fn metric_columns_require_complete_observations() {
        let mut report = MetricReport::new();
        report.push(row("a", 0, Metric::Ndcg, 0.5));
        report.push(row("a", 0, Metric::Arp, 100.0));
        report.push(row("b", 0, Metric::Ndcg, 0.4));
        assert!(report.metric_columns(10).is_err());

        report.push(row("b", 0, Metric::Arp, 90.0));
        let cols = report.metric_columns(10).unwrap();
        // canonical order: nDCG before ARP
        assert_eq!(cols[0].0, "nDCG");
        assert_eq!(cols[0].1, vec![0.5, 0.4]);
        assert_eq!(cols[1].0, "ARP");
        assert_eq!(cols[1].1, vec![100.0, 90.0]);
    }

    #[test]
    fn json_includes_labels() {
        let json = sample().to_json();
        assert!(json.contains("\"nDCG\""));
        assert!(json.contains("\"alpha\""));
        let back: MetricReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, sample());
    }
}
