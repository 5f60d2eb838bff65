//! Pearson correlation between measure columns, for spotting measures that
//! move in lockstep across a batch of runs.

use serde::Serialize;

/// Sample Pearson r. `None` when fewer than two points or when either side
/// has zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len(), "columns must pair up");
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mx, my) = (mean(xs), mean(ys));
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        cov += (x - mx) * (y - my);
        vx += (x - mx) * (x - mx);
        vy += (y - my) * (y - my);
    }
    if vx == 0.0 || vy == 0.0 {
        return None;
    }
    // clamp: rounding can push a perfect fit a hair past 1
    Some((cov / (vx * vy).sqrt()).clamp(-1.0, 1.0))
}

/// Pairwise correlations between named columns of equal length.
#[derive(Clone, Debug, Serialize)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    /// `r[i][j]`, `None` where undefined; diagonal is 1.
    pub r: Vec<Vec<Option<f64>>>,
}

impl CorrelationMatrix {
    pub fn from_columns(columns: &[(String, Vec<f64>)]) -> CorrelationMatrix {
        let labels: Vec<String> = columns.iter().map(|(l, _)| l.clone()).collect();
        let k = columns.len();
        let mut r = vec![vec![None; k]; k];
        for i in 0..k {
            r[i][i] = Some(1.0);
            for j in i + 1..k {
                let v = pearson(&columns[i].1, &columns[j].1);
                r[i][j] = v;
                r[j][i] = v;
            }
        }
        CorrelationMatrix { labels, r }
    }

    /// Upper-triangle pairs with `|r| >= threshold`, strongest first, ties by
    /// label-index order.
    pub fn strong_pairs(&self, threshold: f64) -> Vec<(String, String, f64)> {
        let mut out = Vec::new();
        for i in 0..self.labels.len() {
            for j in i + 1..self.labels.len() {
                if let Some(v) = self.r[i][j] {
                    if v.abs() >= threshold {
                        out.push((self.labels[i].clone(), self.labels[j].clone(), v));
                    }
                }
            }
        }
        out.sort_by(|a, b| b.2.abs().total_cmp(&a.2.abs()));
        out
    }

    /// Square CSV with one label column, `NA` where undefined.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("measure");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(l);
            for v in &self.r[i] {
                out.push(',');
                match v {
                    Some(v) => out.push_str(&format!("{v:.6}")),
                    None => out.push_str("NA"),
                }
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hand_computed_r() {
        // deviations (-1, 0, 1) and (-1, 1, 0): cov 1, variances 2 and 2
        let r = pearson(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap();
        assert_abs_diff_eq!(r, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn perfect_linear_maps_hit_the_poles() {
        let xs = [0.3, 1.7, 2.9, 4.1];
        let up: Vec<f64> = xs.iter().map(|x| 3.0 * x + 2.0).collect();
        let down: Vec<f64> = xs.iter().map(|x| -0.5 * x + 7.0).collect();
        assert_eq!(pearson(&xs, &up), Some(1.0));
        assert_eq!(pearson(&xs, &down), Some(-1.0));
    }

    #[test]
    fn affine_rescaling_leaves_r_unchanged() {
        let xs = [0.1, 0.9, 0.4, 0.7, 0.2];
        let ys = [1.0, 0.2, 0.8, 0.9, 0.3];
        let base = pearson(&xs, &ys).unwrap();
        let scaled: Vec<f64> = ys.iter().map(|y| 100.0 * y - 40.0).collect();
        assert_abs_diff_eq!(pearson(&xs, &scaled).unwrap(), base, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_columns_are_undefined() {
        assert_eq!(pearson(&[1.0], &[2.0]), None);
        assert_eq!(pearson(&[1.0, 1.0, 1.0], &[2.0, 3.0, 4.0]), None);
    }

    #[test]
    fn matrix_is_symmetric_with_unit_diagonal() {
        let cols = vec![
            ("a".to_string(), vec![1.0, 2.0, 3.0, 4.0]),
            ("b".to_string(), vec![2.0, 4.0, 6.0, 8.0]),
            ("c".to_string(), vec![5.0, 5.0, 5.0, 5.0]),
        ];
        let m = CorrelationMatrix::from_columns(&cols);
        assert_eq!(m.r[0][0], Some(1.0));
        assert_eq!(m.r[0][1], Some(1.0));
        assert_eq!(m.r[1][0], m.r[0][1]);
        assert_eq!(m.r[0][2], None);
        assert_eq!(m.r[2][2], Some(1.0));
    }

    #[test]
    fn strong_pairs_filters_and_sorts_by_magnitude() {
        let cols = vec![
            ("a".to_string(), vec![1.0, 2.0, 3.0, 4.0, 5.0]),
            ("neg".to_string(), vec![-1.1, -2.0, -2.9, -4.2, -5.0]),
            ("noise".to_string(), vec![0.3, -0.8, 0.5, 0.1, -0.2]),
            ("twin".to_string(), vec![2.0, 4.0, 6.0, 8.0, 10.0]),
        ];
        let m = CorrelationMatrix::from_columns(&cols);
        let strong = m.strong_pairs(0.9);
        assert!(strong
            .iter()
            .any(|(a, b, r)| a == "a" && b == "twin" && *r == 1.0));
        assert!(strong.iter().any(|(a, b, r)| a == "a" && b == "neg" && *r < -0.99));
        assert!(!strong.iter().any(|(a, b, _)| a == "noise" || b == "noise"));
        for w in strong.windows(2) {
            assert!(w[0].2.abs() >= w[1].2.abs());
        }
    }

    #[test]
    fn csv_round_is_stable() {
        let cols = vec![
            ("x".to_string(), vec![1.0, 2.0, 3.0]),
            ("y".to_string(), vec![1.0, 1.0, 1.0]),
        ];
        let m = CorrelationMatrix::from_columns(&cols);
        let csv = m.to_csv();
        assert_eq!(csv, m.to_csv());
        assert!(csv.starts_with("measure,x,y\n"));
        assert!(csv.contains("NA"));
    }
}
