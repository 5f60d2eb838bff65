//! Minimal dense linear algebra used by the item-item and factor models:
//! row-major matrices, symmetric positive definite solves via Cholesky, and a
//! parallel inverse sized for post-filtering item catalogs (a few thousand).

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Dense row-major `f64` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n_cols));
        Mat {
            rows: n_rows,
            cols: n_cols,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// `self * x` for a column vector `x`.
    pub fn mat_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|r| dot(self.row(r), x)).collect()
    }

    /// `self^T * x` for a column vector `x`.
    pub fn mat_t_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (r, &xr) in x.iter().enumerate() {
            if xr != 0.0 {
                axpy(xr, self.row(r), &mut out);
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `A * B`. Parallel over rows of the result; every entry sums in a fixed
/// order, so repeated runs are bitwise identical.
pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    assert_eq!(a.cols, b.rows);
    let rows: Vec<Vec<f64>> = (0..a.rows)
        .into_par_iter()
        .map(|r| {
            let mut out = vec![0.0; b.cols];
            for (k, &ark) in a.row(r).iter().enumerate() {
                if ark != 0.0 {
                    axpy(ark, b.row(k), &mut out);
                }
            }
            out
        })
        .collect();
    Mat::from_rows(&rows)
}

/// `A * B^T`.
pub fn matmul_nt(a: &Mat, b: &Mat) -> Mat {
    assert_eq!(a.cols, b.cols);
    let rows: Vec<Vec<f64>> = (0..a.rows)
        .into_par_iter()
        .map(|r| (0..b.rows).map(|c| dot(a.row(r), b.row(c))).collect())
        .collect();
    Mat::from_rows(&rows)
}

/// `A^T * B`.
pub fn matmul_tn(a: &Mat, b: &Mat) -> Mat {
    assert_eq!(a.rows, b.rows);
    let rows: Vec<Vec<f64>> = (0..a.cols)
        .into_par_iter()
        .map(|r| {
            let mut out = vec![0.0; b.cols];
            for k in 0..a.rows {
                let v = a.get(k, r);
                if v != 0.0 {
                    axpy(v, b.row(k), &mut out);
                }
            }
            out
        })
        .collect();
    Mat::from_rows(&rows)
}

/// `y += alpha * x`.
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky(a: &Mat) -> Result<Mat> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut l = Mat::zeros(n, n);
    for j in 0..n {
        let mut diag = a.get(j, j);
        for k in 0..j {
            let v = l.get(j, k);
            diag -= v * v;
        }
        if diag <= 0.0 || !diag.is_finite() {
            return Err(Error::Singular(format!(
                "non-positive pivot {diag:.3e} at row {j}"
            )));
        }
        let diag = diag.sqrt();
        l.set(j, j, diag);
        // Column j below the diagonal, row-major traversal keeps this cache friendly
        // because row i of L is contiguous.
        for i in j + 1..n {
            let mut v = a.get(i, j);
            let (ri, rj) = (i * n, j * n);
            for k in 0..j {
                v -= l.data[ri + k] * l.data[rj + k];
            }
            l.data[ri + j] = v / diag;
        }
    }
    Ok(l)
}

/// Solves `A x = b` given the Cholesky factor `L` of `A` (`A = L L^T`).
pub fn cholesky_solve(l: &Mat, b: &[f64]) -> Vec<f64> {
    let n = l.rows;
    assert_eq!(b.len(), n);
    let mut y = b.to_vec();
    for i in 0..n {
        let row = l.row(i);
        let mut v = y[i];
        for k in 0..i {
            v -= row[k] * y[k];
        }
        y[i] = v / row[i];
    }
    for i in (0..n).rev() {
        let mut v = y[i];
        for (k, &yk) in y.iter().enumerate().skip(i + 1) {
            v -= l.get(k, i) * yk;
        }
        y[i] = v / l.get(i, i);
    }
    y
}

/// Full inverse from a Cholesky factor, one solve per unit vector in parallel.
pub fn cholesky_inverse(l: &Mat) -> Mat {
    let n = l.rows;
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            // The inverse is symmetric, so the solve for e_j is also row j.
            cholesky_solve(l, &e)
        })
        .collect();
    Mat::from_rows(&rows)
}

/// Solves the symmetric positive definite system `A x = b`.
pub fn solve_spd(a: &Mat, b: &[f64]) -> Result<Vec<f64>> {
    let l = cholesky(a)?;
    Ok(cholesky_solve(&l, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(n: usize, seed: u64) -> Mat {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b = Mat::zeros(n, n);
        for v in b.data_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        // B^T B + n I is comfortably positive definite.
        let mut a = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += b.get(k, i) * b.get(k, j);
                }
                a.set(i, j, s + if i == j { n as f64 } else { 0.0 });
            }
        }
        a
    }

    fn naive_product(a: &Mat, b: &Mat) -> Mat {
        let mut out = Mat::zeros(a.n_rows(), b.n_cols());
        for r in 0..a.n_rows() {
            for c in 0..b.n_cols() {
                let mut s = 0.0;
                for k in 0..a.n_cols() {
                    s += a.get(r, k) * b.get(k, c);
                }
                out.set(r, c, s);
            }
        }
        out
    }

    fn transpose(a: &Mat) -> Mat {
        let mut t = Mat::zeros(a.n_cols(), a.n_rows());
        for r in 0..a.n_rows() {
            for c in 0..a.n_cols() {
                t.set(c, r, a.get(r, c));
            }
        }
        t
    }

    #[test]
    fn matmul_variants_agree_with_naive_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..10 {
            let (m, k, n) = (
                rng.gen_range(1..7),
                rng.gen_range(1..7),
                rng.gen_range(1..7),
            );
            let mut a = Mat::zeros(m, k);
            let mut b = Mat::zeros(k, n);
            for v in a.data_mut() {
                *v = rng.gen_range(-2.0..2.0);
            }
            for v in b.data_mut() {
                *v = rng.gen_range(-2.0..2.0);
            }
            let want = naive_product(&a, &b);
            assert_eq!(matmul(&a, &b), want);
            assert_eq!(matmul_nt(&a, &transpose(&b)), want);
            assert_eq!(matmul_tn(&transpose(&a), &b), want);
        }
    }

    #[test]
    fn cholesky_solve_matches_hand_2x2() {
        // A = [[2,1],[1,2]], b = [1,0] -> x = [2/3, -1/3]
        let a = Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let x = solve_spd(&a, &[1.0, 0.0]).unwrap();
        assert_relative_eq!(x[0], 2.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(x[1], -1.0 / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn inverse_residual_is_tiny() {
        for seed in 0..5 {
            let n = 24;
            let a = random_spd(n, seed);
            let l = cholesky(&a).unwrap();
            let inv = cholesky_inverse(&l);
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for k in 0..n {
                        s += a.get(i, k) * inv.get(k, j);
                    }
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((s - expect).abs() < 1e-10, "residual {} at ({i},{j})", s - expect);
                }
            }
        }
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let a = Mat::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(cholesky(&a).is_err());
    }

    #[test]
    fn mat_t_vec_matches_transpose_product() {
        let m = Mat::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]);
        let y = m.mat_t_vec(&[1.0, 0.5, -1.0]);
        assert_relative_eq!(y[0], 1.0 + 1.5 - 5.0);
        assert_relative_eq!(y[1], 2.0 + 2.0 - 6.0);
    }
}
