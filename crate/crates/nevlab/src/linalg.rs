//! Dense real least squares by Householder QR, sized for the small systems
//! produced by measure reconstruction (tens of rows, a handful of columns).

use crate::error::{Error, Result};

/// Row-major dense matrix.
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }
}

/// Minimize ‖A x − b‖₂ for a tall matrix A (rows ≥ cols).
///
/// Errors with `RankDeficient` when a diagonal entry of R falls below
/// `rank_tol` times the largest diagonal entry.
pub fn least_squares(mut a: Matrix, mut b: Vec<f64>, rank_tol: f64) -> Result<Vec<f64>> {
    let (m, n) = (a.rows, a.cols);
    if m < n {
        return Err(Error::RankDeficient);
    }

    // Column equilibration: without it the rank test compares R-diagonal
    // entries across columns of wildly different magnitude (e.g. successive
    // powers of the same variable) and cries wolf.
    let mut col_scale = vec![1.0; n];
    for j in 0..n {
        let mut norm = 0.0;
        for i in 0..m {
            norm += a.at(i, j) * a.at(i, j);
        }
        let norm = norm.sqrt();
        if norm > 0.0 {
            col_scale[j] = norm;
            for i in 0..m {
                let val = a.at(i, j) / norm;
                a.set(i, j, val);
            }
        }
    }

    // Householder triangularization, applying each reflector to b as we go.
    for k in 0..n {
        let mut norm = 0.0;
        for i in k..m {
            norm += a.at(i, k) * a.at(i, k);
        }
        let norm = norm.sqrt();
        if norm == 0.0 {
            return Err(Error::RankDeficient);
        }
        let alpha = if a.at(k, k) >= 0.0 { -norm } else { norm };
        let mut v = vec![0.0; m - k];
        v[0] = a.at(k, k) - alpha;
        for i in k + 1..m {
            v[i - k] = a.at(i, k);
        }
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        a.set(k, k, alpha);
        for i in k + 1..m {
            a.set(i, k, 0.0);
        }
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k + 1..n {
            let mut dot = 0.0;
            for i in k..m {
                dot += v[i - k] * a.at(i, j);
            }
            let scale = 2.0 * dot / vnorm2;
            for i in k..m {
                let val = a.at(i, j) - scale * v[i - k];
                a.set(i, j, val);
            }
        }
        let mut dot = 0.0;
        for i in k..m {
            dot += v[i - k] * b[i];
        }
        let scale = 2.0 * dot / vnorm2;
        for i in k..m {
            b[i] -= scale * v[i - k];
        }
    }

    let max_diag = (0..n).map(|k| a.at(k, k).abs()).fold(0.0, f64::max);
    if max_diag == 0.0 {
        return Err(Error::RankDeficient);
    }
    for k in 0..n {
        if a.at(k, k).abs() < rank_tol * max_diag {
            return Err(Error::RankDeficient);
        }
    }

    // Back substitution on R x = Q^T b.
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut acc = b[k];
        for j in k + 1..n {
            acc -= a.at(k, j) * x[j];
        }
        x[k] = acc / a.at(k, k);
    }
    for k in 0..n {
        x[k] /= col_scale[k];
    }
    Ok(x)
}
