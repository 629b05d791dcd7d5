//! Two-sided identity check reports shared by the inversion, decomposition
//! and convolution verifiers.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Left- and right-hand sides of an identity sampled on a real grid,
/// together with the maximum absolute discrepancy.
#[derive(Clone, Debug)]
pub struct CorollaryReport {
    pub grid: Vec<f64>,
    pub lhs: Vec<Complex64>,
    pub rhs: Vec<Complex64>,
    pub max_abs_err: f64,
}

impl CorollaryReport {
    pub fn new(grid: Vec<f64>, lhs: Vec<Complex64>, rhs: Vec<Complex64>) -> Result<Self> {
        if grid.len() != lhs.len() || grid.len() != rhs.len() {
            return Err(Error::LengthMismatch);
        }
        let max_abs_err = lhs
            .iter()
            .zip(&rhs)
            .map(|(l, r)| (l - r).norm())
            .fold(0.0, f64::max);
        Ok(CorollaryReport {
            grid,
            lhs,
            rhs,
            max_abs_err,
        })
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_abs_err <= tol
    }
}
