//! Derivative-root decomposition of uniform discrete measures: the
//! self-energy of the uniform measure on m distinct real points is itself a
//! restricted Nevanlinna transform whose data (a_b, ρ_b) live on the roots of
//! the derivative of the canonical polynomial. The step can be iterated, each
//! round dropping one support point.

use crate::error::{Error, Result};
use crate::measure::{DiscreteMeasure, NevanlinnaData};
use crate::poly::{Polynomial, REAL_SNAP_TOL};
use crate::report::CorollaryReport;
use crate::transforms::{restricted_nevanlinna, self_energy};

const DISTINCTNESS_TOL: f64 = 1e-9;
// Internal sanity gate between the two α formulas. Looser than the
// verification suite's 1e-8 because evaluating P/P'' far from the support
// (legitimate for wide random inputs) costs a digit or two.
const ALPHA_AGREEMENT_TOL: f64 = 1e-7;

/// The outcome of one decomposition step on support points b_1 < ... < b_m:
/// ρ_b sits on the derivative roots ξ_j with weights α_j/(1+ξ_j²), and
/// a_b = b̄ - Σ α_j ξ_j/(1+ξ_j²).
#[derive(Clone, Debug)]
pub struct DecompositionResult {
    pub a_b: f64,
    pub rho_b: DiscreteMeasure,
    pub alphas: Vec<f64>,
    pub xis: Vec<f64>,
    pub mean: f64,
}

impl DecompositionResult {
    pub fn nevanlinna_data(&self) -> NevanlinnaData {
        NevanlinnaData::new(self.a_b, self.rho_b.clone())
    }
}

fn check_distinct(b: &[f64]) -> Result<Vec<f64>> {
    let mut sorted = b.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if sorted.len() > 1 {
        let min_gap = sorted
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        if min_gap <= DISTINCTNESS_TOL {
            return Err(Error::DistinctnessViolated(min_gap));
        }
    }
    Ok(sorted)
}

/// The monic polynomial ∏ (z - b_j). Rejects duplicate points (min gap
/// at most 1e-9) rather than perturbing them.
pub fn canonical_poly(b: &[f64]) -> Result<Polynomial> {
    if b.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    let sorted = check_distinct(b)?;
    let roots: Vec<_> = sorted
        .iter()
        .map(|&x| num_complex::Complex64::new(x, 0.0))
        .collect();
    Ok(Polynomial::from_roots(&roots))
}

/// Compute (a_b, ρ_b) for the uniform measure on distinct real points.
///
/// The weights come from α_k = -m P(ξ_k)/P''(ξ_k), cross-checked against the
/// reciprocal-sums form m [Σ 1/(ξ_k-b_j)² - (Σ 1/(ξ_k-b_j))²]^{-1}; the two
/// must agree to 1e-8 relative.
pub fn decompose(b: &[f64]) -> Result<DecompositionResult> {
    let sorted = check_distinct(b)?;
    let m = sorted.len();
    if m < 2 {
        return Err(Error::SupportExhausted);
    }

    let p = canonical_poly(&sorted)?;
    let p1 = p.derivative();
    let p2 = p1.derivative();
    let xis = p1.real_roots_snapped(REAL_SNAP_TOL)?;

    let mf = m as f64;
    let mut alphas = Vec::with_capacity(xis.len());
    for &xi in &xis {
        let z = num_complex::Complex64::new(xi, 0.0);
        let primary = -mf * (p.eval(z) / p2.eval(z)).re;

        let mut sum_inv = 0.0;
        let mut sum_inv_sq = 0.0;
        for &bj in &sorted {
            let d = xi - bj;
            sum_inv += 1.0 / d;
            sum_inv_sq += 1.0 / (d * d);
        }
        let cross = mf / (sum_inv_sq - sum_inv * sum_inv);

        let rel = (primary - cross).abs() / primary.abs().max(cross.abs());
        if rel > ALPHA_AGREEMENT_TOL {
            return Err(Error::CrossCheck(format!(
                "α at ξ = {xi}: P/P'' form {primary} vs reciprocal-sums form {cross} (rel {rel:e})"
            )));
        }
        alphas.push(primary);
    }

    let mean = sorted.iter().sum::<f64>() / mf;
    let rho_weights: Vec<f64> = xis
        .iter()
        .zip(&alphas)
        .map(|(&xi, &al)| al / (1.0 + xi * xi))
        .collect();
    let a_b = mean
        - xis
            .iter()
            .zip(&alphas)
            .map(|(&xi, &al)| al * xi / (1.0 + xi * xi))
            .sum::<f64>();
    let rho_b = DiscreteMeasure::new(xis.clone(), rho_weights)?;

    Ok(DecompositionResult {
        a_b,
        rho_b,
        alphas,
        xis,
        mean,
    })
}

/// Check the decomposition identity on a t-grid:
/// it - m/Σ 1/(it-b_j)  (the self-energy of the uniform measure) equals
/// a_b + ∫ (1+itx)/(it-x) ρ_b(dx).
pub fn verify_example_identity(b: &[f64], t_grid: &[f64]) -> Result<CorollaryReport> {
    let dec = decompose(b)?;
    let uniform = DiscreteMeasure::uniform_on(b)?;
    let data = dec.nevanlinna_data();

    let mut lhs = Vec::with_capacity(t_grid.len());
    let mut rhs = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        lhs.push(self_energy(&uniform, t)?);
        rhs.push(restricted_nevanlinna(&data, t)?);
    }
    CorollaryReport::new(t_grid.to_vec(), lhs, rhs)
}

/// Iterate the decomposition: each step feeds the ξ-roots of the previous
/// step as the support of a new uniform measure (the ρ_b weights themselves
/// are not propagated).
pub fn iterate_decomposition(b: &[f64], steps: usize) -> Result<Vec<DecompositionResult>> {
    let mut support = b.to_vec();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        if support.len() < 2 {
            return Err(Error::SupportExhausted);
        }
        let dec = decompose(&support)?;
        support = dec.xis.clone();
        out.push(dec);
    }
    Ok(out)
}
