//! Recovery of (a, ρ) from imaginary-axis transform values: the constants
//! from k at i, the Laplace-of-Fourier inversion identity and its corollaries,
//! and a rational-fit reconstruction of a discrete measure from Cauchy
//! transform samples.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{least_squares, Matrix};
use crate::measure::{ComplexGrid, DiscreteMeasure, NevanlinnaData};
use crate::poly::Polynomial;
use crate::quad;
use crate::report::CorollaryReport;
use crate::transforms::{
    char_fn, laplace_charfn, restricted_cauchy, restricted_nevanlinna, self_energy,
    LaplaceMethod,
};

/// The constant a and total mass ρ(ℝ) read off from k(i) = a - i ρ(ℝ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecoveredConstants {
    pub a: f64,
    pub total_mass: f64,
}

/// Read (a, ρ(ℝ)) from the transform value at i: a = Re k(i),
/// ρ(ℝ) = -Im k(i). A non-positive mass means the value did not come from a
/// positive measure.
pub fn recover_constants(k_at_i: Complex64) -> Result<RecoveredConstants> {
    let total_mass = -k_at_i.im;
    if total_mass <= 0.0 {
        return Err(Error::NotAPositiveMeasure(k_at_i));
    }
    Ok(RecoveredConstants {
        a: k_at_i.re,
        total_mass,
    })
}

fn check_w_domain(w: f64) -> Result<()> {
    if w <= 0.0 {
        return Err(Error::Domain(format!("need w > 0, got {w}")));
    }
    if (w - 1.0).abs() <= 1e-3 {
        return Err(Error::Domain(format!(
            "w = {w} is inside the excluded neighborhood of the removable singularity at w = 1"
        )));
    }
    Ok(())
}

/// Right-hand side of the inversion identity:
/// (i k(-iw) - i Re k(i) - w Im k(i)) / (w² - 1), for w > 0, w away from 1.
pub fn theorem1_rhs(d: &NevanlinnaData, w: f64) -> Result<Complex64> {
    check_w_domain(w)?;
    let i = Complex64::I;
    let k_at_minus_iw = restricted_nevanlinna(d, -w)?;
    let k_at_i = restricted_nevanlinna(d, 1.0)?;
    Ok((i * k_at_minus_iw - i * k_at_i.re - w * k_at_i.im) / (w * w - 1.0))
}

/// Check 𝔏[ρ̂; w] (closed form) against `theorem1_rhs` on a grid.
pub fn verify_theorem1(d: &NevanlinnaData, w_grid: &[f64]) -> Result<CorollaryReport> {
    let mut lhs = Vec::with_capacity(w_grid.len());
    let mut rhs = Vec::with_capacity(w_grid.len());
    for &w in w_grid {
        lhs.push(laplace_charfn(&d.rho, w, LaplaceMethod::Closed)?);
        rhs.push(theorem1_rhs(d, w)?);
    }
    CorollaryReport::new(w_grid.to_vec(), lhs, rhs)
}

/// The hyperbolic-subtracted form, valid for w > 1:
/// ∫₀^∞ [ρ̂(r) - ½(i k(i) e^{-r} + conj(i k(i)) e^{r})] e^{-wr} dr
///   = i k(-iw) / (w² - 1).
/// The left side is computed by quadrature.
pub fn verify_corollary1(d: &NevanlinnaData, w_grid: &[f64]) -> Result<CorollaryReport> {
    let k_at_i = restricted_nevanlinna(d, 1.0)?;
    let iki = Complex64::I * k_at_i;
    let iki_conj = iki.conj();

    let mut lhs = Vec::with_capacity(w_grid.len());
    let mut rhs = Vec::with_capacity(w_grid.len());
    for &w in w_grid {
        if w <= 1.0 {
            return Err(Error::Domain(format!(
                "hyperbolic-subtracted identity needs w > 1, got {w}"
            )));
        }
        // the integrand decays like e^{(1-w)r}
        let r_max = (50.0 / (w - 1.0)).max(50.0);
        let (integral, _) = quad::integrate(
            |r| {
                let sub = 0.5 * (iki * (-r).exp() + iki_conj * r.exp());
                (char_fn(&d.rho, r) - sub) * (-w * r).exp()
            },
            0.0,
            r_max,
            1e-9,
        );
        lhs.push(integral);
        rhs.push(Complex64::I * restricted_nevanlinna(d, -w)? / (w * w - 1.0));
    }
    CorollaryReport::new(w_grid.to_vec(), lhs, rhs)
}

/// 𝔏[ρ̂; w] = conj(i g_ρ(iw)) for w > 0 (the Laplace side needs w > 0 even
/// though the right side makes sense for all w ≠ 0).
pub fn verify_corollary2(
    m: &DiscreteMeasure,
    w_grid: &[f64],
    method: LaplaceMethod,
) -> Result<CorollaryReport> {
    let mut lhs = Vec::with_capacity(w_grid.len());
    let mut rhs = Vec::with_capacity(w_grid.len());
    for &w in w_grid {
        lhs.push(laplace_charfn(m, w, method)?);
        rhs.push((Complex64::I * restricted_cauchy(m, w)?).conj());
    }
    CorollaryReport::new(w_grid.to_vec(), lhs, rhs)
}

/// The quantities z_μ, a and ρ(ℝ) computed from the Cauchy transform of a
/// probability measure at i, where e_μ(it) = k_{a,ρ}(it).
///
/// With z_μ = -g_μ(i) = c + i d we have e_μ(i) = i + 1/z_μ, hence
/// a = c/|z_μ|² and ρ(ℝ) = d/|z_μ|² - 1 (non-negative by Cauchy–Schwarz,
/// zero exactly for point masses). The values are cross-checked against the
/// direct self-energy computation at t = 1.
pub fn corollary3_quantities(m: &DiscreteMeasure) -> Result<(Complex64, f64, f64)> {
    if !m.is_probability() {
        return Err(Error::NotAProbability(m.total_mass()));
    }
    let z_mu = -restricted_cauchy(m, 1.0)?;
    let norm2 = z_mu.norm_sqr();
    let a = z_mu.re / norm2;
    let rho_mass = z_mu.im / norm2 - 1.0;

    // e_μ(i) = a - i ρ(ℝ) must agree with the direct route.
    let e = self_energy(m, 1.0)?;
    let err = (a - e.re).abs().max((rho_mass + e.im).abs());
    if err > 1e-9 {
        return Err(Error::CrossCheck(format!(
            "(a, ρ(ℝ)) from z_μ disagree with the self-energy at i by {err:e}"
        )));
    }
    Ok((z_mu, a, rho_mass))
}

/// The Laplace-transform identity completing the z_μ corollary, in the
/// sign convention fixed by `corollary3_quantities`:
///
/// 𝔏[|z_μ|² ρ̂ + (i/2)(z_μ e^x - conj(z_μ) e^{-x}); w]
///   = |z_μ|² / ((w² - 1) · i · g_μ(-iw)),   w > 1,
///
/// where ρ is the measure with e_μ = k_{a,ρ} (supplied by the caller, e.g.
/// from the derivative-root decomposition of a uniform measure). The ρ̂ term
/// is integrated numerically; the exponential terms use their closed-form
/// Laplace transforms.
pub fn verify_corollary3_laplace(
    m: &DiscreteMeasure,
    rho: &DiscreteMeasure,
    w_grid: &[f64],
) -> Result<CorollaryReport> {
    let z_mu = -restricted_cauchy(m, 1.0)?;
    let norm2 = z_mu.norm_sqr();

    let mut lhs = Vec::with_capacity(w_grid.len());
    let mut rhs = Vec::with_capacity(w_grid.len());
    for &w in w_grid {
        if w <= 1.0 {
            return Err(Error::Domain(format!("identity needs w > 1, got {w}")));
        }
        let r_max = (50.0 / (w - 1.0)).max(50.0);
        let (lap_rho, _) = quad::integrate(
            |r| char_fn(rho, r) * (-w * r).exp(),
            0.0,
            r_max,
            1e-9,
        );
        let exp_terms =
            Complex64::new(0.0, 0.5) * (z_mu / (w - 1.0) - z_mu.conj() / (w + 1.0));
        lhs.push(norm2 * lap_rho + exp_terms);

        let g = restricted_cauchy(m, -w)?;
        rhs.push(norm2 / ((w * w - 1.0) * Complex64::I * g));
    }
    CorollaryReport::new(w_grid.to_vec(), lhs, rhs)
}

const RECOVERY_RESIDUAL_TOL: f64 = 1e-6;

/// Reconstruct a discrete measure from samples of its restricted Cauchy
/// transform.
///
/// Writes g(it_j)·D(it_j) = N(it_j) for a monic real denominator D of degree
/// `degree_hint` and numerator N of degree `degree_hint - 1`, solves the real
/// least-squares system (two rows per complex sample), takes the roots of D
/// as atoms and fits the weights by a second least squares. Exact for
/// noiseless rational data.
pub fn recover_measure(samples: &ComplexGrid, degree_hint: usize) -> Result<DiscreteMeasure> {
    if degree_hint == 0 {
        return Err(Error::Domain("degree hint must be at least 1".into()));
    }
    let n_samples = samples.len();
    if n_samples < 2 * degree_hint {
        return Err(Error::Domain(format!(
            "need at least {} samples for degree hint {degree_hint}, got {n_samples}",
            2 * degree_hint
        )));
    }

    let h = degree_hint;
    // unknowns: d_0..d_{h-1} then n_0..n_{h-1}
    let mut a = Matrix::zeros(2 * n_samples, 2 * h);
    let mut b = vec![0.0; 2 * n_samples];
    for (j, (t, g)) in samples.iter().enumerate() {
        let z = Complex64::new(0.0, t);
        let mut zk = Complex64::ONE;
        for k in 0..h {
            let gd = g * zk;
            a.set(2 * j, k, gd.re);
            a.set(2 * j + 1, k, gd.im);
            a.set(2 * j, h + k, -zk.re);
            a.set(2 * j + 1, h + k, -zk.im);
            zk *= z;
        }
        // zk is now z^h, the monic leading term moved to the right side
        let rhs = -g * zk;
        b[2 * j] = rhs.re;
        b[2 * j + 1] = rhs.im;
    }
    let x = least_squares(a, b, 1e-10)?;

    let mut den_coeffs: Vec<f64> = x[..h].to_vec();
    den_coeffs.push(1.0);
    let den = Polynomial::from_real(&den_coeffs);
    let atoms = den.real_roots_snapped(1e-6)?;

    // weight fit: g(it_j) = Σ w_k / (it_j - b_k)
    let mut aw = Matrix::zeros(2 * n_samples, atoms.len());
    let mut bw = vec![0.0; 2 * n_samples];
    for (j, (t, g)) in samples.iter().enumerate() {
        let z = Complex64::new(0.0, t);
        for (k, &atom) in atoms.iter().enumerate() {
            let basis = (z - atom).inv();
            aw.set(2 * j, k, basis.re);
            aw.set(2 * j + 1, k, basis.im);
        }
        bw[2 * j] = g.re;
        bw[2 * j + 1] = g.im;
    }
    let weights = least_squares(aw, bw, 1e-10)?;
    let (atoms, weights) = refine_recovery(samples, atoms, weights)?;

    let mut kept_atoms = Vec::new();
    let mut kept_weights = Vec::new();
    for (&atom, &w) in atoms.iter().zip(&weights) {
        if w < -1e-8 {
            return Err(Error::NegativeWeight(w));
        }
        if w > 0.0 {
            kept_atoms.push(atom);
            kept_weights.push(w);
        }
    }
    if kept_atoms.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    let measure = DiscreteMeasure::new(kept_atoms, kept_weights)?;

    let mut residual = 0.0f64;
    for (t, g) in samples.iter() {
        let fitted = restricted_cauchy(&measure, t)?;
        residual = residual.max((fitted - g).norm());
    }
    if residual > RECOVERY_RESIDUAL_TOL {
        return Err(Error::ResidualTooLarge(residual));
    }
    Ok(measure)
}

/// Gauss-Newton polish of a recovered (atoms, weights) pair against the
/// samples. The linearized pencil solve above loses a few digits when atoms
/// cluster; a couple of nonlinear steps on the actual residual
/// Σ w_k/(it - b_k) - g(it) restores them. Falls back to the unrefined
/// values if a step fails or does not reduce the residual.
fn refine_recovery(
    samples: &ComplexGrid,
    atoms: Vec<f64>,
    weights: Vec<f64>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = atoms.len();
    let n_samples = samples.len();
    let residual_norm = |a: &[f64], w: &[f64]| -> f64 {
        samples
            .iter()
            .map(|(t, g)| {
                let z = Complex64::new(0.0, t);
                let fit: Complex64 = a
                    .iter()
                    .zip(w)
                    .map(|(&b, &wk)| wk / (z - b))
                    .sum();
                (fit - g).norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    };

    let mut best_atoms = atoms;
    let mut best_weights = weights;
    let mut best = residual_norm(&best_atoms, &best_weights);
    for _ in 0..8 {
        if best <= 1e-15 {
            break;
        }
        // unknowns: m atom shifts then m weight shifts
        let mut jac = Matrix::zeros(2 * n_samples, 2 * m);
        let mut rhs = vec![0.0; 2 * n_samples];
        for (j, (t, g)) in samples.iter().enumerate() {
            let z = Complex64::new(0.0, t);
            let mut fit = Complex64::ZERO;
            for (k, (&b, &w)) in best_atoms.iter().zip(&best_weights).enumerate() {
                let basis = (z - b).inv();
                fit += w * basis;
                let db = w * basis * basis;
                jac.set(2 * j, k, db.re);
                jac.set(2 * j + 1, k, db.im);
                jac.set(2 * j, m + k, basis.re);
                jac.set(2 * j + 1, m + k, basis.im);
            }
            let res = g - fit;
            rhs[2 * j] = res.re;
            rhs[2 * j + 1] = res.im;
        }
        let Ok(step) = least_squares(jac, rhs, 1e-14) else {
            break;
        };
        let trial_atoms: Vec<f64> = best_atoms.iter().zip(&step[..m]).map(|(b, s)| b + s).collect();
        let trial_weights: Vec<f64> =
            best_weights.iter().zip(&step[m..]).map(|(w, s)| w + s).collect();
        let trial = residual_norm(&trial_atoms, &trial_weights);
        if !trial.is_finite() || trial >= best {
            break;
        }
        best_atoms = trial_atoms;
        best_weights = trial_weights;
        best = trial;
    }
    Ok((best_atoms, best_weights))
}

/// Sample the restricted Cauchy transform of a measure on a t-grid.
pub fn sample_cauchy(m: &DiscreteMeasure, t_grid: &[f64]) -> Result<ComplexGrid> {
    let values = t_grid
        .iter()
        .map(|&t| restricted_cauchy(m, t))
        .collect::<Result<Vec<_>>>()?;
    ComplexGrid::new(t_grid.to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn recover_constants_examples() {
        let r = recover_constants(c(2.0, -3.0)).unwrap();
        assert_eq!(r.a, 2.0);
        assert_eq!(r.total_mass, 3.0);

        let r = recover_constants(c(0.0, -1.0)).unwrap();
        assert_eq!(r.a, 0.0);
        assert_eq!(r.total_mass, 1.0);

        assert!(matches!(
            recover_constants(c(1.0, 1.0)),
            Err(Error::NotAPositiveMeasure(_))
        ));
    }

    #[test]
    fn recover_constants_inverts_nevanlinna_at_i() {
        let rho = DiscreteMeasure::new(vec![-2.0, 0.5, 4.0], vec![0.3, 1.4, 0.8]).unwrap();
        let d = NevanlinnaData::new(-1.7, rho.clone());
        let k = restricted_nevanlinna(&d, 1.0).unwrap();
        let r = recover_constants(k).unwrap();
        assert_abs_diff_eq!(r.a, d.a, epsilon = 1e-12);
        assert_abs_diff_eq!(r.total_mass, rho.total_mass(), epsilon = 1e-12);
    }

    #[test]
    fn theorem1_rhs_for_point_mass_at_zero() {
        // a cancels: both (0, δ_0) and (5, δ_0) give 1/w
        for a in [0.0, 5.0] {
            let d = NevanlinnaData::new(a, DiscreteMeasure::dirac(0.0));
            for w in [0.5, 2.0, 3.0] {
                let v = theorem1_rhs(&d, w).unwrap();
                assert_abs_diff_eq!((v - c(1.0 / w, 0.0)).norm(), 0.0, epsilon = 1e-13);
            }
        }
        let d = NevanlinnaData::new(0.0, DiscreteMeasure::dirac(0.0));
        assert!(theorem1_rhs(&d, 1.0).is_err());
        assert!(theorem1_rhs(&d, -2.0).is_err());
    }

    #[test]
    fn theorem1_identity_on_examples() {
        let d = NevanlinnaData::new(0.0, DiscreteMeasure::dirac(0.0));
        let report = verify_theorem1(&d, &[0.5, 2.0, 3.0]).unwrap();
        assert!(report.max_abs_err <= 1e-12, "err={}", report.max_abs_err);

        let d = NevanlinnaData::new(1.0, DiscreteMeasure::bernoulli());
        let report = verify_theorem1(&d, &[0.5, 2.0, 5.0]).unwrap();
        assert!(report.max_abs_err <= 1e-10, "err={}", report.max_abs_err);

        let d = NevanlinnaData::new(0.0, DiscreteMeasure::dirac(3.0));
        let report = verify_theorem1(&d, &[2.0]).unwrap();
        let expected = Complex64::ONE / c(2.0, -3.0);
        assert!((report.lhs[0] - expected).norm() <= 1e-13);
        assert!((report.rhs[0] - expected).norm() <= 1e-10);
    }

    #[test]
    fn corollary1_hand_computed_case() {
        // (0, δ_0) at w = 2: ∫ (1 - cosh r) e^{-2r} dr = 1/2 - 2/3 = -1/6
        let d = NevanlinnaData::new(0.0, DiscreteMeasure::dirac(0.0));
        let report = verify_corollary1(&d, &[2.0]).unwrap();
        assert_abs_diff_eq!(report.lhs[0].re, -1.0 / 6.0, epsilon = 1e-7);
        assert_abs_diff_eq!(report.lhs[0].im, 0.0, epsilon = 1e-7);
        assert!(report.max_abs_err <= 1e-6, "err={}", report.max_abs_err);

        // Bernoulli at w = 2: L[cos] - L[cosh] = 2/5 - 2/3
        let d = NevanlinnaData::new(0.0, DiscreteMeasure::bernoulli());
        let report = verify_corollary1(&d, &[2.0]).unwrap();
        assert_abs_diff_eq!(report.lhs[0].re, 0.4 - 2.0 / 3.0, epsilon = 1e-7);
        assert!(report.max_abs_err <= 1e-6);

        assert!(verify_corollary1(&d, &[0.5]).is_err());
    }

    #[test]
    fn corollary2_closed_form_equality() {
        let cases = [
            DiscreteMeasure::dirac(0.0),
            DiscreteMeasure::dirac(2.0),
            DiscreteMeasure::bernoulli(),
        ];
        for m in &cases {
            let report =
                verify_corollary2(m, &[0.5, 1.0, 2.0, 7.0], LaplaceMethod::Closed).unwrap();
            assert!(report.max_abs_err <= 1e-13, "err={}", report.max_abs_err);
        }
        // Bernoulli at w = 2: both sides 2/5
        let report = verify_corollary2(&DiscreteMeasure::bernoulli(), &[2.0], LaplaceMethod::Closed)
            .unwrap();
        assert_abs_diff_eq!((report.lhs[0] - c(0.4, 0.0)).norm(), 0.0, epsilon = 1e-14);

        assert!(
            verify_corollary2(&DiscreteMeasure::bernoulli(), &[-1.0], LaplaceMethod::Closed)
                .is_err()
        );
    }

    #[test]
    fn corollary3_point_mass_and_bernoulli() {
        // δ_1: e ≡ 1, so a = 1 and ρ(ℝ) = 0
        let (z, a, mass) = corollary3_quantities(&DiscreteMeasure::dirac(1.0)).unwrap();
        assert_abs_diff_eq!((z - c(0.5, 0.5)).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(a, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mass, 0.0, epsilon = 1e-12);

        // δ_0: e ≡ 0
        let (z, a, mass) = corollary3_quantities(&DiscreteMeasure::dirac(0.0)).unwrap();
        assert_abs_diff_eq!((z - c(0.0, 1.0)).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(a, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mass, 0.0, epsilon = 1e-12);

        // Bernoulli: e(it) = -i/t, so a = 0 and ρ(ℝ) = 1
        let (z, a, mass) = corollary3_quantities(&DiscreteMeasure::bernoulli()).unwrap();
        assert_abs_diff_eq!((z - c(0.0, 0.5)).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(a, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn corollary3_laplace_identity_for_bernoulli() {
        // For Bernoulli, e_μ = k_{0, δ_0}: ρ = δ_0 is known in closed form.
        let report = verify_corollary3_laplace(
            &DiscreteMeasure::bernoulli(),
            &DiscreteMeasure::dirac(0.0),
            &[1.5, 2.0, 4.0],
        )
        .unwrap();
        assert!(report.max_abs_err <= 1e-6, "err={}", report.max_abs_err);
    }

    #[test]
    fn measure_recovery_round_trips() {
        let m = DiscreteMeasure::bernoulli();
        let grid = sample_cauchy(&m, &[0.5, 1.0, 1.5, 2.0]).unwrap();
        let rec = recover_measure(&grid, 2).unwrap();
        assert_abs_diff_eq!(rec.atoms()[0], -1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(rec.atoms()[1], 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(rec.weights()[0], 0.5, epsilon = 1e-8);
        assert_abs_diff_eq!(rec.weights()[1], 0.5, epsilon = 1e-8);

        let m = DiscreteMeasure::dirac(3.0);
        let grid = sample_cauchy(&m, &[0.5, 1.0, 2.0, 4.0]).unwrap();
        let rec = recover_measure(&grid, 1).unwrap();
        assert_abs_diff_eq!(rec.atoms()[0], 3.0, epsilon = 1e-8);
        assert_abs_diff_eq!(rec.weights()[0], 1.0, epsilon = 1e-8);
    }

    #[test]
    fn measure_recovery_detects_overparameterization() {
        let m = DiscreteMeasure::dirac(3.0);
        let grid = sample_cauchy(&m, &[0.5, 1.0, 1.5, 2.0, 3.0, 4.0]).unwrap();
        assert!(matches!(
            recover_measure(&grid, 3),
            Err(Error::RankDeficient)
        ));
    }

    #[test]
    fn measure_recovery_five_atoms() {
        let m = DiscreteMeasure::new(
            vec![-4.0, -1.5, 0.3, 2.0, 4.5],
            vec![0.2, 0.15, 0.3, 0.25, 0.1],
        )
        .unwrap();
        let t_grid: Vec<f64> = (1..=12).map(|k| 0.4 * k as f64).collect();
        let grid = sample_cauchy(&m, &t_grid).unwrap();
        let rec = recover_measure(&grid, 5).unwrap();
        assert_eq!(rec.len(), 5);
        for ((a, w), (b, v)) in rec.iter().zip(m.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-7);
            assert_abs_diff_eq!(w, v, epsilon = 1e-7);
        }
    }
}
