//! Boolean and free convolution of discrete probability measures.
//!
//! The boolean convolution is exact: self-energies add, so the convolution of
//! two discrete measures is again discrete and comes out of a rational
//! root/residue extraction. The free convolution is evaluated pointwise in
//! the upper half-plane through the subordination system
//! F_{μ1}(ω₁(z)) = F_{μ2}(ω₂(z)) = F_{μ1⊕μ2}(z), solved by Picard iteration;
//! it is never materialized as a measure.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::{ComplexGrid, DiscreteMeasure};
use crate::poly::{Polynomial, RationalFunction};
use crate::report::CorollaryReport;
use crate::transforms::{f_transform, f_transform_deriv};

const PICARD_TOL: f64 = 1e-13;
const PICARD_MAX_ITER: usize = 10_000;
const PICARD_ACCEPT: f64 = 1e-12;
const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 200;

/// The Cauchy transform of a discrete measure as an explicit rational
/// function: den = ∏ (z - b_j), num = Σ w_j ∏_{k≠j} (z - b_k).
pub fn cauchy_rational(m: &DiscreteMeasure) -> RationalFunction {
    let atoms: Vec<Complex64> = m.atoms().iter().map(|&b| Complex64::new(b, 0.0)).collect();
    let den = Polynomial::from_roots(&atoms);
    let mut num = Polynomial::zero();
    for (j, &w) in m.weights().iter().enumerate() {
        let others: Vec<Complex64> = atoms
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, &b)| b)
            .collect();
        num = num.add(&Polynomial::from_roots(&others).scale(w.into()));
    }
    RationalFunction::new(num, den).expect("denominator of a Cauchy transform is never zero")
}

/// F_μ and F_μ' on the real axis, off the zeros of g_μ.
fn f_and_deriv_real(m: &DiscreteMeasure, x: f64) -> (f64, f64) {
    let mut g = 0.0;
    let mut gp = 0.0;
    for (b, w) in m.iter() {
        let d = x - b;
        if d == 0.0 {
            // g has a simple pole at the atom, so F has a simple zero there
            // with F'(b) = 1/w
            return (0.0, 1.0 / w);
        }
        g += w / d;
        gp -= w / (d * d);
    }
    (1.0 / g, -gp / (g * g))
}

/// The zeros of g_μ on the real line: exactly one strictly between each pair
/// of adjacent atoms, found by bisection (g is strictly decreasing there,
/// from +∞ to -∞).
fn g_zeros(m: &DiscreteMeasure) -> Vec<f64> {
    let atoms = m.atoms();
    let mut zeros = Vec::with_capacity(atoms.len().saturating_sub(1));
    for pair in atoms.windows(2) {
        let (mut a, mut b) = (pair[0], pair[1]);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let g: f64 = m.iter().map(|(bj, w)| w / (mid - bj)).sum();
            if g > 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        zeros.push(0.5 * (a + b));
    }
    zeros
}

/// Root of a function that increases from -∞ to +∞ on the open interval
/// between two poles (either possibly infinite). `h` returns value and
/// derivative; safeguarded Newton inside a sign-change bracket.
fn increasing_root<H>(h: &H, lo: Option<f64>, hi: Option<f64>) -> Result<f64>
where
    H: Fn(f64) -> (f64, f64),
{
    let shrink_toward = |pole: f64, mut offset: f64, want_negative: bool| -> Result<f64> {
        // walk toward the pole until h has the sign it must have there
        for _ in 0..500 {
            let x = if want_negative { pole + offset } else { pole - offset };
            let v = h(x).0;
            if (want_negative && v < 0.0) || (!want_negative && v > 0.0) {
                return Ok(x);
            }
            offset /= 4.0;
        }
        Err(Error::RootsDidNotConverge(500))
    };
    let expand = |start: f64, direction: f64, want_negative: bool| -> Result<f64> {
        let mut step = 1.0;
        for _ in 0..200 {
            let x = start + direction * step;
            let v = h(x).0;
            if (want_negative && v < 0.0) || (!want_negative && v > 0.0) {
                return Ok(x);
            }
            step *= 2.0;
        }
        Err(Error::RootsDidNotConverge(200))
    };

    let (mut a, mut b) = match (lo, hi) {
        (Some(p), Some(q)) => (
            shrink_toward(p, (q - p) / 4.0, true)?,
            shrink_toward(q, (q - p) / 4.0, false)?,
        ),
        (Some(p), None) => (shrink_toward(p, 1.0, true)?, expand(p, 1.0, false)?),
        (None, Some(q)) => (expand(q, -1.0, true)?, shrink_toward(q, 1.0, false)?),
        (None, None) => (expand(0.0, -1.0, true)?, expand(0.0, 1.0, false)?),
    };

    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let (v, dv) = h(x);
        if v == 0.0 {
            return Ok(x);
        }
        if v > 0.0 {
            b = x;
        } else {
            a = x;
        }
        let newton = x - v / dv;
        let next = if newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if (next - x).abs() <= 1e-15 * (1.0 + x.abs()) {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// Measure whose Cauchy transform is 1/h: one atom per interval between
/// consecutive poles of h, with weight 1/h'(atom) (the residue of 1/h).
/// `h` must be a real Nevanlinna-type function increasing from -∞ to +∞ on
/// every interval.
fn secular_measure<H>(h: &H, poles: &[f64]) -> Result<DiscreteMeasure>
where
    H: Fn(f64) -> (f64, f64),
{
    let n = poles.len();
    let mut atoms = Vec::with_capacity(n + 1);
    let mut weights = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let lo = if k == 0 { None } else { Some(poles[k - 1]) };
        let hi = if k == n { None } else { Some(poles[k]) };
        let x = increasing_root(h, lo, hi)?;
        let w = 1.0 / h(x).1;
        if w <= 0.0 {
            return Err(Error::NegativeWeight(w));
        }
        atoms.push(x);
        weights.push(w);
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::CrossCheck(format!(
            "residues of a boolean convolution sum to {total}, expected 1"
        )));
    }
    DiscreteMeasure::new(atoms, weights)
}

/// Sorted union of the poles of two F-transforms, merging shared zeros
/// (e.g. all of them for μ ⊎ μ).
fn merged_poles(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Vec<f64> {
    let mut poles = g_zeros(mu);
    poles.extend(g_zeros(nu));
    poles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    poles.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + a.abs()));
    poles
}

fn require_probability(m: &DiscreteMeasure) -> Result<()> {
    if !m.is_probability() {
        return Err(Error::NotAProbability(m.total_mass()));
    }
    Ok(())
}

/// Boolean convolution μ ⊎ ν: the measure whose self-energy is
/// E_μ + E_ν. With G_μ = N_μ/D_μ this is the root/residue extraction of
/// G_γ = N_μ N_ν / (D_μ N_ν + D_ν N_μ - z N_μ N_ν).
pub fn boolean_convolve(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
    require_probability(mu)?;
    require_probability(nu)?;
    // F_γ = F_μ + F_ν - z is increasing from -∞ to +∞ between consecutive
    // zeros of g_μ and g_ν (F' ≥ 1 on the real line), so its real roots — the
    // atoms of γ — can be bracketed, and the residues of G_γ = 1/F_γ are
    // 1/F_γ' there.
    let poles = merged_poles(mu, nu);
    let h = |x: f64| {
        let (f1, d1) = f_and_deriv_real(mu, x);
        let (f2, d2) = f_and_deriv_real(nu, x);
        (f1 + f2 - x, d1 + d2 - 1.0)
    };
    secular_measure(&h, &poles)
}

/// Fractional boolean power μ^{⊎ s}, s > 0: the measure with self-energy
/// s·E_μ, i.e. G = N_μ / ((1-s) z N_μ + s D_μ).
pub fn boolean_power(mu: &DiscreteMeasure, s: f64) -> Result<DiscreteMeasure> {
    require_probability(mu)?;
    if s <= 0.0 {
        return Err(Error::Domain(format!("boolean power needs s > 0, got {s}")));
    }
    // F_γ = s·F_μ + (1-s)·z, same secular structure as the convolution
    let poles = g_zeros(mu);
    let h = |x: f64| {
        let (f, d) = f_and_deriv_real(mu, x);
        (s * f + (1.0 - s) * x, s * d + (1.0 - s))
    };
    secular_measure(&h, &poles)
}

/// Per-point solution of the subordination system at z in the upper
/// half-plane: F_{μ1}(ω₁) = F_{μ2}(ω₂) = f_value, z = ω₁ + ω₂ - f_value.
#[derive(Clone, Copy, Debug)]
pub struct SubordinationResult {
    pub z: Complex64,
    pub omega1: Complex64,
    pub omega2: Complex64,
    pub f_value: Complex64,
    pub iterations: usize,
    pub residual: f64,
}

/// Solve the subordination system for two F-transforms given as closures,
/// by Picard iteration on ω₁ ↦ z + h₂(z + h₁(ω₁)) with h_j = F_j - id.
pub fn subordinate_with<F1, F2>(f1: F1, f2: F2, z: Complex64) -> Result<SubordinationResult>
where
    F1: Fn(Complex64) -> Result<Complex64>,
    F2: Fn(Complex64) -> Result<Complex64>,
{
    if z.im <= 0.0 {
        return Err(Error::Domain(format!(
            "subordination is solved in the upper half-plane, got z = {z}"
        )));
    }
    let mut omega1 = z;
    let mut update = f64::INFINITY;
    let mut iterations = 0;
    for iter in 1..=PICARD_MAX_ITER {
        let omega2 = z + f1(omega1)? - omega1;
        let next = z + f2(omega2)? - omega2;
        update = (next - omega1).norm();
        omega1 = next;
        iterations = iter;
        if update <= PICARD_TOL {
            break;
        }
    }
    if update > PICARD_ACCEPT {
        return Err(Error::FixedPointDiverged(update));
    }
    let omega2 = z + f1(omega1)? - omega1;
    let f_value = f1(omega1)?;
    let residual = update.max((f_value - f2(omega2)?).norm());

    // subordination functions map back into the half-plane above Im z
    if omega1.im < z.im - 1e-9 || omega2.im < z.im - 1e-9 {
        return Err(Error::CrossCheck(format!(
            "subordination left the half-plane: z={z} ω₁={omega1} ω₂={omega2}"
        )));
    }
    Ok(SubordinationResult {
        z,
        omega1,
        omega2,
        f_value,
        iterations,
        residual,
    })
}

/// Subordination of two discrete probability measures at z, Im z > 0.
pub fn subordination(
    mu1: &DiscreteMeasure,
    mu2: &DiscreteMeasure,
    z: Complex64,
) -> Result<SubordinationResult> {
    require_probability(mu1)?;
    require_probability(mu2)?;
    subordinate_with(|w| f_transform(mu1, w), |w| f_transform(mu2, w), z)
}

/// F_{μ1⊕μ2}(it) on a grid of positive t (values extend to t < 0 through
/// conjugate symmetry, which is not materialized here).
pub fn free_f_grid(
    mu1: &DiscreteMeasure,
    mu2: &DiscreteMeasure,
    t_grid: &[f64],
) -> Result<ComplexGrid> {
    let mut values = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        if t <= 0.0 {
            return Err(Error::Domain(format!("grid point t = {t} must be positive")));
        }
        values.push(subordination(mu1, mu2, Complex64::new(0.0, t))?.f_value);
    }
    ComplexGrid::new(t_grid.to_vec(), values)
}

/// Newton-invert F_μ at `target`, trying a couple of start points.
fn newton_invert_f(m: &DiscreteMeasure, target: Complex64, z0: Complex64) -> Result<Complex64> {
    'starts: for start in [target, z0, z0 + target] {
        if start.im <= 0.0 {
            continue;
        }
        let mut w = start;
        for _ in 0..NEWTON_MAX_ITER {
            let phi = f_transform(m, w)? - target;
            if phi.norm() <= NEWTON_TOL * (1.0 + target.norm()) {
                return Ok(w);
            }
            let dphi = f_transform_deriv(m, w)?;
            if dphi.norm() == 0.0 {
                continue 'starts;
            }
            w -= phi / dphi;
            if !w.is_finite() || w.im <= 0.0 {
                continue 'starts;
            }
        }
    }
    Err(Error::NewtonDiverged)
}

/// V_μ(z) = F_μ^{-1}(z) - z, computed by Newton inversion of F_μ. Intended
/// for z = it with t above twice the largest |atom|, where the inverse is
/// guaranteed to exist.
pub fn v_transform(mu: &DiscreteMeasure, z: Complex64) -> Result<Complex64> {
    require_probability(mu)?;
    if z.im <= 0.0 {
        return Err(Error::Domain(format!(
            "V is evaluated on the upper imaginary axis, got z = {z}"
        )));
    }
    Ok(newton_invert_f(mu, z, z)? - z)
}

/// Check E_{ν1} + E_{ν2} = E_{μ1⊕μ2} pointwise at z = it:
/// (z - ω₁) + (z - ω₂) against z - F_{μ1⊕μ2}(z).
pub fn verify_proposition1(
    mu1: &DiscreteMeasure,
    mu2: &DiscreteMeasure,
    t_grid: &[f64],
) -> Result<CorollaryReport> {
    let mut lhs = Vec::with_capacity(t_grid.len());
    let mut rhs = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        if t <= 0.0 {
            return Err(Error::Domain(format!("grid point t = {t} must be positive")));
        }
        let z = Complex64::new(0.0, t);
        let s = subordination(mu1, mu2, z)?;
        lhs.push((z - s.omega1) + (z - s.omega2));
        rhs.push(z - s.f_value);
    }
    CorollaryReport::new(t_grid.to_vec(), lhs, rhs)
}

/// F_{μ1⊕...⊕μn}(z) by left-folding binary subordination.
pub fn fold_f_value(mus: &[DiscreteMeasure], z: Complex64) -> Result<Complex64> {
    match mus {
        [] => Err(Error::EmptyMeasure),
        [only] => f_transform(only, z),
        [rest @ .., last] => {
            let s = subordinate_with(
                |w| fold_f_value(rest, w),
                |w| f_transform(last, w),
                z,
            )?;
            Ok(s.f_value)
        }
    }
}

/// F_⊕ together with the subordination arguments ω_j, one per measure, all
/// satisfying F_{μ_j}(ω_j) = F_⊕(z). Recovering them from the nested binary
/// subordinations keeps every ω on the correct inverse branch; Newton
/// inversion of F_{μ_j} alone can land on another preimage.
pub fn fold_omegas(mus: &[DiscreteMeasure], z: Complex64) -> Result<(Complex64, Vec<Complex64>)> {
    match mus {
        [] => Err(Error::EmptyMeasure),
        [only] => Ok((f_transform(only, z)?, vec![z])),
        [rest @ .., last] => {
            let s = subordinate_with(
                |w| fold_f_value(rest, w),
                |w| f_transform(last, w),
                z,
            )?;
            let (_, mut omegas) = fold_omegas(rest, s.omega1)?;
            omegas.push(s.omega2);
            Ok((s.f_value, omegas))
        }
    }
}

/// The n-ary identity: with ω_j from the subordination system,
/// (1/(n-1)) Σ_j (z - ω_j) = z - F_⊕(z).
pub fn verify_corollary4(mus: &[DiscreteMeasure], t_grid: &[f64]) -> Result<CorollaryReport> {
    if mus.len() < 2 {
        return Err(Error::Domain("need at least two measures".into()));
    }
    for m in mus {
        require_probability(m)?;
    }
    let n = mus.len() as f64;
    let mut lhs = Vec::with_capacity(t_grid.len());
    let mut rhs = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        if t <= 0.0 {
            return Err(Error::Domain(format!("grid point t = {t} must be positive")));
        }
        let z = Complex64::new(0.0, t);
        let (f_value, omegas) = fold_omegas(mus, z)?;
        let sum: Complex64 = omegas.iter().map(|&omega| z - omega).sum();
        lhs.push(sum / (n - 1.0));
        rhs.push(z - f_value);
    }
    CorollaryReport::new(t_grid.to_vec(), lhs, rhs)
}

fn moment_integral(m: &DiscreteMeasure, t: f64) -> Complex64 {
    // ∫ 1/(1 - itx) dμ
    m.iter()
        .map(|(b, w)| w / Complex64::new(1.0, -t * b))
        .sum()
}

/// Remark identity (a): 1/∫(1-itx)^{-1}dμ - 1 + 1/∫(1-itx)^{-1}dν - 1
/// equals 1/∫(1-itx)^{-1}d(μ⊎ν) - 1, with μ⊎ν from `boolean_convolve`.
pub fn verify_remark2a(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    t_grid: &[f64],
) -> Result<CorollaryReport> {
    let conv = boolean_convolve(mu, nu)?;
    let mut lhs = Vec::with_capacity(t_grid.len());
    let mut rhs = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        lhs.push(moment_integral(mu, t).inv() - 1.0 + moment_integral(nu, t).inv() - 1.0);
        rhs.push(moment_integral(&conv, t).inv() - 1.0);
    }
    CorollaryReport::new(t_grid.to_vec(), lhs, rhs)
}

/// Remark identity (b): with g_{ν_j}(it) = 1/ω_j(it),
/// g_{ν_j}(it) ∫ 1/(1 - x g_{ν_j}(it)) dμ_j = g_{μ1⊕μ2}(it) = 1/F_⊕(it)
/// for j = 1, 2. Both sides of both chains are reported on a doubled grid.
pub fn verify_remark2b(
    mu1: &DiscreteMeasure,
    mu2: &DiscreteMeasure,
    t_grid: &[f64],
) -> Result<CorollaryReport> {
    let mut grid = Vec::with_capacity(2 * t_grid.len());
    let mut lhs = Vec::with_capacity(2 * t_grid.len());
    let mut rhs = Vec::with_capacity(2 * t_grid.len());
    for &t in t_grid {
        if t <= 0.0 {
            return Err(Error::Domain(format!("grid point t = {t} must be positive")));
        }
        let s = subordination(mu1, mu2, Complex64::new(0.0, t))?;
        let g_free = s.f_value.inv();
        for (m, omega) in [(mu1, s.omega1), (mu2, s.omega2)] {
            let g_nu = omega.inv();
            let integral: Complex64 = m
                .iter()
                .map(|(b, w)| w / (Complex64::ONE - b * g_nu))
                .sum();
            grid.push(t);
            lhs.push(g_nu * integral);
            rhs.push(g_free);
        }
    }
    CorollaryReport::new(grid, lhs, rhs)
}
