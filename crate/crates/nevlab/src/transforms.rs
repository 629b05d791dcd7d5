//! The five imaginary-axis functionals of a discrete measure: restricted
//! Cauchy transform g(it), restricted Nevanlinna transform k(it),
//! characteristic function, self-energy e(it), and the reciprocal Cauchy
//! transform F. Plus the Laplace transform of the characteristic function in
//! closed form and by quadrature.

use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::{DiscreteMeasure, NevanlinnaData};
use crate::quad;

/// Which functional a CLI grid evaluation should produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformKind {
    Cauchy,
    Nevanlinna,
    CharFn,
    SelfEnergy,
    FReciprocal,
}

impl FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cauchy" => Ok(TransformKind::Cauchy),
            "nevanlinna" => Ok(TransformKind::Nevanlinna),
            "charfn" => Ok(TransformKind::CharFn),
            "selfenergy" => Ok(TransformKind::SelfEnergy),
            "freciprocal" => Ok(TransformKind::FReciprocal),
            other => Err(Error::Parse(format!("unknown transform '{other}'"))),
        }
    }
}

fn require_nonzero(t: f64) -> Result<()> {
    if t == 0.0 {
        return Err(Error::Domain("transform undefined at t = 0".into()));
    }
    Ok(())
}

/// Characteristic function: Σ w_j e^{i t b_j}. Defined for all real t.
pub fn char_fn(m: &DiscreteMeasure, t: f64) -> Complex64 {
    m.iter()
        .map(|(b, w)| w * Complex64::new(0.0, t * b).exp())
        .sum()
}

/// Restricted Cauchy transform g(it) = Σ w_j / (it - b_j), t ≠ 0.
pub fn restricted_cauchy(m: &DiscreteMeasure, t: f64) -> Result<Complex64> {
    require_nonzero(t)?;
    let it = Complex64::new(0.0, t);
    Ok(m.iter().map(|(b, w)| w / (it - b)).sum())
}

/// Restricted Nevanlinna transform k(it) = a + Σ w_j (1 + it b_j)/(it - b_j).
pub fn restricted_nevanlinna(d: &NevanlinnaData, t: f64) -> Result<Complex64> {
    require_nonzero(t)?;
    let it = Complex64::new(0.0, t);
    let sum: Complex64 = d
        .rho
        .iter()
        .map(|(b, w)| w * (Complex64::ONE + it * b) / (it - b))
        .sum();
    Ok(d.a + sum)
}

/// Restricted self-energy e(it) = it - 1/g(it) of a probability measure.
pub fn self_energy(m: &DiscreteMeasure, t: f64) -> Result<Complex64> {
    if !m.is_probability() {
        return Err(Error::NotAProbability(m.total_mass()));
    }
    let g = restricted_cauchy(m, t)?;
    Ok(Complex64::new(0.0, t) - g.inv())
}

/// Reciprocal Cauchy transform F(z) = 1/G(z) for z off the real axis.
pub fn f_transform(m: &DiscreteMeasure, z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 {
        return Err(Error::Domain("F is evaluated off the real axis".into()));
    }
    let g: Complex64 = m.iter().map(|(b, w)| w / (z - b)).sum();
    Ok(g.inv())
}

/// Derivative F'(z) = -G'(z)/G(z)^2, used by the Newton inversions.
pub fn f_transform_deriv(m: &DiscreteMeasure, z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 {
        return Err(Error::Domain("F is evaluated off the real axis".into()));
    }
    let g: Complex64 = m.iter().map(|(b, w)| w / (z - b)).sum();
    let gp: Complex64 = m.iter().map(|(b, w)| -w / ((z - b) * (z - b))).sum();
    Ok(-gp / (g * g))
}

/// How the Laplace transform of the characteristic function is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LaplaceMethod {
    /// Termwise closed form Σ w_j / (w - i b_j).
    Closed,
    /// Adaptive quadrature of ρ̂(r) e^{-wr} on a truncated interval.
    Quadrature,
}

/// Laplace transform of the characteristic function at w > 0.
///
/// Termwise, ∫_0^∞ e^{i b r} e^{-w r} dr = 1/(w - i b), so the closed form is
/// Σ w_j / (w - i b_j). The quadrature route truncates at R = max(50/w, 50),
/// where the dropped tail is bounded by mass · e^{-wR}/w.
pub fn laplace_charfn(m: &DiscreteMeasure, w: f64, method: LaplaceMethod) -> Result<Complex64> {
    if w <= 0.0 {
        return Err(Error::Domain(format!(
            "Laplace transform needs w > 0, got {w}"
        )));
    }
    match method {
        LaplaceMethod::Closed => Ok(m
            .iter()
            .map(|(b, wt)| wt / Complex64::new(w, -b))
            .sum()),
        LaplaceMethod::Quadrature => {
            let r_max = (50.0 / w).max(50.0);
            let (value, _err) = quad::integrate(
                |r| char_fn(m, r) * (-w * r).exp(),
                0.0,
                r_max,
                1e-9,
            );
            Ok(value)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bernoulli() -> DiscreteMeasure {
        DiscreteMeasure::bernoulli()
    }

    #[test]
    fn char_fn_closed_forms() {
        let d0 = DiscreteMeasure::dirac(0.0);
        assert_eq!(char_fn(&d0, 1.7), Complex64::ONE);

        for t in [0.3, 1.0, 4.0] {
            assert_abs_diff_eq!(
                (char_fn(&bernoulli(), t) - c(t.cos(), 0.0)).norm(),
                0.0,
                epsilon = 1e-15
            );
        }

        let db = DiscreteMeasure::dirac(2.5);
        let t = 0.7;
        assert_abs_diff_eq!(
            (char_fn(&db, t) - c(0.0, 2.5 * t).exp()).norm(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn cauchy_closed_forms() {
        let g = restricted_cauchy(&DiscreteMeasure::dirac(0.0), 1.0).unwrap();
        assert_abs_diff_eq!((g - c(0.0, -1.0)).norm(), 0.0, epsilon = 1e-15);

        let g = restricted_cauchy(&bernoulli(), 1.0).unwrap();
        assert_abs_diff_eq!((g - c(0.0, -0.5)).norm(), 0.0, epsilon = 1e-15);

        assert!(restricted_cauchy(&DiscreteMeasure::dirac(0.0), 0.0).is_err());
    }

    #[test]
    fn nevanlinna_closed_forms() {
        let d = NevanlinnaData::new(0.0, DiscreteMeasure::dirac(0.0));
        for t in [0.5, 1.0, 2.0] {
            let k = restricted_nevanlinna(&d, t).unwrap();
            assert_abs_diff_eq!((k - c(0.0, -1.0 / t)).norm(), 0.0, epsilon = 1e-14);
        }

        // k(i) = a - i·ρ(ℝ)
        let rho = DiscreteMeasure::new(vec![0.0], vec![3.0]).unwrap();
        let d = NevanlinnaData::new(2.0, rho);
        let k = restricted_nevanlinna(&d, 1.0).unwrap();
        assert_abs_diff_eq!((k - c(2.0, -3.0)).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn self_energy_closed_forms() {
        for t in [0.25, 1.0, 3.0] {
            let e = self_energy(&DiscreteMeasure::dirac(2.0), t).unwrap();
            assert_abs_diff_eq!((e - c(2.0, 0.0)).norm(), 0.0, epsilon = 1e-13);

            let e = self_energy(&bernoulli(), t).unwrap();
            assert_abs_diff_eq!((e - c(0.0, -1.0 / t)).norm(), 0.0, epsilon = 1e-13);

            let e = self_energy(&DiscreteMeasure::dirac(0.0), t).unwrap();
            assert_abs_diff_eq!(e.norm(), 0.0, epsilon = 1e-15);
        }

        let not_prob = DiscreteMeasure::new(vec![0.0], vec![2.0]).unwrap();
        assert!(matches!(
            self_energy(&not_prob, 1.0),
            Err(Error::NotAProbability(_))
        ));
    }

    #[test]
    fn f_transform_closed_forms() {
        let z = c(0.3, 1.2);
        let f = f_transform(&DiscreteMeasure::dirac(2.0), z).unwrap();
        assert_abs_diff_eq!((f - (z - 2.0)).norm(), 0.0, epsilon = 1e-14);

        let f = f_transform(&bernoulli(), c(0.0, 2.0)).unwrap();
        assert_abs_diff_eq!((f - c(0.0, 2.5)).norm(), 0.0, epsilon = 1e-14);

        assert!(f_transform(&bernoulli(), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn f_transform_nevanlinna_property() {
        // Im F(z) ≥ Im z in the upper half-plane.
        let m = DiscreteMeasure::new(vec![-2.0, 0.5, 3.0], vec![0.2, 0.5, 0.3]).unwrap();
        for &(re, im) in &[(0.0, 0.5), (1.0, 1.0), (-2.0, 0.1), (0.3, 4.0)] {
            let z = c(re, im);
            let f = f_transform(&m, z).unwrap();
            assert!(f.im >= z.im - 1e-12);
        }
    }

    #[test]
    fn laplace_closed_forms() {
        for w in [0.5, 1.0, 3.0] {
            let v = laplace_charfn(&DiscreteMeasure::dirac(0.0), w, LaplaceMethod::Closed).unwrap();
            assert_abs_diff_eq!((v - c(1.0 / w, 0.0)).norm(), 0.0, epsilon = 1e-15);

            let b = 2.0;
            let v = laplace_charfn(&DiscreteMeasure::dirac(b), w, LaplaceMethod::Closed).unwrap();
            assert_abs_diff_eq!((v - Complex64::ONE / c(w, -b)).norm(), 0.0, epsilon = 1e-15);

            let v = laplace_charfn(&bernoulli(), w, LaplaceMethod::Closed).unwrap();
            assert_abs_diff_eq!((v - c(w / (w * w + 1.0), 0.0)).norm(), 0.0, epsilon = 1e-15);
        }
        assert!(laplace_charfn(&bernoulli(), 0.0, LaplaceMethod::Closed).is_err());
        assert!(laplace_charfn(&bernoulli(), -1.0, LaplaceMethod::Quadrature).is_err());
    }

    #[test]
    fn laplace_quadrature_matches_closed() {
        let m = DiscreteMeasure::new(vec![-7.5, -1.0, 0.0, 4.2, 9.9], vec![0.3, 0.2, 0.1, 0.25, 0.15])
            .unwrap();
        for w in [0.1, 0.5, 1.0, 2.0, 10.0] {
            let closed = laplace_charfn(&m, w, LaplaceMethod::Closed).unwrap();
            let quadr = laplace_charfn(&m, w, LaplaceMethod::Quadrature).unwrap();
            assert!(
                (closed - quadr).norm() < 1e-6,
                "w={w}: closed={closed} quad={quadr}"
            );
        }
    }

    #[test]
    fn jurek_identity_by_quadrature() {
        // ∫_0^∞ ρ̂(ts) e^{-s} ds = (1/(it)) g_ρ(1/(it)), t ≠ 0,
        // and the t → 0 limit equals ρ(ℝ).
        let rho = DiscreteMeasure::new(vec![-2.0, 1.0, 3.0], vec![0.4, 0.9, 0.2]).unwrap();
        for t in [-1.5, 0.5, 1.0, 2.0] {
            let (lhs, _) = quad::integrate(
                |s| char_fn(&rho, t * s) * (-s).exp(),
                0.0,
                60.0,
                1e-10,
            );
            let inv_it = c(0.0, t).inv();
            let rhs = inv_it * rho.iter().map(|(b, w)| w / (inv_it - b)).sum::<Complex64>();
            assert!((lhs - rhs).norm() < 1e-6, "t={t}: lhs={lhs} rhs={rhs}");
        }

        let t = 1e-4;
        let inv_it = c(0.0, t).inv();
        let limit = inv_it * rho.iter().map(|(b, w)| w / (inv_it - b)).sum::<Complex64>();
        assert!((limit - c(rho.total_mass(), 0.0)).norm() < 1e-3);
    }

    #[test]
    fn char_fn_at_zero_is_total_mass() {
        let m = DiscreteMeasure::new(vec![-1.0, 2.0], vec![0.7, 1.1]).unwrap();
        assert_eq!(char_fn(&m, 0.0), c(m.total_mass(), 0.0));
    }

    proptest! {
        #[test]
        fn conjugate_symmetry_and_identities(
            atoms in proptest::collection::vec(-5.0f64..5.0, 1..=6),
            raw_weights in proptest::collection::vec(0.05f64..2.0, 6),
            a in -3.0f64..3.0,
            t in 0.1f64..8.0,
        ) {
            let weights = raw_weights[..atoms.len()].to_vec();
            let rho = DiscreteMeasure::new(atoms, weights).unwrap();
            let d = NevanlinnaData::new(a, rho.clone());

            // conjugate symmetry of all imaginary-axis functionals
            let g = restricted_cauchy(&rho, t).unwrap();
            let g_neg = restricted_cauchy(&rho, -t).unwrap();
            prop_assert!((g.conj() - g_neg).norm() <= 1e-14 * (1.0 + g.norm()));

            let k = restricted_nevanlinna(&d, t).unwrap();
            let k_neg = restricted_nevanlinna(&d, -t).unwrap();
            prop_assert!((k.conj() - k_neg).norm() <= 1e-13 * (1.0 + k.norm()));

            let f = char_fn(&rho, t);
            prop_assert!((f.conj() - char_fn(&rho, -t)).norm() <= 1e-14 * (1.0 + f.norm()));

            // |ρ̂| ≤ ρ(ℝ)
            prop_assert!(f.norm() <= rho.total_mass() + 1e-12);

            // k = a + (1 - t²) g - it ρ(ℝ)
            let mass = rho.total_mass();
            let rhs = a + (1.0 - t * t) * g - Complex64::new(0.0, t) * mass;
            prop_assert!((k - rhs).norm() <= 1e-12 * (1.0 + k.norm()));
        }

        #[test]
        fn self_energy_conjugate_symmetry(
            atoms in proptest::collection::vec(-5.0f64..5.0, 1..=5),
            raw_weights in proptest::collection::vec(0.05f64..1.0, 5),
            t in 0.1f64..6.0,
        ) {
            let mut weights = raw_weights[..atoms.len()].to_vec();
            let total: f64 = weights.iter().sum();
            for w in &mut weights { *w /= total; }
            let m = DiscreteMeasure::new(atoms, weights).unwrap();
            let e = self_energy(&m, t).unwrap();
            let e_neg = self_energy(&m, -t).unwrap();
            prop_assert!((e.conj() - e_neg).norm() <= 1e-12 * (1.0 + e.norm()));
        }
    }
}
