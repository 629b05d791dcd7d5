//! Complex polynomials and unreduced rational functions.
//!
//! The root finder is an Aberth–Ehrlich simultaneous iteration: all roots are
//! refined together, which keeps cluster separation information that a
//! deflation scheme would destroy. Rational functions are never reduced;
//! removable singularities are detected only at the residue step, since a GCD
//! of floating-point polynomials is ill-conditioned.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default |Im| threshold below which a root that theory forces to be real
/// is snapped onto the real axis.
pub const REAL_SNAP_TOL: f64 = 1e-9;

const ABERTH_TOL: f64 = 1e-12;
const ABERTH_MAX_ITER: usize = 500;

/// Complex-coefficient polynomial stored in ascending degree order.
///
/// The coefficient list is non-empty; trailing zero coefficients are trimmed
/// on construction so the leading coefficient is nonzero unless the
/// polynomial is identically zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&Complex64::ZERO) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::ZERO);
        }
        Polynomial { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Polynomial {
            coeffs: vec![Complex64::ZERO],
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut p = Polynomial::constant(Complex64::ONE);
        for &r in roots {
            p = p.mul(&Polynomial::new(vec![-r, Complex64::ONE]));
        }
        p
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Complex64::ZERO
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Max-norm of the coefficient vector.
    pub fn coeff_max_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn has_real_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Upper bound on the evaluation magnitude at `z`: Σ |c_k| |z|^k.
    /// Used as the scale for "is this value effectively zero" tests.
    pub fn eval_scale(&self, z: Complex64) -> f64 {
        let r = z.norm();
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * r + c.norm();
        }
        acc
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial::zero();
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Synthetic division by (z - root), discarding the remainder. Only
    /// meaningful when `root` actually is a root (the remainder, |p(root)|,
    /// is then at rounding level).
    pub fn deflate(&self, root: Complex64) -> Polynomial {
        let n = self.coeffs.len();
        if n <= 1 {
            return Polynomial::zero();
        }
        let mut quotient = vec![Complex64::ZERO; n - 1];
        let mut carry = self.coeffs[n - 1];
        for k in (0..n - 1).rev() {
            quotient[k] = carry;
            carry = self.coeffs[k] + root * carry;
        }
        Polynomial::new(quotient)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Complex64::ZERO; n];
        for (k, slot) in out.iter_mut().enumerate() {
            if k < self.coeffs.len() {
                *slot += self.coeffs[k];
            }
            if k < other.coeffs.len() {
                *slot += other.coeffs[k];
            }
        }
        Polynomial::new(out)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Complex64::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn scale(&self, c: Complex64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// All `degree` roots, with multiplicity, by simultaneous Aberth–Ehrlich
    /// iteration. For real-coefficient input the returned set is closed under
    /// conjugation. Roots are sorted by (re, im) for determinism.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let n = self.degree();
        if n == 0 {
            return Err(Error::ZeroPolynomial);
        }
        if n == 1 {
            return Ok(vec![-self.coeffs[0] / self.coeffs[1]]);
        }

        let lead = self.coeffs[n].norm();
        let radius = 1.0 + self.coeff_max_norm() / lead;
        let deriv = self.derivative();

        // Equispaced starting circle; the small phase offset avoids starting
        // on a symmetry axis of real polynomials.
        let mut zs: Vec<Complex64> = (0..n)
            .map(|k| {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.39;
                radius * Complex64::new(theta.cos(), theta.sin())
            })
            .collect();

        let mut converged = false;
        let mut frozen = vec![false; n];
        for _ in 0..ABERTH_MAX_ITER {
            let mut max_step = 0.0f64;
            for k in 0..n {
                if frozen[k] {
                    continue;
                }
                let zk = zs[k];
                let pv = self.eval(zk);
                let dv = deriv.eval(zk);
                let newton = if dv == Complex64::ZERO {
                    // nudge off the stationary point
                    Complex64::new(1e-8, 1e-8)
                } else {
                    pv / dv
                };
                let mut repulsion = Complex64::ZERO;
                for (j, &zj) in zs.iter().enumerate() {
                    if j != k {
                        repulsion += (zk - zj).inv();
                    }
                }
                let denom = Complex64::ONE - newton * repulsion;
                let step = if denom == Complex64::ZERO {
                    newton
                } else {
                    newton / denom
                };
                zs[k] = zk - step;
                let rel_step = step.norm() / (1.0 + zs[k].norm());
                if rel_step <= ABERTH_TOL {
                    frozen[k] = true;
                }
                max_step = max_step.max(rel_step);
            }
            if max_step <= ABERTH_TOL {
                converged = true;
                break;
            }
        }
        // Clustered roots can stall in a sub-tolerance limit cycle; accept the
        // iterate anyway when every residual is at backward-error level.
        if !converged {
            let residual_ok = zs
                .iter()
                .all(|&z| self.eval(z).norm() <= 1e-11 * self.eval_scale(z).max(f64::MIN_POSITIVE));
            if !residual_ok {
                return Err(Error::RootsDidNotConverge(ABERTH_MAX_ITER));
            }
        }

        if self.has_real_coeffs() {
            pair_conjugates(&mut zs);
        }
        zs.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap()
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        Ok(zs)
    }

    /// Roots that theory guarantees to be real, snapped onto the axis.
    /// Errors with `RootNotReal` if any root has |Im| above `snap_tol`
    /// relative to its magnitude.
    pub fn real_roots_snapped(&self, snap_tol: f64) -> Result<Vec<f64>> {
        let roots = self.roots()?;
        let mut out = Vec::with_capacity(roots.len());
        for r in roots {
            if r.im.abs() > snap_tol * (1.0 + r.norm()) {
                return Err(Error::RootNotReal(r));
            }
            out.push(r.re);
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(out)
    }
}

/// Replace near-conjugate pairs by exact conjugates so the root set of a
/// real-coefficient polynomial is conjugate-closed bit for bit.
fn pair_conjugates(zs: &mut [Complex64]) {
    let n = zs.len();
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] || zs[i].im <= 0.0 {
            continue;
        }
        let target = zs[i].conj();
        let mut best: Option<(usize, f64)> = None;
        for (j, &zj) in zs.iter().enumerate() {
            if j == i || used[j] || zj.im >= 0.0 {
                continue;
            }
            let d = (zj - target).norm();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        if let Some((j, d)) = best {
            if d <= 1e-6 * (1.0 + zs[i].norm()) {
                let avg = 0.5 * (zs[i] + zs[j].conj());
                zs[i] = avg;
                zs[j] = avg.conj();
                used[i] = true;
                used[j] = true;
            }
        }
    }
}

/// Ratio of two polynomials, kept unreduced.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    pub num: Polynomial,
    pub den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(RationalFunction { num, den })
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let d = self.den.eval(z);
        if d.norm() <= 1e-14 * self.den.eval_scale(z) {
            return Err(Error::PoleEvaluation);
        }
        Ok(self.num.eval(z) / d)
    }

    /// Sum with no reduction: (n1 d2 + n2 d1) / (d1 d2).
    pub fn add(&self, other: &RationalFunction) -> RationalFunction {
        RationalFunction {
            num: self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            den: self.den.mul(&other.den),
        }
    }

    /// Residue at a simple pole: num(pole)/den'(pole).
    ///
    /// A pole where the numerator also vanishes (within tolerance of the
    /// evaluation scale) is treated as removable and gets residue 0.
    pub fn residue_simple_pole(&self, pole: Complex64) -> Result<Complex64> {
        // Near z = 0 the Horner scale degenerates to |c_0|; floor it with the
        // largest coefficient so tiny constant terms still register as roots.
        let scale_of = |p: &Polynomial| {
            p.eval_scale(pole)
                .max(p.coeff_max_norm())
                .max(f64::MIN_POSITIVE)
        };
        if self.den.eval(pole).norm() > 1e-8 * scale_of(&self.den) {
            return Err(Error::NotAPole(pole));
        }
        let dprime = self.den.derivative();
        let dval = dprime.eval(pole);
        if dval.norm() <= 1e-9 * scale_of(&dprime) {
            return Err(Error::MultiplePole(pole));
        }
        let nval = self.num.eval(pole);
        if nval.norm() < 1e-9 * scale_of(&self.num) {
            return Ok(Complex64::ZERO);
        }
        Ok(nval / dval)
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

    #[test]
    fn derivative_of_quadratic() {
        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]); // z^2 - 1
        assert_eq!(p.derivative(), Polynomial::from_real(&[0.0, 2.0]));
    }

    #[test]
    fn product_of_linear_factors() {
        let p = Polynomial::from_real(&[-1.0, 1.0]); // z - 1
        let q = Polynomial::from_real(&[1.0, 1.0]); // z + 1
        assert_eq!(p.mul(&q), Polynomial::from_real(&[-1.0, 0.0, 1.0]));
    }

    #[test]
    fn deflation_divides_out_a_root() {
        // (z - 2)(z + 1)(z - 0.5) deflated at 2 leaves (z + 1)(z - 0.5)
        let p = Polynomial::from_roots(&[c(2.0, 0.0), c(-1.0, 0.0), c(0.5, 0.0)]);
        let q = p.deflate(c(2.0, 0.0));
        let expected = Polynomial::from_roots(&[c(-1.0, 0.0), c(0.5, 0.0)]);
        for (a, b) in q.coeffs().iter().zip(expected.coeffs()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn derivative_of_cubic() {
        // (z^3 - 3z^2 + 2z)' = 3z^2 - 6z + 2
        let p = Polynomial::from_real(&[0.0, 2.0, -3.0, 1.0]);
        assert_eq!(p.derivative(), Polynomial::from_real(&[2.0, -6.0, 3.0]));
    }

    #[test]
    fn horner_evaluation() {
        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
        assert_eq!(p.eval(c(0.0, 1.0)), c(-2.0, 0.0));
        assert_eq!(p.eval(c(1.0, 0.0)), c(0.0, 0.0));
        let q = Polynomial::from_real(&[0.0, 2.0, -3.0, 1.0]);
        assert_eq!(q.eval(c(3.0, 0.0)), c(6.0, 0.0));
    }

    #[test]
    fn roots_of_quadratics() {
        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
        let r = p.real_roots_snapped(REAL_SNAP_TOL).unwrap();
        assert_abs_diff_eq!(r[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r[1], 1.0, epsilon = 1e-12);

        // 3z^2 - 6z + 2 -> 1 ± 1/sqrt(3)
        let p = Polynomial::from_real(&[2.0, -6.0, 3.0]);
        let r = p.real_roots_snapped(REAL_SNAP_TOL).unwrap();
        let s = 1.0 / 3.0f64.sqrt();
        assert_abs_diff_eq!(r[0], 1.0 - s, epsilon = 1e-10);
        assert_abs_diff_eq!(r[1], 1.0 + s, epsilon = 1e-10);
    }

    #[test]
    fn complex_conjugate_roots() {
        let p = Polynomial::from_real(&[1.0, 0.0, 1.0]); // z^2 + 1
        let r = p.roots().unwrap();
        assert_abs_diff_eq!((r[0] - c(0.0, -1.0)).norm(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!((r[1] - c(0.0, 1.0)).norm(), 0.0, epsilon = 1e-10);
        assert_eq!(r[0], r[1].conj());
    }

    #[test]
    fn zero_polynomial_has_no_roots() {
        assert!(matches!(
            Polynomial::zero().roots(),
            Err(Error::ZeroPolynomial)
        ));
    }

    #[test]
    fn residue_at_simple_pole() {
        let r = RationalFunction::new(
            Polynomial::from_real(&[1.0]),
            Polynomial::from_real(&[-1.0, 0.0, 1.0]),
        )
        .unwrap();
        let res = r.residue_simple_pole(c(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!((res - c(0.5, 0.0)).norm(), 0.0, epsilon = 1e-14);

        let s = RationalFunction::new(
            Polynomial::from_real(&[0.0, 1.0]),
            Polynomial::from_real(&[-2.0, 0.0, 1.0]),
        )
        .unwrap();
        let res = s.residue_simple_pole(c(2.0f64.sqrt(), 0.0)).unwrap();
        assert_abs_diff_eq!((res - c(0.5, 0.0)).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn residue_rejects_non_pole() {
        let r = RationalFunction::new(
            Polynomial::from_real(&[1.0]),
            Polynomial::from_real(&[-1.0, 0.0, 1.0]),
        )
        .unwrap();
        assert!(matches!(
            r.residue_simple_pole(c(2.0, 0.0)),
            Err(Error::NotAPole(_))
        ));
    }

    #[test]
    fn residue_agrees_with_limit_definition() {
        // z / (z^2 - 2) at sqrt(2): compare with (z - pole) r(z) near the pole.
        let r = RationalFunction::new(
            Polynomial::from_real(&[0.0, 1.0]),
            Polynomial::from_real(&[-2.0, 0.0, 1.0]),
        )
        .unwrap();
        let pole = c(2.0f64.sqrt(), 0.0);
        let res = r.residue_simple_pole(pole).unwrap();
        let z = pole + c(1e-6, 0.0);
        let approx_res = (z - pole) * r.eval(z).unwrap();
        assert!((res - approx_res).norm() / res.norm() < 1e-5);
    }

    #[test]
    fn rational_add_keeps_factors() {
        let inv_z = RationalFunction::new(
            Polynomial::from_real(&[1.0]),
            Polynomial::from_real(&[0.0, 1.0]),
        )
        .unwrap();
        let sum = inv_z.add(&inv_z);
        assert_eq!(sum.num, Polynomial::from_real(&[0.0, 2.0]));
        assert_eq!(sum.den, Polynomial::from_real(&[0.0, 0.0, 1.0]));
    }

    #[test]
    fn rational_eval_and_pole_error() {
        let r = RationalFunction::new(
            Polynomial::from_real(&[0.0, 1.0]),
            Polynomial::from_real(&[-1.0, 0.0, 1.0]),
        )
        .unwrap();
        let v = r.eval(c(0.0, 2.0)).unwrap();
        assert_abs_diff_eq!((v - c(0.0, 2.0) / c(-5.0, 0.0)).norm(), 0.0, epsilon = 1e-15);

        let inv_z = RationalFunction::new(
            Polynomial::from_real(&[1.0]),
            Polynomial::from_real(&[0.0, 1.0]),
        )
        .unwrap();
        assert!(matches!(inv_z.eval(c(0.0, 0.0)), Err(Error::PoleEvaluation)));
    }

    #[test]
    fn roots_interlace_for_distinct_real_atoms() {
        let atoms = [-3.0, -1.0, 0.5, 2.0, 4.0];
        let p = Polynomial::from_roots(
            &atoms.iter().map(|&a| c(a, 0.0)).collect::<Vec<_>>(),
        );
        let xs = p.derivative().real_roots_snapped(REAL_SNAP_TOL).unwrap();
        assert_eq!(xs.len(), atoms.len() - 1);
        for (k, &x) in xs.iter().enumerate() {
            assert!(atoms[k] < x && x < atoms[k + 1]);
        }
    }

    proptest! {
        #[test]
        fn root_coefficient_round_trip(
            roots in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..=12)
        ) {
            // keep roots well separated
            let zs: Vec<Complex64> = roots.iter().map(|&(re, im)| c(re, im)).collect();
            let mut ok = true;
            for i in 0..zs.len() {
                for j in 0..i {
                    if (zs[i] - zs[j]).norm() < 0.3 { ok = false; }
                }
            }
            prop_assume!(ok);

            let p = Polynomial::from_roots(&zs);
            let found = p.roots().unwrap();
            let rebuilt = Polynomial::from_roots(&found);
            let scale = p.coeff_max_norm();
            for (a, b) in p.coeffs().iter().zip(rebuilt.coeffs()) {
                prop_assert!((a - b).norm() <= 1e-8 * scale);
            }
            // residual bound from the contract
            for &r in &found {
                prop_assert!(p.eval(r).norm() <= 1e-10 * scale * (1.0 + r.norm()).powi(p.degree() as i32));
            }
        }
    }
}
