//! Finite positive measures with finitely many atoms, and the small data
//! carriers shared by the transform and verification code.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Finite positive Borel measure with finitely many atoms, in canonical form:
/// atoms strictly increasing, weights positive, equal lengths.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    atoms: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Build a measure from parallel atom/weight lists. Atoms are sorted and
    /// exact duplicates merged by summing their weights.
    pub fn new(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        if atoms.len() != weights.len() {
            return Err(Error::LengthMismatch);
        }
        for &x in atoms.iter().chain(weights.iter()) {
            if !x.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        if let Some(&w) = weights.iter().find(|&&w| w <= 0.0) {
            return Err(Error::NonPositiveWeight(w));
        }
        let mut pairs: Vec<(f64, f64)> = atoms.into_iter().zip(weights).collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
        for (a, w) in pairs {
            match merged.last_mut() {
                Some((la, lw)) if *la == a => *lw += w,
                _ => merged.push((a, w)),
            }
        }
        let (atoms, weights) = merged.into_iter().unzip();
        Ok(DiscreteMeasure { atoms, weights })
    }

    /// Unit point mass at `b`.
    pub fn dirac(b: f64) -> Self {
        DiscreteMeasure {
            atoms: vec![b],
            weights: vec![1.0],
        }
    }

    /// Uniform probability measure on a set of distinct points.
    pub fn uniform_on(points: &[f64]) -> Result<Self> {
        let w = 1.0 / points.len() as f64;
        DiscreteMeasure::new(points.to_vec(), vec![w; points.len()])
    }

    /// The symmetric Bernoulli measure (δ_{-1} + δ_1)/2, a convenient test
    /// subject throughout the crate.
    pub fn bernoulli() -> Self {
        DiscreteMeasure {
            atoms: vec![-1.0, 1.0],
            weights: vec![0.5, 0.5],
        }
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        false // canonical measures always carry at least one atom
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.atoms.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn is_probability(&self) -> bool {
        (self.total_mass() - 1.0).abs() <= 1e-12
    }

    pub fn max_abs_atom(&self) -> f64 {
        self.atoms.iter().map(|a| a.abs()).fold(0.0, f64::max)
    }

    /// Translate every atom by `c`.
    pub fn shifted(&self, c: f64) -> Self {
        DiscreteMeasure {
            atoms: self.atoms.iter().map(|a| a + c).collect(),
            weights: self.weights.clone(),
        }
    }
}

/// The pair (a, ρ) parameterizing a restricted Nevanlinna transform.
#[derive(Clone, Debug, PartialEq)]
pub struct NevanlinnaData {
    pub a: f64,
    pub rho: DiscreteMeasure,
}

impl NevanlinnaData {
    pub fn new(a: f64, rho: DiscreteMeasure) -> Self {
        NevanlinnaData { a, rho }
    }
}

/// Samples of a transform on the punctured imaginary axis: real parameters t
/// (never 0) paired with complex values.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexGrid {
    points: Vec<f64>,
    values: Vec<Complex64>,
}

impl ComplexGrid {
    pub fn new(points: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::LengthMismatch);
        }
        if points.iter().any(|&t| t == 0.0) {
            return Err(Error::Domain("grid point t = 0 is not allowed".into()));
        }
        Ok(ComplexGrid { points, values })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.points.iter().copied().zip(self.values.iter().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_sorted_on_construction() {
        let m = DiscreteMeasure::new(vec![1.0, -1.0], vec![0.5, 0.5]).unwrap();
        assert_eq!(m.atoms(), &[-1.0, 1.0]);
        assert_eq!(m.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn duplicate_atoms_merged() {
        let m = DiscreteMeasure::new(vec![0.0, 0.0], vec![0.3, 0.7]).unwrap();
        assert_eq!(m.atoms(), &[0.0]);
        assert_eq!(m.weights(), &[1.0]);
        assert!(m.is_probability());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            DiscreteMeasure::new(vec![2.0], vec![-1.0]),
            Err(Error::NonPositiveWeight(_))
        ));
        assert!(matches!(
            DiscreteMeasure::new(vec![], vec![]),
            Err(Error::EmptyMeasure)
        ));
        assert!(matches!(
            DiscreteMeasure::new(vec![1.0], vec![f64::NAN]),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn grid_rejects_zero_point() {
        assert!(ComplexGrid::new(vec![1.0, 0.0], vec![Complex64::ZERO; 2]).is_err());
    }
}
