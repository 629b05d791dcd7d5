use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: a measure needs at least one atom")]
    EmptyMeasure,
    #[error("weight lists and atom lists must have equal nonzero length")]
    LengthMismatch,
    #[error("non-positive weight {0}")]
    NonPositiveWeight(f64),
    #[error("non-finite number in input")]
    NonFinite,
    #[error("zero polynomial has no roots")]
    ZeroPolynomial,
    #[error("root finding did not converge within {0} iterations")]
    RootsDidNotConverge(usize),
    #[error("root {0} expected real but |Im| exceeds the snapping threshold")]
    RootNotReal(Complex64),
    #[error("{0} is not a pole of the denominator")]
    NotAPole(Complex64),
    #[error("pole {0} is not simple")]
    MultiplePole(Complex64),
    #[error("evaluation at a pole of the rational function")]
    PoleEvaluation,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("k(i) = {0} does not correspond to a positive measure")]
    NotAPositiveMeasure(Complex64),
    #[error("not a probability measure (total mass {0})")]
    NotAProbability(f64),
    #[error("atoms are not distinct (min gap {0:e})")]
    DistinctnessViolated(f64),
    #[error("support exhausted: cannot decompose a single atom")]
    SupportExhausted,
    #[error("linear system is rank deficient")]
    RankDeficient,
    #[error("reconstruction residual {0:e} above tolerance")]
    ResidualTooLarge(f64),
    #[error("negative weight {0:e} in reconstructed measure")]
    NegativeWeight(f64),
    #[error("cross-check failed: {0}")]
    CrossCheck(String),
    #[error("fixed-point iteration did not converge (residual {0:e})")]
    FixedPointDiverged(f64),
    #[error("Newton iteration did not converge")]
    NewtonDiverged,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
