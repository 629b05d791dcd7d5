//! Numerical calculus of imaginary-axis transforms of finitely supported
//! positive measures: restricted Cauchy and Nevanlinna transforms,
//! characteristic functions and their Laplace transforms, inversion back to
//! the measure, derivative-root decompositions, and boolean / free
//! convolutions evaluated through self-energy and subordination functions.
//!
//! All measure inputs are finite sums of point masses. Free convolution
//! outputs are never materialized as measures; they are evaluated pointwise
//! on the upper half-plane.

pub mod cli;
pub mod convolutions;
pub mod decomposition;
pub mod error;
pub mod inversion;
pub mod linalg;
pub mod measure;
pub mod measure_file;
pub mod poly;
pub mod quad;
pub mod report;
pub mod suite;
pub mod transforms;

pub use error::{Error, Result};
pub use measure::{ComplexGrid, DiscreteMeasure, NevanlinnaData};
pub use poly::{Polynomial, RationalFunction};
pub use report::CorollaryReport;
