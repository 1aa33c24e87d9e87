//! Perfect and determined directions of rational weight functions on the
//! affine plane F_p², computed exactly.
//!
//! - [`plane`]: points, directions, lines and affine maps of F_p².
//! - [`weights`]: sparse rational weight functions, line sums, JSON I/O and
//!   rationalization of decimal input.
//! - [`spectral`]: exact Fourier zero tests, annihilators, the uncertainty
//!   inequality and the spectral support bound.
//! - [`analysis`]: perfect/determined directions, the `N ≤ |S|/2` check, the
//!   Rédei–Megyesi count and degenerate-case classification.
//! - [`constructions`]: extremal examples with their predicted counts.
//! - [`search`]: symmetry-reduced exhaustive and randomized search.

pub mod analysis;
pub mod constructions;
pub mod error;
pub mod plane;
pub mod search;
pub mod spectral;
pub mod weights;

pub use error::{Error, Result};
pub use plane::{AffineMap, Direction, Line, Point, PrimeModulus};
pub use weights::{transform_weight, Rational, WeightFunction};
