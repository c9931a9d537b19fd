//! Moran measures `mu = delta_{p_1^{-1} D_1} * delta_{(p_1 p_2)^{-1} D_2} * ...` on the line:
//! finite-level atoms, Fourier transforms and their exact zero sets, Hadamard
//! triples, explicit spectra, spectrality certificates, and density/tiling
//! checks for the absolutely continuous cases.
//!
//! ```
//! use moran_spectral::{parse_system, spectrum::{level_spectrum, q_sum_finite, Sigma}};
//!
//! let sys = parse_system("cycle: (2,{0,1}) (3,{0,1,2})").unwrap();
//! let lambda = level_spectrum(&sys, 2, &Sigma::positive()).unwrap();
//! assert_eq!(lambda.len(), 6);
//! let q = q_sum_finite(&sys, 2, lambda.points_f64(), 0.37);
//! assert!((q - 1.0).abs() < 1e-10);
//! ```

// `is_multiple_of` is newer than the supported toolchain.
#![allow(clippy::manual_is_multiple_of)]

pub mod certificates;
pub mod cli;
pub mod corpus;
pub mod density;
pub mod error;
pub mod hadamard;
pub mod measure;
pub mod spectrum;
pub mod system;

/// Exact arbitrary-precision rational.
pub type Rational = num_rational::BigRational;

pub use error::{Error, Result};
pub use measure::{atoms, fourier_level, fourier_tail, mask_eval, zero_set_contains, DiscreteMeasure};
pub use system::{classify_level, normalize_level, parse_system, DigitClass, DigitSet, Level, MoranSystem};
