//! Numerical free convolution of compactly supported probability measures.
//!
//! The free sum (⊞) and free product (⊠) of two measures are computed by
//! evaluating Cauchy and T-transforms with trapezoidal quadrature, inverting
//! them through Cauchy integrals on circles, and reading the density of the
//! result off the power series of its Cauchy transform in Joukowski
//! coordinates.
//!
//! ```
//! use freeprob::{freeconv, measures, ContourConfig};
//!
//! let s = measures::make_semicircle(0.0, 2.0).unwrap();
//! let res = freeconv::additive_convolve(&s, &s, &ContourConfig::default()).unwrap();
//! assert!((res.support.b - 8f64.sqrt()).abs() < 1e-9);
//! ```

pub mod conformal;
pub mod contour;
pub mod error;
pub mod freeconv;
pub mod measures;
pub mod recovery;
pub mod spectra;
pub mod transforms;

pub use error::{Error, Result};
pub use freeconv::{ContourConfig, ConvolutionResult};
pub use measures::{MeasureSpec, RegularityClass, SupportInterval};

pub use num_complex::Complex64 as C64;
