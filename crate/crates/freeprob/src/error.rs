use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("pole at {0}")]
    Pole(String),
    #[error("point {0} lies on the cut [{1}, {2}]")]
    OnCut(String, f64, f64),
    #[error("point {0} is outside the contour or too close to it")]
    OutsideContour(String),
    #[error("point {0} is outside the unit disk")]
    OutsideDisk(String),
    #[error("derivative vanishes at the preimage of {0}")]
    DerivativeDegenerate(String),
    #[error("no admissible circle above radius {0}")]
    ContourTooSmall(f64),
    #[error("invalid support for a free product: [{0}, {1}] must be positive")]
    InvalidSupport(f64, f64),
    #[error("requested {m} coefficients from {len} samples")]
    Truncation { m: usize, len: usize },
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("spectrum must be positive for a free product")]
    NonpositiveSpectrum,
    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn fmt_c(z: num_complex::Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}
