//! Random-matrix models of the input measures and of their free sum and
//! product, used to validate computed densities.
//!
//! Free independence is realized by conjugating one spectrum with a
//! Haar-distributed orthogonal matrix.

use crate::error::{Error, Result};
use crate::freeconv::ConvolutionResult;
use crate::measures::{quantile, ClosedForm, MeasureSpec};
use crate::recovery::cumulative;
use faer::{Mat, Side};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSpectrum {
    pub n: usize,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub seed: u64,
}

impl EmpiricalSpectrum {
    pub fn from_values(mut eigenvalues: Vec<f64>, seed: u64) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        EmpiricalSpectrum { n: eigenvalues.len(), eigenvalues, seed }
    }

    pub fn mean(&self) -> f64 {
        self.eigenvalues.iter().sum::<f64>() / self.n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombineOp {
    Add,
    Mul,
}

fn gaussian(rows: usize, cols: usize, scale: f64, rng: &mut ChaCha8Rng) -> Mat<f64> {
    // fill column by column so the draw order is fixed
    let mut m = Mat::<f64>::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            let x: f64 = StandardNormal.sample(rng);
            m[(i, j)] = scale * x;
        }
    }
    m
}

fn sym_eigenvalues(m: &Mat<f64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::LinearAlgebra(format!("{e:?}")))
}

/// Haar orthogonal matrix: QR of a Gaussian matrix with the signs of
/// `diag(R)` moved into `Q`.
pub fn haar_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> Mat<f64> {
    let g = gaussian(n, n, 1.0, rng);
    let qr = g.qr();
    let r = qr.R();
    let mut q = qr.compute_Q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Eigenvalues of an `n × n` matrix whose limiting spectrum is `measure`.
///
/// Semicircles use a shifted and scaled GOE, Marchenko–Pastur uses a Wishart
/// matrix `B Bᵀ` with `B` of size `n × round(n/λ)`, and every other measure a
/// diagonal of quantiles at `k/(n+1)`.
pub fn sample_matrix_spectrum(measure: &MeasureSpec, n: usize, seed: u64) -> Result<EmpiricalSpectrum> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("matrix size {n} must be at least 2")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eig = match measure.model() {
        Some(&ClosedForm::Semicircle { center, radius }) => {
            let x = gaussian(n, n, 1.0, &mut rng);
            let s = 0.5 * radius / (2.0 * n as f64).sqrt();
            let m = Mat::<f64>::from_fn(n, n, |i, j| s * (x[(i, j)] + x[(j, i)]) + if i == j { center } else { 0.0 });
            sym_eigenvalues(&m)?
        }
        Some(&ClosedForm::MarchenkoPastur { lambda }) => {
            let cols = ((n as f64 / lambda).round() as usize).max(n);
            let b = gaussian(n, cols, 1.0 / (cols as f64).sqrt(), &mut rng);
            let w = &b * b.transpose();
            sym_eigenvalues(&w)?
        }
        _ => (1..=n).map(|k| quantile(measure, k as f64 / (n + 1) as f64)).collect(),
    };
    Ok(EmpiricalSpectrum::from_values(eig, seed))
}

/// Eigenvalues of `D_A + Q D_B Qᵀ` or `D_A^{1/2} Q D_B Qᵀ D_A^{1/2}`.
pub fn free_combine_spectra(a: &EmpiricalSpectrum, b: &EmpiricalSpectrum, op: CombineOp, seed: u64) -> Result<EmpiricalSpectrum> {
    if a.n != b.n || a.eigenvalues.len() != b.eigenvalues.len() {
        return Err(Error::SizeMismatch(a.n, b.n));
    }
    if op == CombineOp::Mul && (a.eigenvalues[0] <= 0.0 || b.eigenvalues[0] <= 0.0) {
        return Err(Error::NonpositiveSpectrum);
    }
    let n = a.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = haar_orthogonal(n, &mut rng);
    let qd = Mat::<f64>::from_fn(n, n, |i, j| q[(i, j)] * b.eigenvalues[j]);
    let mut m = &qd * q.transpose();
    match op {
        CombineOp::Add => {
            for i in 0..n {
                m[(i, i)] += a.eigenvalues[i];
            }
        }
        CombineOp::Mul => {
            let s: Vec<f64> = a.eigenvalues.iter().map(|x| x.sqrt()).collect();
            for j in 0..n {
                for i in 0..n {
                    m[(i, j)] *= s[i] * s[j];
                }
            }
        }
    }
    // symmetrize against rounding in the product
    let m = Mat::<f64>::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    Ok(EmpiricalSpectrum::from_values(sym_eigenvalues(&m)?, seed))
}

/// `sup |F_emp − F|` with `F` piecewise linear through `cdf_points`.
pub fn ks_distance_to_cdf(eigenvalues: &[f64], cdf_points: &[(f64, f64)]) -> f64 {
    let n = eigenvalues.len() as f64;
    let f = |x: f64| -> f64 {
        if cdf_points.is_empty() {
            return 0.0;
        }
        if x <= cdf_points[0].0 {
            return 0.0;
        }
        if x >= cdf_points[cdf_points.len() - 1].0 {
            return 1.0;
        }
        let k = cdf_points.partition_point(|p| p.0 <= x);
        let (x0, y0) = cdf_points[k - 1];
        let (x1, y1) = cdf_points[k];
        if x1 > x0 {
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        } else {
            y1
        }
    };
    let mut sorted = eigenvalues.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut d: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let fx = f(*x);
        d = d.max((fx - i as f64 / n).abs()).max(((i + 1) as f64 / n - fx).abs());
    }
    d
}

/// KS distance between a spectrum and the CDF of a computed density.
pub fn ks_distance(spectrum: &EmpiricalSpectrum, result: &ConvolutionResult) -> f64 {
    ks_distance_to_cdf(&spectrum.eigenvalues, &cumulative(&result.closed_grid()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::*;

    #[test]
    fn uniform_is_quantile_diagonal() {
        let u = make_uniform(-2.0, 2.0).unwrap();
        let s = sample_matrix_spectrum(&u, 50, 1).unwrap();
        for (k, x) in s.eigenvalues.iter().enumerate() {
            assert!((x - (-2.0 + 4.0 * (k + 1) as f64 / 51.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn haar_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = haar_orthogonal(40, &mut rng);
        let p = q.transpose() * &q;
        for i in 0..40 {
            for j in 0..40 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((p[(i, j)] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identities_of_combination() {
        let s = sample_matrix_spectrum(&make_semicircle(3.0, 2.0).unwrap(), 60, 5).unwrap();
        let zero = EmpiricalSpectrum::from_values(vec![0.0; 60], 0);
        let ones = EmpiricalSpectrum::from_values(vec![1.0; 60], 0);
        let add = free_combine_spectra(&s, &zero, CombineOp::Add, 9).unwrap();
        let mul = free_combine_spectra(&s, &ones, CombineOp::Mul, 9).unwrap();
        for k in 0..60 {
            assert!((add.eigenvalues[k] - s.eigenvalues[k]).abs() < 1e-10);
            assert!((mul.eigenvalues[k] - s.eigenvalues[k]).abs() < 1e-10);
        }
        assert!(free_combine_spectra(&s, &zero, CombineOp::Mul, 9).is_err());
        let short = EmpiricalSpectrum::from_values(vec![1.0; 10], 0);
        assert!(free_combine_spectra(&s, &short, CombineOp::Add, 9).is_err());
    }

    #[test]
    fn ks_of_exact_cdf_is_small() {
        let cdf_pts: Vec<(f64, f64)> = (0..=100).map(|k| (k as f64 / 100.0, k as f64 / 100.0)).collect();
        let eig: Vec<f64> = (1..=1000).map(|k| k as f64 / 1001.0).collect();
        assert!(ks_distance_to_cdf(&eig, &cdf_pts) < 2e-3);
    }
}
