//! Power-series coefficients from circle samples and density reconstruction
//! by Stieltjes inversion on the unit circle.
//!
//! If `𝒢(v) = Σ_{n≥1} g_n vⁿ` then on the boundary, for `θ ∈ (0, π)`,
//! `f(J(e^{iθ})) = (1/π) Im Σ g_n e^{inθ}`.

use crate::error::{Error, Result};
use crate::measures::SupportInterval;
use crate::C64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// Coefficients of `𝒢`; the boundary values give `f`.
    Additive,
    /// Coefficients of `𝒯`; the boundary values give `x·f(x)`.
    Multiplicative,
}

/// `g_1..g_m` together with the radius they were read from.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    pub r_c: f64,
    pub m: usize,
    pub g: Vec<C64>,
    pub warnings: Vec<String>,
}

impl CoefficientVector {
    /// `Σ g_n vⁿ`.
    pub fn eval(&self, v: C64) -> C64 {
        self.g.iter().rev().fold(C64::new(0.0, 0.0), |acc, g| (acc + g) * v)
    }
}

/// Reads `g_n` off `values_k ≈ 𝒢(r_C ξ_M^k)`:
/// `g_n = (1/M) Σ_k values_k ξ_M^{−kn} / r_Cⁿ`.
pub fn coefficients_from_circle(values: &[C64], r_c: f64, m: usize) -> Result<CoefficientVector> {
    let len = values.len();
    if m >= len {
        return Err(Error::Truncation { m, len });
    }
    if !(r_c > 0.0 && r_c < 1.0) {
        return Err(Error::InvalidParameter(format!("r_C = {r_c} must lie in (0,1)")));
    }
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let mut warnings = Vec::new();
    let mut g = Vec::with_capacity(m);
    let mut scale = 1.0 / len as f64;
    let mut noisy = None;
    for (n, v) in buf.iter().enumerate().skip(1).take(m) {
        scale /= r_c;
        if noisy.is_none() && scale * (len as f64) > 1e15 {
            noisy = Some(n);
        }
        g.push(v * scale);
    }
    if let Some(n) = noisy {
        warnings.push(format!("r_C^{n} < 1e-15: coefficients from index {n} on are dominated by noise"));
    }
    Ok(CoefficientVector { r_c, m, g, warnings })
}

/// Density samples on the interior of the support, ascending in `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub points: Vec<(f64, f64)>,
    /// Largest negative value replaced by zero.
    pub max_clamp: f64,
}

/// Evaluates the truncated series at `θ_k = 2πk/P` with `0 < θ_k < π`,
/// `P = max(grid_size, m+1)`, through a zero-padded inverse DFT.
pub fn density_from_coefficients(coeffs: &CoefficientVector, support: SupportInterval, grid_size: usize, kind: SeriesKind) -> Result<DensityGrid> {
    if kind == SeriesKind::Multiplicative && support.a <= 0.0 {
        return Err(Error::InvalidSupport(support.a, support.b));
    }
    let p = grid_size.max(coeffs.g.len() + 1);
    let mut buf = vec![C64::new(0.0, 0.0); p];
    for (n, g) in coeffs.g.iter().enumerate() {
        buf[n + 1] = *g;
    }
    FftPlanner::new().plan_fft_inverse(p).process(&mut buf);
    let (c, h) = (support.center(), support.half_width());
    let mut points = Vec::new();
    let mut max_clamp: f64 = 0.0;
    // k with 0 < 2πk/P < π, walked backwards so that x ascends
    for k in (1..p.div_ceil(2)).rev() {
        let theta = 2.0 * PI * k as f64 / p as f64;
        let x = c + h * theta.cos();
        let mut f = buf[k].im / PI;
        if kind == SeriesKind::Multiplicative {
            f /= x;
        }
        if f < 0.0 {
            max_clamp = max_clamp.max(-f);
            f = 0.0;
        }
        points.push((x, f));
    }
    Ok(DensityGrid { points, max_clamp })
}

/// Grid with the support endpoints appended as zeros.
pub fn with_endpoints(points: &[(f64, f64)], support: SupportInterval) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(points.len() + 2);
    out.push((support.a, 0.0));
    out.extend_from_slice(points);
    out.push((support.b, 0.0));
    out
}

/// Trapezoid in `x` over a sorted grid.
pub fn trapezoid_mass(points: &[(f64, f64)]) -> f64 {
    points.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum()
}

/// Cumulative trapezoid, normalized to end at 1.
pub fn cumulative(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(points.len());
    out.push((points[0].0, 0.0));
    for w in points.windows(2) {
        acc += 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1);
        out.push((w[1].0, acc));
    }
    if acc > 0.0 {
        for p in &mut out {
            p.1 /= acc;
        }
    }
    out
}

/// `∫ xᵏ f(x) dx` straight from the coefficients,
/// `(h/π) ∫_0^π xᵏ Im(Σ g_n e^{inθ}) sin θ dθ` with `x = c + h cos θ`
/// (one power of `x` fewer for the multiplicative kind).
///
/// The integrand is a smooth even periodic function of θ, so the trapezoidal
/// rule is spectrally accurate.
pub fn moment_from_coefficients(coeffs: &CoefficientVector, support: SupportInterval, k: u32, kind: SeriesKind) -> f64 {
    let (c, h) = (support.center(), support.half_width());
    let q = 2048.max(8 * (coeffs.g.len() + k as usize));
    let mut acc = 0.0;
    for j in 1..q {
        let theta = PI * j as f64 / q as f64;
        let x = c + h * theta.cos();
        let e = C64::from_polar(1.0, theta);
        let im = coeffs.eval(e).im;
        let pw = match kind {
            SeriesKind::Additive => x.powi(k as i32),
            SeriesKind::Multiplicative => x.powi(k as i32 - 1),
        };
        acc += pw * im * theta.sin();
    }
    h / PI * acc * PI / q as f64
}
