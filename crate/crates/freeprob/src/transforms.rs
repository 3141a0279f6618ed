//! Pointwise Cauchy and T-transforms and their derivatives.
//!
//! Closed forms are used when the measure carries them; otherwise the
//! integral over `[a,b]` is rewritten with `x = c + h cos θ` and discretized
//! with the trapezoidal rule on `θ ∈ [0, π]`:
//!
//! `G(z) ≈ (π/N) Σ_{k=1}^{N−1} h sin θ_k f(x_k) / (z − x_k)`, `θ_k = πk/N`.
//!
//! The `k = 0` and `k = N` terms carry `sin θ = 0` and drop out. The same
//! nodes serve `G′`, `T` and `T′`. For square-root densities the error
//! decays like `ρ^{−2N}` with `ρ = |J⁺(z)|`.

use crate::conformal::{j_unchecked, on_cut};
use crate::error::{fmt_c, Error, Result};
use crate::measures::{MeasureSpec, RegularityClass};
use crate::C64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    Cauchy,
    CauchyDeriv,
    TTransform,
    TTransformDeriv,
}

/// Precomputed nodes `x_k` and weights `(π/N) h sin θ_k f(x_k)`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub n: usize,
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(measure: &MeasureSpec, n: usize) -> Self {
        let s = measure.support;
        let (c, h) = (s.center(), s.half_width());
        let (mut x, mut w) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for k in 1..n {
            let (sn, cs) = (PI * k as f64 / n as f64).sin_cos();
            let xk = c + h * cs;
            x.push(xk);
            w.push(PI / n as f64 * h * sn * measure.density(xk));
        }
        QuadratureRule { n, x, w }
    }

    pub fn eval(&self, kind: TransformKind, z: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        match kind {
            TransformKind::Cauchy => {
                for (x, w) in self.x.iter().zip(&self.w) {
                    acc += *w / (z - x);
                }
            }
            TransformKind::CauchyDeriv => {
                for (x, w) in self.x.iter().zip(&self.w) {
                    let d = z - x;
                    acc -= *w / (d * d);
                }
            }
            TransformKind::TTransform => {
                for (x, w) in self.x.iter().zip(&self.w) {
                    acc += *w * x / (z - x);
                }
            }
            TransformKind::TTransformDeriv => {
                for (x, w) in self.x.iter().zip(&self.w) {
                    let d = z - x;
                    acc -= *w * x / (d * d);
                }
            }
        }
        acc
    }
}

/// Quadrature points used when the caller does not pick them.
pub fn default_points(measure: &MeasureSpec) -> usize {
    measure.regularity.default_quadrature_points()
}

/// Closed-form value if the measure has one for this kind.
pub fn analytic(measure: &MeasureSpec, kind: TransformKind, z: C64) -> Option<C64> {
    match kind {
        TransformKind::Cauchy => measure.analytic_g(z),
        TransformKind::CauchyDeriv => measure.analytic_g_deriv(z),
        TransformKind::TTransform => measure.analytic_t(z),
        TransformKind::TTransformDeriv => measure.analytic_t_deriv(z),
    }
}

pub(crate) fn check_point(measure: &MeasureSpec, z: C64) -> Result<()> {
    if !z.is_finite() {
        return Err(Error::OnCut(fmt_c(z), measure.support.a, measure.support.b));
    }
    let bad = match measure.atoms() {
        Some(at) => at.iter().any(|&(p, _)| (z - p).norm() <= 1e-14),
        None => on_cut(measure.support, z),
    };
    if bad {
        Err(Error::OnCut(fmt_c(z), measure.support.a, measure.support.b))
    } else {
        Ok(())
    }
}

/// Evaluates G, G′, T or T′ at `z` with `n` quadrature points.
pub fn eval_transform(measure: &MeasureSpec, kind: TransformKind, z: C64, n: usize) -> Result<C64> {
    check_point(measure, z)?;
    if let Some(v) = analytic(measure, kind, z) {
        return Ok(v);
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 quadrature points, got {n}")));
    }
    Ok(QuadratureRule::new(measure, n).eval(kind, z))
}

/// `𝒢(v) = G(J(v))` or `𝒯(v) = T(J(v))` for `0 < |v| < 1`.
pub fn eval_script_transform(measure: &MeasureSpec, kind: TransformKind, v: C64, n: usize) -> Result<C64> {
    if !(v.norm() < 1.0) || v.norm() == 0.0 {
        return Err(Error::OutsideDisk(fmt_c(v)));
    }
    if !matches!(kind, TransformKind::Cauchy | TransformKind::TTransform) {
        return Err(Error::InvalidParameter("script transforms exist for G and T only".into()));
    }
    eval_transform(measure, kind, j_unchecked(measure.support, v), n)
}

/// Quadrature error of `G(z)` for each `N` in `n_list`.
///
/// The reference is the closed form when available, else quadrature with
/// 16 times the largest `N`.
pub fn verify_exponential_convergence(measure: &MeasureSpec, z: C64, n_list: &[usize]) -> Result<Vec<(usize, f64)>> {
    check_point(measure, z)?;
    if measure.regularity == RegularityClass::Atomic {
        return Err(Error::InvalidParameter("atomic transforms are exact".into()));
    }
    let reference = match measure.analytic_g(z) {
        Some(v) => v,
        None => {
            let top = n_list.iter().copied().max().unwrap_or(400).max(2) * 16;
            QuadratureRule::new(measure, top).eval(TransformKind::Cauchy, z)
        }
    };
    Ok(n_list
        .iter()
        .map(|&n| (n, (QuadratureRule::new(measure, n.max(2)).eval(TransformKind::Cauchy, z) - reference).norm()))
        .collect())
}
