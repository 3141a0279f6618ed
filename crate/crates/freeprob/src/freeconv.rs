//! End-to-end free sum and free product.
//!
//! Both algorithms follow the same four steps:
//! 1. boundary tables of G (or T) for each input on `J(r_A ξ^j)`;
//! 2. the support `[a, b]` from the zeros `ξ_a < 0 < ξ_b` of `g′` (or `t′`);
//! 3. a circle `|w| = r_B` inside the image of the convolution's transform,
//!    on which `g` (or `t`) is sampled to evaluate that transform by a
//!    Cauchy integral on `|v| = r_C`;
//! 4. power-series coefficients and the density by Stieltjes inversion.

use crate::conformal::{j_unchecked, joukowski_inv, roots_of_unity, Branch};
use crate::contour::{
    build_boundary_table, convolution_transform_on_point, g_additive, g_additive_deriv, sample_circle, t_multiplicative, t_multiplicative_deriv, BoundaryTable,
    ConvolutionContour, TableKind,
};
use crate::error::{Error, Result};
use crate::measures::{MeasureSpec, RegularityClass, SupportInterval};
use crate::recovery::{self, CoefficientVector, DensityGrid, SeriesKind};
use crate::transforms::default_points;
use crate::C64;

/// Contour points when an input lacks square-root decay at its edges.
pub const IRREGULAR_CONTOUR_POINTS: usize = 4000;

#[derive(Debug, Clone, PartialEq)]
pub struct ContourConfig {
    /// Quadrature points for transforms; `None` picks 400 or 4000 by
    /// regularity class.
    pub n_quad: Option<usize>,
    /// Trapezoid points on the `r_A` and `r_B` circles; `None` picks 400
    /// when both inputs have square-root edges and 4000 otherwise.
    pub n_contour: Option<usize>,
    pub m_coeffs: usize,
    pub epsilon: f64,
    /// `None` means `1 − epsilon`.
    pub r_a: Option<f64>,
    pub support_tol: f64,
    pub radius_tol: f64,
    pub criterion_samples: usize,
    /// `None` means `max(m_coeffs, 200)`.
    pub grid_size: Option<usize>,
}

impl Default for ContourConfig {
    fn default() -> Self {
        ContourConfig {
            n_quad: None,
            n_contour: None,
            m_coeffs: 20,
            epsilon: 0.05,
            r_a: None,
            support_tol: 1e-12,
            radius_tol: 1e-3,
            criterion_samples: 64,
            grid_size: None,
        }
    }
}

impl ContourConfig {
    pub fn r_a(&self) -> f64 {
        self.r_a.unwrap_or(1.0 - self.epsilon)
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size.unwrap_or(self.m_coeffs.max(200))
    }

    fn n_quad_for(&self, m: &MeasureSpec) -> usize {
        self.n_quad.unwrap_or_else(|| default_points(m))
    }

    fn n_contour_for(&self, m1: &MeasureSpec, m2: &MeasureSpec) -> usize {
        self.n_contour.unwrap_or(if m1.regularity == RegularityClass::SqrtBoundary && m2.regularity == RegularityClass::SqrtBoundary {
            400
        } else {
            IRREGULAR_CONTOUR_POINTS
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidParameter(s));
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon = {} must lie in (0,1)", self.epsilon));
        }
        let r_a = self.r_a();
        if !(r_a > 0.0 && r_a < 1.0) {
            return bad(format!("r_A = {r_a} must lie in (0,1)"));
        }
        if !(r_a - self.epsilon > 0.0) {
            return bad(format!("r_A − epsilon = {} leaves no bracket", r_a - self.epsilon));
        }
        if !(self.support_tol > 0.0 && self.radius_tol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if self.m_coeffs == 0 || self.criterion_samples == 0 {
            return bad("m_coeffs and criterion_samples must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvolutionKind {
    Additive,
    Multiplicative,
}

#[derive(Debug, Clone)]
pub struct ConvolutionResult {
    pub kind: ConvolutionKind,
    pub support: SupportInterval,
    pub xi_a: f64,
    pub xi_b: f64,
    pub r_b: f64,
    pub r_c: f64,
    /// Points on the `r_C` circle.
    pub m_points: usize,
    pub coefficients: CoefficientVector,
    /// `(x, f(x))` on the open support, ascending.
    pub density_grid: Vec<(f64, f64)>,
    pub max_clamp: f64,
    pub warnings: Vec<String>,
}

impl ConvolutionResult {
    fn series_kind(&self) -> SeriesKind {
        match self.kind {
            ConvolutionKind::Additive => SeriesKind::Additive,
            ConvolutionKind::Multiplicative => SeriesKind::Multiplicative,
        }
    }

    /// Grid with `(a, 0)` and `(b, 0)` added.
    pub fn closed_grid(&self) -> Vec<(f64, f64)> {
        recovery::with_endpoints(&self.density_grid, self.support)
    }

    /// Trapezoid mass of the grid.
    pub fn grid_mass(&self) -> f64 {
        recovery::trapezoid_mass(&self.closed_grid())
    }

    /// `∫ xᵏ f` from the coefficients.
    pub fn moment(&self, k: u32) -> f64 {
        recovery::moment_from_coefficients(&self.coefficients, self.support, k, self.series_kind())
    }

    pub fn mean(&self) -> f64 {
        self.moment(1) / self.moment(0)
    }

    pub fn variance(&self) -> f64 {
        let m0 = self.moment(0);
        let m1 = self.moment(1) / m0;
        self.moment(2) / m0 - m1 * m1
    }

    /// Density at an arbitrary `x` of the support, from the coefficients.
    pub fn density_at(&self, x: f64) -> f64 {
        let s = self.support;
        if x <= s.a || x >= s.b {
            return 0.0;
        }
        let theta = ((x - s.center()) / s.half_width()).clamp(-1.0, 1.0).acos();
        let im = self.coefficients.eval(C64::from_polar(1.0, theta)).im / std::f64::consts::PI;
        let f = match self.kind {
            ConvolutionKind::Additive => im,
            ConvolutionKind::Multiplicative => im / x,
        };
        f.max(0.0)
    }
}

/// Critical points of `g` (or `t`) and the support they give.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSearch {
    pub xi_a: f64,
    pub xi_b: f64,
    pub a: f64,
    pub b: f64,
    pub warnings: Vec<String>,
}

/// Bisection for the sign change of `f` on `(0, far]` (or `[far, 0)`),
/// where `f` is negative next to 0. Returns `None` when `f(far) ≤ 0`.
fn bisect_from_pole(f: &dyn Fn(f64) -> Result<f64>, far: f64, tol: f64) -> Result<Option<f64>> {
    if f(far)? <= 0.0 {
        return Ok(None);
    }
    let (mut near, mut far) = (0.0, far);
    while (far - near).abs() > tol {
        let mid = 0.5 * (near + far);
        if f(mid)? < 0.0 {
            near = mid;
        } else {
            far = mid;
        }
    }
    Ok(Some(0.5 * (near + far)))
}

fn brackets(t1: &BoundaryTable, t2: &BoundaryTable, cfg: &ContourConfig) -> Result<(f64, f64)> {
    let v = t1.r_a - cfg.epsilon;
    let hi = t1.script_value(v)?.re.min(t2.script_value(t2.r_a - cfg.epsilon)?.re);
    let lo = t1.script_value(-v)?.re.max(t2.script_value(-(t2.r_a - cfg.epsilon))?.re);
    Ok((lo, hi))
}

fn find_support(
    t1: &BoundaryTable,
    t2: &BoundaryTable,
    cfg: &ContourConfig,
    f: &dyn Fn(C64) -> Result<C64>,
    fd: &dyn Fn(C64) -> Result<C64>,
) -> Result<SupportSearch> {
    let (lo, hi) = brackets(t1, t2, cfg)?;
    let mut warnings = Vec::new();
    if !(lo < 0.0 && hi > 0.0) {
        return Err(Error::InvalidMeasure(format!("bisection brackets ({lo}, {hi}) do not straddle 0")));
    }
    let d = |w: f64| fd(C64::new(w, 0.0)).map(|z| z.re);
    let xi_b = match bisect_from_pole(&d, hi, cfg.support_tol)? {
        Some(x) => x,
        None => {
            warnings.push(format!("no sign change of the derivative on (0, {hi}); using the guarded endpoint as ξ_b"));
            hi
        }
    };
    let xi_a = match bisect_from_pole(&d, lo, cfg.support_tol)? {
        Some(x) => x,
        None => {
            warnings.push(format!("no sign change of the derivative on ({lo}, 0); using the guarded endpoint as ξ_a"));
            lo
        }
    };
    let a = f(C64::new(xi_a, 0.0))?.re;
    let b = f(C64::new(xi_b, 0.0))?.re;
    if !(a < b) {
        return Err(Error::InvalidMeasure(format!("computed support [{a}, {b}] is empty")));
    }
    Ok(SupportSearch { xi_a, xi_b, a, b, warnings })
}

pub fn find_support_additive(t1: &BoundaryTable, t2: &BoundaryTable, cfg: &ContourConfig) -> Result<SupportSearch> {
    find_support(t1, t2, cfg, &|w| g_additive(t1, t2, w), &|w| g_additive_deriv(t1, t2, w))
}

pub fn find_support_multiplicative(t1: &BoundaryTable, t2: &BoundaryTable, cfg: &ContourConfig) -> Result<SupportSearch> {
    find_support(t1, t2, cfg, &|w| t_multiplicative(t1, t2, w), &|w| t_multiplicative_deriv(t1, t2, w))
}

/// Sign test `sgn Im f(w) = −sgn Im w` at `samples` points of `|w| = r`,
/// skipping points within 1e−9 of the real axis. Failed evaluations count
/// as failures.
pub fn circle_passes(f: &dyn Fn(C64) -> Result<C64>, r: f64, samples: usize) -> bool {
    roots_of_unity(samples).into_iter().all(|x| {
        let w = x * r;
        if w.im.abs() < 1e-9 {
            return true;
        }
        match f(w) {
            Ok(v) => v.im.signum() == -w.im.signum() && v.im != 0.0,
            Err(_) => false,
        }
    })
}

/// Largest passing radius up to `start`, by halving and then bisection to
/// `radius_tol`.
pub fn find_image_radius(criterion: &dyn Fn(f64) -> bool, start: f64, cfg: &ContourConfig) -> Result<f64> {
    if !(start > 0.0) {
        return Err(Error::ContourTooSmall(start));
    }
    if criterion(start) {
        return Ok(start);
    }
    let (mut lo, mut hi) = (0.5 * start, start);
    while !criterion(lo) {
        hi = lo;
        lo *= 0.5;
        if lo < 1e-4 * start {
            return Err(Error::ContourTooSmall(1e-4 * start));
        }
    }
    while hi - lo > cfg.radius_tol {
        let mid = 0.5 * (lo + hi);
        if criterion(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// `r_C = (1 − ε) min_j |J⁻(γ_j)|`.
pub fn choose_inner_radius(gamma: &[C64], support: SupportInterval, cfg: &ContourConfig) -> Result<f64> {
    let mut best = f64::INFINITY;
    for g in gamma {
        best = best.min(joukowski_inv(support, *g, Branch::Inner)?.norm());
    }
    Ok((1.0 - cfg.epsilon) * best)
}

/// `M = max(100, ⌈16 ln 10 / ln(1/r_C)⌉)`, rounded up to even.
pub fn circle_points(r_c: f64) -> usize {
    let m = ((16.0 * 10f64.ln() / (1.0 / r_c).ln()).ceil() as usize).max(100);
    m + m % 2
}

struct Steps<'a> {
    t1: BoundaryTable,
    t2: BoundaryTable,
    cfg: &'a ContourConfig,
    n_contour: usize,
    kind: ConvolutionKind,
}

impl Steps<'_> {
    fn f(&self, w: C64) -> Result<C64> {
        match self.kind {
            ConvolutionKind::Additive => g_additive(&self.t1, &self.t2, w),
            ConvolutionKind::Multiplicative => t_multiplicative(&self.t1, &self.t2, w),
        }
    }

    fn fd(&self, w: C64) -> Result<C64> {
        match self.kind {
            ConvolutionKind::Additive => g_additive_deriv(&self.t1, &self.t2, w),
            ConvolutionKind::Multiplicative => t_multiplicative_deriv(&self.t1, &self.t2, w),
        }
    }

    fn run(self) -> Result<ConvolutionResult> {
        let cfg = self.cfg;
        let sup = find_support(&self.t1, &self.t2, cfg, &|w| self.f(w), &|w| self.fd(w))?;
        let mut warnings = sup.warnings.clone();
        let support = SupportInterval::new(sup.a, sup.b)?;
        if self.kind == ConvolutionKind::Multiplicative && support.a <= 0.0 {
            return Err(Error::InvalidSupport(support.a, support.b));
        }

        // ξ_a and ξ_b lie on the boundary of the image region
        let start = (1.0 - cfg.epsilon) * self.t1.inscribed_radius().min(self.t2.inscribed_radius()).min(-sup.xi_a).min(sup.xi_b);
        let crit = |r: f64| circle_passes(&|w| self.f(w), r, cfg.criterion_samples);
        let r_b = find_image_radius(&crit, start, cfg)?;

        let samples = sample_circle(|w| self.f(w), |w| self.fd(w), r_b, self.n_contour)?;
        let r_c = choose_inner_radius(&samples.values, support, cfg)?;
        let m_points = circle_points(r_c);
        let vs: Vec<C64> = roots_of_unity(m_points).into_iter().map(|x| x * r_c).collect();
        let mut vals = Vec::with_capacity(m_points);
        match self.kind {
            ConvolutionKind::Additive => {
                let contour = ConvolutionContour::additive(samples);
                for v in &vs {
                    vals.push(convolution_transform_on_point(&contour, j_unchecked(support, *v))?);
                }
            }
            ConvolutionKind::Multiplicative => {
                let contour = ConvolutionContour::multiplicative(samples, support)?;
                for v in &vs {
                    vals.push(convolution_transform_on_point(&contour, *v)?);
                }
            }
        }

        let coefficients = recovery::coefficients_from_circle(&vals, r_c, cfg.m_coeffs)?;
        warnings.extend(coefficients.warnings.iter().cloned());
        let series = match self.kind {
            ConvolutionKind::Additive => SeriesKind::Additive,
            ConvolutionKind::Multiplicative => SeriesKind::Multiplicative,
        };
        let DensityGrid { points, max_clamp } = recovery::density_from_coefficients(&coefficients, support, cfg.grid_size(), series)?;
        if max_clamp > 0.0 {
            warnings.push(format!("clamped negative density values, largest {max_clamp:.3e}"));
        }
        let res = ConvolutionResult {
            kind: self.kind,
            support,
            xi_a: sup.xi_a,
            xi_b: sup.xi_b,
            r_b,
            r_c,
            m_points,
            coefficients,
            density_grid: points,
            max_clamp,
            warnings,
        };
        let mass = res.grid_mass();
        let mut res = res;
        if (mass - 1.0).abs() > 2e-2 {
            res.warnings.push(format!("recovered density has mass {mass:.6}"));
        }
        Ok(res)
    }
}

/// Free sum `μ₁ ⊞ μ₂`.
pub fn additive_convolve(mu1: &MeasureSpec, mu2: &MeasureSpec, cfg: &ContourConfig) -> Result<ConvolutionResult> {
    cfg.validate()?;
    let n = cfg.n_contour_for(mu1, mu2);
    let r_a = cfg.r_a();
    let t1 = build_boundary_table(mu1, TableKind::Cauchy, r_a, n, cfg.n_quad_for(mu1))?;
    let t2 = build_boundary_table(mu2, TableKind::Cauchy, r_a, n, cfg.n_quad_for(mu2))?;
    Steps { t1, t2, cfg, n_contour: n, kind: ConvolutionKind::Additive }.run()
}

/// Free product `μ₁ ⊠ μ₂` of measures on the positive half-line.
pub fn multiplicative_convolve(mu1: &MeasureSpec, mu2: &MeasureSpec, cfg: &ContourConfig) -> Result<ConvolutionResult> {
    cfg.validate()?;
    for m in [mu1, mu2] {
        if m.support.a <= 0.0 {
            return Err(Error::InvalidSupport(m.support.a, m.support.b));
        }
    }
    let n = cfg.n_contour_for(mu1, mu2);
    let r_a = cfg.r_a();
    let t1 = build_boundary_table(mu1, TableKind::TTransform, r_a, n, cfg.n_quad_for(mu1))?;
    let t2 = build_boundary_table(mu2, TableKind::TTransform, r_a, n, cfg.n_quad_for(mu2))?;
    Steps { t1, t2, cfg, n_contour: n, kind: ConvolutionKind::Multiplicative }.run()
}

/// Builds the two boundary tables used by the additive algorithm.
pub fn additive_tables(mu1: &MeasureSpec, mu2: &MeasureSpec, cfg: &ContourConfig) -> Result<(BoundaryTable, BoundaryTable)> {
    cfg.validate()?;
    let n = cfg.n_contour_for(mu1, mu2);
    Ok((
        build_boundary_table(mu1, TableKind::Cauchy, cfg.r_a(), n, cfg.n_quad_for(mu1))?,
        build_boundary_table(mu2, TableKind::Cauchy, cfg.r_a(), n, cfg.n_quad_for(mu2))?,
    ))
}

/// Builds the two boundary tables used by the multiplicative algorithm.
pub fn multiplicative_tables(mu1: &MeasureSpec, mu2: &MeasureSpec, cfg: &ContourConfig) -> Result<(BoundaryTable, BoundaryTable)> {
    cfg.validate()?;
    let n = cfg.n_contour_for(mu1, mu2);
    Ok((
        build_boundary_table(mu1, TableKind::TTransform, cfg.r_a(), n, cfg.n_quad_for(mu1))?,
        build_boundary_table(mu2, TableKind::TTransform, cfg.r_a(), n, cfg.n_quad_for(mu2))?,
    ))
}
