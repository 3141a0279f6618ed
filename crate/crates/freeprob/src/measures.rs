//! Input measures: support, density, regularity class and closed-form
//! transforms where they are known.

use crate::conformal::sqrt_pair;
use crate::error::{Error, Result};
use crate::C64;
use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::num::NonZeroUsize;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportInterval {
    pub a: f64,
    pub b: f64,
}

impl SupportInterval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter(format!("support [{a}, {b}] needs a < b")));
        }
        Ok(SupportInterval { a, b })
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.b - self.a)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a && x <= self.b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegularityClass {
    /// Density `ψ(x)√(x−a)√(b−x)` with `ψ` continuous.
    SqrtBoundary,
    /// Density `(x−a)^α (b−x)^β ψ(x)`.
    Jacobi,
    /// Finitely many point masses.
    Atomic,
    Other,
}

impl RegularityClass {
    /// Quadrature budget used when the caller does not choose one.
    pub fn default_quadrature_points(self) -> usize {
        match self {
            RegularityClass::SqrtBoundary => 400,
            _ => 4000,
        }
    }
}

/// Measures whose transforms are known in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ClosedForm {
    Semicircle { center: f64, radius: f64 },
    MarchenkoPastur { lambda: f64 },
    Uniform { a: f64, b: f64 },
}

impl ClosedForm {
    pub fn g(&self, z: C64) -> C64 {
        match *self {
            ClosedForm::Semicircle { center, radius } => {
                let zeta = z - center;
                (zeta - radius * sqrt_pair(zeta / radius)) * (2.0 / (radius * radius))
            }
            ClosedForm::MarchenkoPastur { lambda } => {
                let q = mp_sqrt(lambda, z);
                (z + lambda - 1.0 - q) / (2.0 * lambda * z)
            }
            ClosedForm::Uniform { a, b } => ((z - a) / (z - b)).ln() / (b - a),
        }
    }

    pub fn g_deriv(&self, z: C64) -> C64 {
        match *self {
            ClosedForm::Semicircle { center, radius } => {
                let zeta = z - center;
                let q = radius * sqrt_pair(zeta / radius);
                (1.0 - zeta / q) * (2.0 / (radius * radius))
            }
            ClosedForm::MarchenkoPastur { lambda } => {
                let q = mp_sqrt(lambda, z);
                let dq = (z - (1.0 + lambda)) / q;
                ((1.0 - dq) * z - (z + lambda - 1.0 - q)) / (2.0 * lambda * z * z)
            }
            ClosedForm::Uniform { a, b } => ((z - a).inv() - (z - b).inv()) / (b - a),
        }
    }

    /// Inverse of the Cauchy transform near `w = 0`.
    pub fn g_inv(&self, w: C64) -> C64 {
        match *self {
            ClosedForm::Semicircle { center, radius } => center + w * (radius * radius / 4.0) + w.inv(),
            ClosedForm::MarchenkoPastur { lambda } => (1.0 - lambda * w).inv() + w.inv(),
            ClosedForm::Uniform { a, b } => {
                let m = 0.5 * (b - a);
                0.5 * (a + b) - m + 2.0 * m / (1.0 - (-2.0 * m * w).exp())
            }
        }
    }

    pub fn support(&self) -> SupportInterval {
        match *self {
            ClosedForm::Semicircle { center, radius } => SupportInterval { a: center - radius, b: center + radius },
            ClosedForm::MarchenkoPastur { lambda } => {
                let s = lambda.sqrt();
                SupportInterval { a: (1.0 - s).powi(2), b: (1.0 + s).powi(2) }
            }
            ClosedForm::Uniform { a, b } => SupportInterval { a, b },
        }
    }
}

/// `√(z−λ₊)·√(z−λ₋)` on the sheet that grows like `z`.
fn mp_sqrt(lambda: f64, z: C64) -> C64 {
    let d = 2.0 * lambda.sqrt();
    let zeta = z - (1.0 + lambda);
    d * sqrt_pair(zeta / d)
}

pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A compactly supported probability measure on the real line.
#[derive(Clone)]
pub struct MeasureSpec {
    /// For atomic measures this is the hull of the atom locations.
    pub support: SupportInterval,
    pub regularity: RegularityClass,
    density: Option<DensityFn>,
    atoms: Option<Vec<(f64, f64)>>,
    closed: Option<ClosedForm>,
    /// Underlying model, kept even when closed forms are switched off.
    model: Option<ClosedForm>,
}

impl fmt::Debug for MeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeasureSpec")
            .field("support", &self.support)
            .field("regularity", &self.regularity)
            .field("atoms", &self.atoms)
            .field("closed", &self.closed)
            .finish()
    }
}

impl MeasureSpec {
    pub fn density(&self, x: f64) -> f64 {
        match &self.density {
            Some(f) if self.support.contains(x) => f(x),
            _ => 0.0,
        }
    }

    pub fn has_density(&self) -> bool {
        self.density.is_some()
    }

    pub fn atoms(&self) -> Option<&[(f64, f64)]> {
        self.atoms.as_deref()
    }

    pub fn closed_form(&self) -> Option<&ClosedForm> {
        self.closed.as_ref()
    }

    /// The ensemble this measure came from, if it is one of the built-ins.
    pub fn model(&self) -> Option<&ClosedForm> {
        self.model.as_ref()
    }

    /// Same measure, but every transform goes through quadrature.
    pub fn without_closed_forms(&self) -> Self {
        MeasureSpec { closed: None, ..self.clone() }
    }

    pub fn analytic_g(&self, z: C64) -> Option<C64> {
        if let Some(at) = &self.atoms {
            return Some(at.iter().map(|&(p, w)| w / (z - p)).sum());
        }
        self.closed.map(|c| c.g(z))
    }

    pub fn analytic_g_deriv(&self, z: C64) -> Option<C64> {
        if let Some(at) = &self.atoms {
            return Some(at.iter().map(|&(p, w)| -w / ((z - p) * (z - p))).sum());
        }
        self.closed.map(|c| c.g_deriv(z))
    }

    pub fn analytic_t(&self, z: C64) -> Option<C64> {
        if let Some(at) = &self.atoms {
            return Some(at.iter().map(|&(p, w)| w * p / (z - p)).sum());
        }
        self.closed.map(|c| z * c.g(z) - 1.0)
    }

    pub fn analytic_t_deriv(&self, z: C64) -> Option<C64> {
        if let Some(at) = &self.atoms {
            return Some(at.iter().map(|&(p, w)| -w * p / ((z - p) * (z - p))).sum());
        }
        self.closed.map(|c| c.g(z) + z * c.g_deriv(z))
    }

    pub fn analytic_g_inv(&self, w: C64) -> Option<C64> {
        self.closed.map(|c| c.g_inv(w))
    }

    /// Inverse T-transform near `w = 0` where it is elementary.
    pub fn analytic_t_inv(&self, w: C64) -> Option<C64> {
        match (&self.atoms, self.closed) {
            (Some(at), _) if at.len() == 1 => Some(at[0].0 * (1.0 + w) / w),
            (_, Some(ClosedForm::MarchenkoPastur { lambda })) => Some((1.0 + w) * (1.0 + lambda * w) / w),
            _ => None,
        }
    }
}

pub fn make_semicircle(center: f64, radius: f64) -> Result<MeasureSpec> {
    if !(radius > 0.0) || !center.is_finite() || !radius.is_finite() {
        return Err(Error::InvalidParameter(format!("semicircle radius {radius} must be positive")));
    }
    let cf = ClosedForm::Semicircle { center, radius };
    let k = 2.0 / (PI * radius * radius);
    Ok(MeasureSpec {
        support: cf.support(),
        regularity: RegularityClass::SqrtBoundary,
        density: Some(Arc::new(move |x| {
            let u = x - center;
            k * (radius * radius - u * u).max(0.0).sqrt()
        })),
        atoms: None,
        closed: Some(cf),
        model: Some(cf),
    })
}

pub fn make_marchenko_pastur(lambda: f64) -> Result<MeasureSpec> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidParameter(format!("Marchenko-Pastur parameter {lambda} must lie in (0,1)")));
    }
    let cf = ClosedForm::MarchenkoPastur { lambda };
    let s = cf.support();
    let (lm, lp) = (s.a, s.b);
    Ok(MeasureSpec {
        support: s,
        regularity: RegularityClass::SqrtBoundary,
        density: Some(Arc::new(move |x| ((lp - x) * (x - lm)).max(0.0).sqrt() / (2.0 * PI * lambda * x))),
        atoms: None,
        closed: Some(cf),
        model: Some(cf),
    })
}

pub fn make_uniform(a: f64, b: f64) -> Result<MeasureSpec> {
    let s = SupportInterval::new(a, b)?;
    let cf = ClosedForm::Uniform { a, b };
    let v = 1.0 / (b - a);
    Ok(MeasureSpec {
        support: s,
        regularity: RegularityClass::Other,
        density: Some(Arc::new(move |_| v)),
        atoms: None,
        closed: Some(cf),
        model: Some(cf),
    })
}

pub fn make_atomic(atoms: &[(f64, f64)]) -> Result<MeasureSpec> {
    if atoms.is_empty() {
        return Err(Error::InvalidParameter("atomic measure needs at least one atom".into()));
    }
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("atom weights sum to {total}, not 1")));
    }
    if atoms.iter().any(|&(p, w)| !(w > 0.0) || !p.is_finite()) {
        return Err(Error::InvalidParameter("atom weights must be positive and locations finite".into()));
    }
    let mut locs: Vec<f64> = atoms.iter().map(|a| a.0).collect();
    locs.sort_by(|x, y| x.total_cmp(y));
    if locs.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidParameter("atom locations must be distinct".into()));
    }
    let (lo, hi) = (locs[0], locs[locs.len() - 1]);
    // a single atom still needs a nondegenerate interval for the Joukowski map
    let support = if hi > lo { SupportInterval { a: lo, b: hi } } else { SupportInterval { a: lo - 0.5, b: lo + 0.5 } };
    Ok(MeasureSpec {
        support,
        regularity: RegularityClass::Atomic,
        density: None,
        atoms: Some(atoms.to_vec()),
        closed: None,
        model: None,
    })
}

/// Mass tolerance for user-supplied densities.
pub const CUSTOM_MASS_TOL: f64 = 1e-6;

pub fn make_custom(density: DensityFn, support: SupportInterval, regularity: RegularityClass) -> Result<MeasureSpec> {
    if regularity == RegularityClass::Atomic {
        return Err(Error::InvalidMeasure("use make_atomic for point masses".into()));
    }
    let m = MeasureSpec { support, regularity, density: Some(density), atoms: None, closed: None, model: None };
    let probe = GaussLegendre::new(NonZeroUsize::new(64).unwrap());
    for (x, _) in probe.iter() {
        let t = support.center() + support.half_width() * x;
        let f = m.density(t);
        if !(f >= 0.0) {
            return Err(Error::InvalidMeasure(format!("density is {f} at x = {t}")));
        }
    }
    let mass = integrate(&m, |_| 1.0);
    if (mass - 1.0).abs() > CUSTOM_MASS_TOL {
        return Err(Error::InvalidMeasure(format!("density has mass {mass}")));
    }
    Ok(m)
}

/// `∫ x^k dμ`.
pub fn moment(measure: &MeasureSpec, k: u32) -> f64 {
    if let Some(at) = measure.atoms() {
        return at.iter().map(|&(p, w)| w * p.powi(k as i32)).sum();
    }
    integrate(measure, |x| x.powi(k as i32))
}

/// `∫ φ(x) f(x) dx` after the substitution `x = c + h cos θ`, with adaptive
/// Gauss–Legendre in `θ ∈ [0, π]`.
///
/// For square-root and uniform densities the θ-integrand is analytic, so a
/// single panel is usually enough.
pub fn integrate(measure: &MeasureSpec, phi: impl Fn(f64) -> f64) -> f64 {
    integrate_theta(measure, phi, 0.0, PI)
}

fn integrate_theta(measure: &MeasureSpec, phi: impl Fn(f64) -> f64, t0: f64, t1: f64) -> f64 {
    let s = measure.support;
    let (c, h) = (s.center(), s.half_width());
    let g = |t: f64| {
        let x = (c + h * t.cos()).clamp(s.a, s.b);
        phi(x) * measure.density(x) * h * t.sin()
    };
    let rule = GaussLegendre::new(NonZeroUsize::new(48).unwrap());
    adaptive(&rule, &g, t0, t1, rule.integrate(t0, t1, &g), 0)
}

/// `μ((−∞, x])`.
pub fn cdf(measure: &MeasureSpec, x: f64) -> f64 {
    if let Some(at) = measure.atoms() {
        return at.iter().filter(|a| a.0 <= x).map(|a| a.1).sum();
    }
    let s = measure.support;
    if x <= s.a {
        return 0.0;
    }
    if x >= s.b {
        return 1.0;
    }
    let theta = ((x - s.center()) / s.half_width()).clamp(-1.0, 1.0).acos();
    integrate_theta(measure, |_| 1.0, theta, PI)
}

/// Smallest `x` with `cdf(x) ≥ p`; bisection to 1e−13 relative width for
/// measures with a density.
pub fn quantile(measure: &MeasureSpec, p: f64) -> f64 {
    if let Some(at) = measure.atoms() {
        let mut pts = at.to_vec();
        pts.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut acc = 0.0;
        for (x, w) in &pts {
            acc += w;
            if acc >= p - 1e-15 {
                return *x;
            }
        }
        return pts[pts.len() - 1].0;
    }
    if let Some(ClosedForm::Uniform { a, b }) = measure.model() {
        return a + (b - a) * p;
    }
    let s = measure.support;
    let (mut lo, mut hi) = (s.a, s.b);
    while hi - lo > 1e-13 * (1.0 + hi.abs().max(lo.abs())) {
        let mid = 0.5 * (lo + hi);
        if cdf(measure, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn adaptive(rule: &GaussLegendre, g: &impl Fn(f64) -> f64, lo: f64, hi: f64, whole: f64, depth: u32) -> f64 {
    let mid = 0.5 * (lo + hi);
    let left = rule.integrate(lo, mid, g);
    let right = rule.integrate(mid, hi, g);
    let split = left + right;
    if (split - whole).abs() <= 1e-14 * split.abs().max(1e-3) || depth >= 30 {
        return split;
    }
    adaptive(rule, g, lo, mid, left, depth + 1) + adaptive(rule, g, mid, hi, right, depth + 1)
}

/// Serializable description of a measure, used by the CLI's `json:` specs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureDesc {
    Semicircle {
        #[serde(default)]
        center: f64,
        #[serde(default = "two")]
        radius: f64,
    },
    MarchenkoPastur {
        lambda: f64,
    },
    Uniform {
        a: f64,
        b: f64,
    },
    Atomic {
        atoms: Vec<(f64, f64)>,
    },
    /// Density `(x−a)^α (b−x)^β ψ(x)` with `ψ` a polynomial given by its
    /// coefficients in increasing degree.
    Jacobi {
        a: f64,
        b: f64,
        #[serde(default)]
        alpha: f64,
        #[serde(default)]
        beta: f64,
        psi: Vec<f64>,
        regularity: RegularityClass,
    },
}

fn two() -> f64 {
    2.0
}

impl MeasureDesc {
    pub fn build(&self) -> Result<MeasureSpec> {
        match self {
            MeasureDesc::Semicircle { center, radius } => make_semicircle(*center, *radius),
            MeasureDesc::MarchenkoPastur { lambda } => make_marchenko_pastur(*lambda),
            MeasureDesc::Uniform { a, b } => make_uniform(*a, *b),
            MeasureDesc::Atomic { atoms } => make_atomic(atoms),
            MeasureDesc::Jacobi { a, b, alpha, beta, psi, regularity } => {
                let s = SupportInterval::new(*a, *b)?;
                let (a, b, al, be, psi) = (*a, *b, *alpha, *beta, psi.clone());
                let f = move |x: f64| {
                    let p = psi.iter().rev().fold(0.0, |acc, c| acc * x + c);
                    (x - a).max(0.0).powf(al) * (b - x).max(0.0).powf(be) * p
                };
                make_custom(Arc::new(f), s, *regularity)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semicircle_density() {
        let s = make_semicircle(0.0, 2.0).unwrap();
        assert!((s.density(0.0) - 1.0 / PI).abs() < 1e-15);
        assert_eq!(s.density(2.0), 0.0);
        assert_eq!(s.density(-2.0), 0.0);
        let t = make_semicircle(3.0, 2.0).unwrap();
        assert_eq!((t.support.a, t.support.b), (1.0, 5.0));
        assert!((t.density(3.0) - 1.0 / PI).abs() < 1e-15);
        assert!(make_semicircle(0.0, 0.0).is_err());
    }

    #[test]
    fn mp_support_and_g() {
        let m = make_marchenko_pastur(0.5).unwrap();
        assert!((m.support.a - 0.085786437626905).abs() < 1e-12);
        assert!((m.support.b - 2.914213562373095).abs() < 1e-12);
        assert!((m.analytic_g(C64::new(3.0, 0.0)).unwrap() - 2.0 / 3.0).norm() < 1e-14);
        assert!(make_marchenko_pastur(1.0).is_err());
        assert!(make_marchenko_pastur(0.0).is_err());
    }

    #[test]
    fn uniform_g() {
        let u = make_uniform(-3.0, 3.0).unwrap();
        assert!((u.analytic_g(C64::new(4.0, 0.0)).unwrap().re - 7f64.ln() / 6.0).abs() < 1e-15);
        assert_eq!(make_uniform(-1.0, 1.0).unwrap().density(0.0), 0.5);
        assert!(make_uniform(1.0, 1.0).is_err());
    }

    #[test]
    fn atomic_transforms() {
        let a = make_atomic(&[(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        assert!((a.analytic_g(C64::new(2.0, 0.0)).unwrap() - 2.0 / 3.0).norm() < 1e-15);
        let p = make_atomic(&[(2.5, 1.0)]).unwrap();
        let z = C64::new(0.3, 0.7);
        assert!((p.analytic_t(z).unwrap() - 2.5 / (z - 2.5)).norm() < 1e-15);
        assert!(make_atomic(&[(1.0, 0.5), (2.0, 0.4)]).is_err());
        let pts: Vec<(f64, f64)> = (0..7).map(|i| (1.0 + 0.5 * i as f64, 1.0 / 7.0)).collect();
        let m = make_atomic(&pts).unwrap();
        let z5 = C64::new(5.0, 0.0);
        let want: f64 = pts.iter().map(|&(p, w)| w * p / (5.0 - p)).sum();
        assert!((m.analytic_t(z5).unwrap().re - want).abs() < 1e-15);
    }

    #[test]
    fn masses_and_moments() {
        let list = [
            make_semicircle(0.0, 2.0).unwrap(),
            make_semicircle(3.0, 2.0).unwrap(),
            make_marchenko_pastur(0.2).unwrap(),
            make_marchenko_pastur(0.7).unwrap(),
            make_uniform(-4.0, 4.0).unwrap(),
        ];
        for m in &list {
            assert!((moment(m, 0) - 1.0).abs() < 1e-8, "{m:?}");
        }
        assert!((moment(&list[0], 2) - 1.0).abs() < 1e-12);
        assert!((moment(&list[2], 1) - 1.0).abs() < 1e-12);
        assert!((moment(&list[3], 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn custom_polynomial_density() {
        let r3 = 3f64.sqrt();
        let k = 5.0 * r3 / 144.0;
        let m = make_custom(
            Arc::new(move |x: f64| k * (x * x + 1.0).powi(2)),
            SupportInterval::new(-r3, r3).unwrap(),
            RegularityClass::Jacobi,
        )
        .unwrap();
        assert!((moment(&m, 0) - 1.0).abs() < 1e-8);
        let neg = make_custom(Arc::new(|x: f64| x), SupportInterval::new(-1.0, 1.0).unwrap(), RegularityClass::Other);
        assert!(neg.is_err());
    }

    #[test]
    fn json_round_trip() {
        let d: MeasureDesc = serde_json::from_str(r#"{"kind":"uniform","a":-1,"b":2}"#).unwrap();
        assert_eq!(d, MeasureDesc::Uniform { a: -1.0, b: 2.0 });
        let m = d.build().unwrap();
        assert!((m.density(0.0) - 1.0 / 3.0).abs() < 1e-15);
    }
}
