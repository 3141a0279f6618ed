//! Boundary tables on the circle of radius `r_A` and the Cauchy-integral
//! sums built on them: R- and S-transforms, the subordination-free inverses
//! `g(w)` and `t(w)` of the convolution, and the convolution's own transform
//! recovered from samples of `g` or `t` on a circle of radius `r_B`.

use crate::conformal::{diameter, distance_to_polygon, j_unchecked, joukowski_inv_inner_with_deriv, jp_unchecked, roots_of_unity, winding_number};
use crate::error::{fmt_c, Error, Result};
use crate::measures::{MeasureSpec, SupportInterval};
use crate::transforms::{analytic, check_point, QuadratureRule, TransformKind};
use crate::C64;

/// Points closer than this fraction of the curve's size are refused.
pub const DIST_FRAC: f64 = 1e-3;

/// Smallest |G′| or |T′| accepted at a preimage.
pub const DERIV_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Cauchy,
    TTransform,
}

/// Transform values and derivatives on `J(r_A ξ_N^j)`.
#[derive(Debug, Clone)]
pub struct BoundaryTable {
    pub support: SupportInterval,
    pub r_a: f64,
    pub n: usize,
    pub kind: TableKind,
    pub c: Vec<C64>,
    pub d: Vec<C64>,
    pub jp: Vec<C64>,
    pub jv: Vec<C64>,
    nodes: Vec<C64>,
    /// Size for the distance guard: the diameter, capped at twice the
    /// inscribed radius so that spikes near poles of 𝒯 do not inflate it.
    scale: f64,
    measure: MeasureSpec,
    rule: Option<QuadratureRule>,
}

impl BoundaryTable {
    pub fn measure(&self) -> &MeasureSpec {
        &self.measure
    }

    fn eval(&self, kind: TransformKind, z: C64) -> Result<C64> {
        check_point(&self.measure, z)?;
        if let Some(v) = analytic(&self.measure, kind, z) {
            return Ok(v);
        }
        match &self.rule {
            Some(r) => Ok(r.eval(kind, z)),
            None => Err(Error::InvalidMeasure("measure has neither closed forms nor a density".into())),
        }
    }

    /// G or T at `z`, with the table's quadrature budget.
    pub fn value_at(&self, z: C64) -> Result<C64> {
        self.eval(self.value_kind(), z)
    }

    /// G′ or T′ at `z`.
    pub fn deriv_at(&self, z: C64) -> Result<C64> {
        self.eval(self.deriv_kind(), z)
    }

    fn value_kind(&self) -> TransformKind {
        match self.kind {
            TableKind::Cauchy => TransformKind::Cauchy,
            TableKind::TTransform => TransformKind::TTransform,
        }
    }

    fn deriv_kind(&self) -> TransformKind {
        match self.kind {
            TableKind::Cauchy => TransformKind::CauchyDeriv,
            TableKind::TTransform => TransformKind::TTransformDeriv,
        }
    }

    /// `𝒢(v)` or `𝒯(v)` on the real segment, used for the bisection brackets.
    pub fn script_value(&self, v: f64) -> Result<C64> {
        self.value_at(j_unchecked(self.support, C64::new(v, 0.0)))
    }

    /// Radius of the largest origin-centred circle through the table points.
    pub fn inscribed_radius(&self) -> f64 {
        self.c.iter().map(|c| c.norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn winding_around(&self, w: C64) -> i64 {
        winding_number(&self.c, w)
    }

    fn check_inside(&self, w: C64) -> Result<()> {
        if winding_number(&self.c, w) != 1 || distance_to_polygon(&self.c, w) < DIST_FRAC * self.scale {
            return Err(Error::OutsideContour(fmt_c(w)));
        }
        Ok(())
    }
}

pub fn build_boundary_table(measure: &MeasureSpec, kind: TableKind, r_a: f64, n: usize, n_quad: usize) -> Result<BoundaryTable> {
    if !(r_a > 0.0 && r_a < 1.0) {
        return Err(Error::InvalidParameter(format!("r_A = {r_a} must lie in (0,1)")));
    }
    if n < 16 {
        return Err(Error::InvalidParameter(format!("table needs at least 16 points, got {n}")));
    }
    let s = measure.support;
    let nodes = roots_of_unity(n);
    let jv: Vec<C64> = nodes.iter().map(|x| j_unchecked(s, x * r_a)).collect();
    let jp: Vec<C64> = nodes.iter().map(|x| jp_unchecked(s, x * r_a)).collect();
    let rule = if measure.has_density() && measure.closed_form().is_none() { Some(QuadratureRule::new(measure, n_quad.max(2))) } else { None };
    let mut t = BoundaryTable {
        support: s,
        r_a,
        n,
        kind,
        c: Vec::new(),
        d: Vec::new(),
        jp,
        jv,
        nodes,
        scale: 0.0,
        measure: measure.clone(),
        rule,
    };
    let mut c = Vec::with_capacity(n);
    let mut d = Vec::with_capacity(n);
    for z in &t.jv {
        c.push(t.value_at(*z)?);
        d.push(t.deriv_at(*z)?);
    }
    t.scale = diameter(&c).min(2.0 * c.iter().map(|x| x.norm()).fold(f64::INFINITY, f64::min));
    t.c = c;
    t.d = d;
    Ok(t)
}

fn require(t: &BoundaryTable, kind: TableKind) -> Result<()> {
    if t.kind != kind {
        return Err(Error::InvalidParameter(format!("expected a {kind:?} table, got {:?}", t.kind)));
    }
    Ok(())
}

/// `R(w) ≈ (r_A/N) Σ ξ^j d_j J′_j (J_j − 1/c_j) / (c_j − w)`.
pub fn r_transform(t: &BoundaryTable, w: C64) -> Result<C64> {
    require(t, TableKind::Cauchy)?;
    t.check_inside(w)?;
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..t.n {
        acc += t.nodes[j] * t.d[j] * t.jp[j] * (t.jv[j] - t.c[j].inv()) / (t.c[j] - w);
    }
    Ok(acc * (t.r_a / t.n as f64))
}

/// `G⁻¹(w) = R(w) + 1/w`.
pub fn inverse_cauchy(t: &BoundaryTable, w: C64) -> Result<C64> {
    if w.norm() == 0.0 {
        return Err(Error::Pole(fmt_c(w)));
    }
    Ok(r_transform(t, w)? + w.inv())
}

/// `g(w) = R₁(w) + R₂(w) + 1/w`, the inverse of `G_{μ₁⊞μ₂}` near 0.
pub fn g_additive(t1: &BoundaryTable, t2: &BoundaryTable, w: C64) -> Result<C64> {
    if w.norm() == 0.0 {
        return Err(Error::Pole(fmt_c(w)));
    }
    Ok(r_transform(t1, w)? + r_transform(t2, w)? + w.inv())
}

/// `g′(w) = 1/G₁′(G₁⁻¹(w)) + 1/G₂′(G₂⁻¹(w)) + 1/w²`.
pub fn g_additive_deriv(t1: &BoundaryTable, t2: &BoundaryTable, w: C64) -> Result<C64> {
    let mut acc = (w * w).inv();
    for t in [t1, t2] {
        let z = inverse_cauchy(t, w)?;
        let d = t.deriv_at(z)?;
        if d.norm() < DERIV_FLOOR {
            return Err(Error::DerivativeDegenerate(fmt_c(w)));
        }
        acc += d.inv();
    }
    Ok(acc)
}

fn check_s_point(w: C64) -> Result<()> {
    if w.norm() == 0.0 || (w + 1.0).norm() == 0.0 {
        return Err(Error::Pole(fmt_c(w)));
    }
    Ok(())
}

/// `S(w) ≈ (r_A/N) Σ ξ^j d_j J′_j (1 + c_j) / (c_j J_j (c_j − w))`.
pub fn s_transform(t: &BoundaryTable, w: C64) -> Result<C64> {
    require(t, TableKind::TTransform)?;
    check_s_point(w)?;
    t.check_inside(w)?;
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..t.n {
        acc += t.nodes[j] * t.d[j] * t.jp[j] * (1.0 + t.c[j]) / (t.c[j] * t.jv[j] * (t.c[j] - w));
    }
    Ok(acc * (t.r_a / t.n as f64))
}

/// `T⁻¹(w) = (1 + w) / (w S(w))`.
pub fn t_inverse(t: &BoundaryTable, w: C64) -> Result<C64> {
    let s = s_transform(t, w)?;
    Ok((1.0 + w) / (w * s))
}

/// `t(w) = w/(1+w) · T₁⁻¹(w) · T₂⁻¹(w)`, the inverse of `T_{μ₁⊠μ₂}` near 0.
pub fn t_multiplicative(t1: &BoundaryTable, t2: &BoundaryTable, w: C64) -> Result<C64> {
    Ok(w / (1.0 + w) * t_inverse(t1, w)? * t_inverse(t2, w)?)
}

pub fn t_multiplicative_deriv(t1: &BoundaryTable, t2: &BoundaryTable, w: C64) -> Result<C64> {
    let i1 = t_inverse(t1, w)?;
    let i2 = t_inverse(t2, w)?;
    let mut di = [C64::new(0.0, 0.0); 2];
    for (k, (t, z)) in [(t1, i1), (t2, i2)].into_iter().enumerate() {
        let d = t.deriv_at(z)?;
        if d.norm() < DERIV_FLOOR {
            return Err(Error::DerivativeDegenerate(fmt_c(w)));
        }
        di[k] = d.inv();
    }
    let q = 1.0 + w;
    Ok(i1 * i2 / (q * q) + w / q * (di[0] * i2 + i1 * di[1]))
}

/// Samples of `g` (or `t`) and its derivative on `|w| = r_B`.
#[derive(Debug, Clone)]
pub struct CircleSamples {
    pub r_b: f64,
    pub nodes: Vec<C64>,
    pub values: Vec<C64>,
    pub derivs: Vec<C64>,
}

pub fn sample_circle(f: impl Fn(C64) -> Result<C64>, fd: impl Fn(C64) -> Result<C64>, r_b: f64, n: usize) -> Result<CircleSamples> {
    let nodes = roots_of_unity(n);
    let mut values = Vec::with_capacity(n);
    let mut derivs = Vec::with_capacity(n);
    for x in &nodes {
        let w = x * r_b;
        values.push(f(w)?);
        derivs.push(fd(w)?);
    }
    Ok(CircleSamples { r_b, nodes, values, derivs })
}

/// Ready-to-use Cauchy-integral representation of the convolution's transform.
#[derive(Debug, Clone)]
pub enum ConvolutionContour {
    /// `G_μ(z) ≈ (r_B²/N) Σ g′_j ξ^{2j} / (g_j − z)`, valid outside `Γ`.
    Additive { samples: CircleSamples, diam: f64 },
    /// `𝒯_μ(v) ≈ (r_B²/N) Σ (J⁻)′(t_j) t′_j ξ^{2j} / (J⁻(t_j) − v)`, valid
    /// inside `J⁻(Γ)`.
    Multiplicative { samples: CircleSamples, inner: Vec<C64>, inner_d: Vec<C64>, diam: f64 },
}

impl ConvolutionContour {
    pub fn additive(samples: CircleSamples) -> Self {
        let diam = diameter(&samples.values);
        ConvolutionContour::Additive { samples, diam }
    }

    pub fn multiplicative(samples: CircleSamples, support: SupportInterval) -> Result<Self> {
        let mut inner = Vec::with_capacity(samples.values.len());
        let mut inner_d = Vec::with_capacity(samples.values.len());
        for t in &samples.values {
            let (v, dv) = joukowski_inv_inner_with_deriv(support, *t)?;
            inner.push(v);
            inner_d.push(dv);
        }
        let diam = diameter(&inner);
        Ok(ConvolutionContour::Multiplicative { samples, inner, inner_d, diam })
    }

    pub fn samples(&self) -> &CircleSamples {
        match self {
            ConvolutionContour::Additive { samples, .. } => samples,
            ConvolutionContour::Multiplicative { samples, .. } => samples,
        }
    }
}

/// Evaluates the convolution's transform at one point: `G_μ(z)` for the
/// additive contour, `𝒯_μ(v)` (inner Joukowski coordinate) for the
/// multiplicative one.
pub fn convolution_transform_on_point(contour: &ConvolutionContour, z: C64) -> Result<C64> {
    let s = contour.samples();
    let n = s.nodes.len();
    let mut acc = C64::new(0.0, 0.0);
    match contour {
        ConvolutionContour::Additive { samples, diam } => {
            if winding_number(&samples.values, z) != 0 || distance_to_polygon(&samples.values, z) < DIST_FRAC * diam {
                return Err(Error::OutsideContour(fmt_c(z)));
            }
            for j in 0..n {
                let x = s.nodes[j];
                acc += s.derivs[j] * x * x / (s.values[j] - z);
            }
        }
        ConvolutionContour::Multiplicative { inner, inner_d, diam, .. } => {
            if winding_number(inner, z) != 1 || distance_to_polygon(inner, z) < DIST_FRAC * diam {
                return Err(Error::OutsideContour(fmt_c(z)));
            }
            for j in 0..n {
                let x = s.nodes[j];
                acc += inner_d[j] * s.derivs[j] * x * x / (inner[j] - z);
            }
        }
    }
    Ok(acc * (s.r_b * s.r_b / n as f64))
}
