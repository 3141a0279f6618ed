//! Joukowski map of an interval and roots-of-unity grids.
//!
//! `J(v) = ½(v + 1/v)·(b−a)/2 + (b+a)/2` maps the unit circle onto `[a,b]`
//! (twice) and both the open unit disk and its exterior conformally onto the
//! complement of the segment.

use crate::error::{fmt_c, Error, Result};
use crate::measures::SupportInterval;
use crate::C64;
use std::f64::consts::PI;

/// Points closer than this to the segment are refused by the inverse map.
pub const CUT_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Root with `|v| < 1`.
    Inner,
    /// Root with `|v| > 1`.
    Outer,
}

/// Equispaced nodes `ξ_N^j = exp(2πij/N)`.
#[derive(Debug, Clone)]
pub struct UnitGrid {
    pub n: usize,
    pub nodes: Vec<C64>,
}

impl UnitGrid {
    pub fn new(n: usize) -> Self {
        UnitGrid { n, nodes: roots_of_unity(n) }
    }
}

/// `exp(2πij/n)` for `j = 0..n`, built from the first quadrant so that
/// `ξ^j·ξ^{n−j} = 1` holds to rounding.
pub fn roots_of_unity(n: usize) -> Vec<C64> {
    let upper = |j: usize| {
        if j == 0 {
            C64::new(1.0, 0.0)
        } else if 4 * j == n {
            C64::new(0.0, 1.0)
        } else if 2 * j == n {
            C64::new(-1.0, 0.0)
        } else {
            let (s, c) = (2.0 * PI * j as f64 / n as f64).sin_cos();
            C64::new(c, s)
        }
    };
    (0..n).map(|j| if 2 * j > n { upper(n - j).conj() } else { upper(j) }).collect()
}

pub fn joukowski(s: SupportInterval, v: C64) -> Result<C64> {
    if v == C64::new(0.0, 0.0) {
        return Err(Error::Pole(fmt_c(v)));
    }
    Ok(j_unchecked(s, v))
}

pub fn joukowski_deriv(s: SupportInterval, v: C64) -> Result<C64> {
    if v == C64::new(0.0, 0.0) {
        return Err(Error::Pole(fmt_c(v)));
    }
    Ok(jp_unchecked(s, v))
}

#[inline]
pub(crate) fn j_unchecked(s: SupportInterval, v: C64) -> C64 {
    (v + v.inv()) * (0.5 * s.half_width()) + s.center()
}

#[inline]
pub(crate) fn jp_unchecked(s: SupportInterval, v: C64) -> C64 {
    (C64::new(1.0, 0.0) - (v * v).inv()) * (0.5 * s.half_width())
}

/// `w·√(1 − 1/w²)`: the branch of `√(w−1)·√(w+1)` that behaves like `w`
/// at infinity, with its only cut on `[−1, 1]`.
///
/// Writing it as a single square root keeps real `w` with a signed-zero
/// imaginary part on the correct sheet.
#[inline]
pub fn sqrt_pair(w: C64) -> C64 {
    w * (C64::new(1.0, 0.0) - (w * w).inv()).sqrt()
}

pub fn on_cut(s: SupportInterval, z: C64) -> bool {
    z.im.abs() <= CUT_TOL && z.re >= s.a - CUT_TOL && z.re <= s.b + CUT_TOL
}

/// Solves `J(v) = z`; the two roots multiply to one.
pub fn joukowski_inv(s: SupportInterval, z: C64, branch: Branch) -> Result<C64> {
    if on_cut(s, z) || !z.is_finite() {
        return Err(Error::OnCut(fmt_c(z), s.a, s.b));
    }
    let zeta = (z - s.center()) / s.half_width();
    let big = zeta + sqrt_pair(zeta);
    let small = big.inv();
    let (inner, outer) = if big.norm() >= small.norm() { (small, big) } else { (big, small) };
    Ok(match branch {
        Branch::Inner => inner,
        Branch::Outer => outer,
    })
}

/// Inner inverse and its derivative `1/J′(J⁻(z))`.
pub fn joukowski_inv_inner_with_deriv(s: SupportInterval, z: C64) -> Result<(C64, C64)> {
    let v = joukowski_inv(s, z, Branch::Inner)?;
    Ok((v, jp_unchecked(s, v).inv()))
}

/// Winding number of the closed polygon `curve` around `w`.
pub fn winding_number(curve: &[C64], w: C64) -> i64 {
    let n = curve.len();
    if n == 0 {
        return 0;
    }
    let mut total = 0.0;
    for j in 0..n {
        let p = curve[j] - w;
        let q = curve[(j + 1) % n] - w;
        total += (q / p).arg();
    }
    (total / (2.0 * PI)).round() as i64
}

/// Smallest distance from `w` to the polygon with vertices `curve`.
pub fn distance_to_polygon(curve: &[C64], w: C64) -> f64 {
    let n = curve.len();
    let mut best = f64::INFINITY;
    for j in 0..n {
        let p = curve[j];
        let q = curve[(j + 1) % n];
        let d = q - p;
        let len2 = d.norm_sqr();
        let t = if len2 > 0.0 { (((w - p) * d.conj()).re / len2).clamp(0.0, 1.0) } else { 0.0 };
        best = best.min((p + d * t - w).norm());
    }
    best
}

pub fn diameter(curve: &[C64]) -> f64 {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in curve {
        x0 = x0.min(p.re);
        x1 = x1.max(p.re);
        y0 = y0.min(p.im);
        y1 = y1.max(p.im);
    }
    (x1 - x0).hypot(y1 - y0)
}
