use std::f64::consts::PI;

use freeprob::conformal::{joukowski_inv, roots_of_unity, Branch};
use freeprob::contour::{g_additive, t_multiplicative};
use freeprob::freeconv::*;
use freeprob::measures::*;
use freeprob::spectra::sample_matrix_spectrum;
use freeprob::{ContourConfig, SupportInterval, C64};

#[test]
fn semicircle_sum_density_and_support() {
    let s = make_semicircle(0.0, 2.0).unwrap();
    let r = additive_convolve(&s, &s, &ContourConfig { m_coeffs: 10, ..Default::default() }).unwrap();
    assert!((r.xi_b - 0.5f64.sqrt()).abs() < 1e-9);
    assert!((r.support.b - 8f64.sqrt()).abs() < 1e-9);
    assert!((r.density_at(0.0) - 8f64.sqrt() / (4.0 * PI)).abs() < 1e-10);
    assert!((r.density_at(0.0) - 0.2250791).abs() < 1e-7);
    assert!(r.xi_a < 0.0 && 0.0 < r.xi_b && 0.0 < r.r_c && r.r_c < 1.0 && r.r_b > 0.0);
    assert!((r.grid_mass() - 1.0).abs() < 2e-2);
    assert!(r.warnings.is_empty());
}

#[test]
fn quadrature_plateau() {
    let s = make_semicircle(0.0, 2.0).unwrap().without_closed_forms();
    let a = additive_convolve(&s, &s, &ContourConfig { n_quad: Some(400), ..Default::default() }).unwrap();
    let b = additive_convolve(&s, &s, &ContourConfig { n_quad: Some(800), ..Default::default() }).unwrap();
    let d = a.density_grid.iter().zip(&b.density_grid).map(|(p, q)| (p.1 - q.1).abs()).fold(0.0, f64::max);
    assert!(d <= 1e-10, "{d}");
}

#[test]
fn more_coefficients_change_little() {
    let s = make_semicircle(0.0, 2.0).unwrap();
    let m = make_marchenko_pastur(0.5).unwrap();
    let a = additive_convolve(&s, &m, &ContourConfig { m_coeffs: 20, grid_size: Some(400), ..Default::default() }).unwrap();
    let b = additive_convolve(&s, &m, &ContourConfig { m_coeffs: 25, grid_size: Some(400), ..Default::default() }).unwrap();
    let d = a.density_grid.iter().zip(&b.density_grid).map(|(p, q)| (p.1 - q.1).abs()).fold(0.0, f64::max);
    assert!(d <= 1e-6, "{d}");
}

#[test]
fn uniform_sum_support_and_mass() {
    let s = make_semicircle(0.0, 2.0).unwrap();
    let u = make_uniform(-4.0, 4.0).unwrap().without_closed_forms();
    let r = additive_convolve(&s, &u, &ContourConfig::default()).unwrap();
    let want = 0.25 * (4.0 + 17f64.sqrt()).ln() + 17f64.sqrt();
    assert!((r.support.b - want).abs() < 1e-5);
    assert!((r.support.a + r.support.b).abs() < 1e-8);
    assert!((r.grid_mass() - 1.0).abs() < 1e-3);
}

#[test]
fn guarded_fallback_warns() {
    let s = make_semicircle(0.0, 2.0).unwrap();
    let u = make_uniform(-10.0, 10.0).unwrap();
    let r = additive_convolve(&s, &u, &ContourConfig::default()).unwrap();
    assert_eq!(r.warnings.iter().filter(|w| w.contains("no sign change")).count(), 2);
    let r = additive_convolve(&s, &u, &ContourConfig { epsilon: 0.02, ..Default::default() }).unwrap();
    assert!((r.support.b - 10.3497).abs() < 1e-3);
}

#[test]
fn sum_with_quartic_density() {
    // G′ vanishes at ±i, so r_B is small and only a short series is usable
    let r3 = 3f64.sqrt();
    let f = std::sync::Arc::new(move |x: f64| 5.0 * r3 / 144.0 * (x * x + 1.0).powi(2));
    let q = make_custom(f, SupportInterval::new(-r3, r3).unwrap(), RegularityClass::Other).unwrap();
    let r = additive_convolve(&make_semicircle(0.0, 2.0).unwrap(), &q, &ContourConfig::default()).unwrap();
    assert!(r.warnings.is_empty(), "{:?}", r.warnings);
    assert!(r.r_b < 0.3);
    assert!((r.grid_mass() - 1.0).abs() < 1e-2);
    assert!(r.mean().abs() < 1e-8);
    // free variances add: 1 + 296/168
    assert!((r.variance() - (1.0 + 296.0 / 168.0)).abs() < 1e-4, "{}", r.variance());
}

#[test]
fn mean_adds() {
    let mp = make_marchenko_pastur(0.7).unwrap();
    let u = make_uniform(-2.0, 2.0).unwrap();
    let r = additive_convolve(&mp, &u, &ContourConfig::default()).unwrap();
    assert!((r.mean() - (moment(&mp, 1) + moment(&u, 1))).abs() < 1e-6);
}

#[test]
fn products_of_positive_measures() {
    let s3 = make_semicircle(3.0, 2.0).unwrap();
    let mp = make_marchenko_pastur(0.2).unwrap();
    let r = multiplicative_convolve(&s3, &mp, &ContourConfig::default()).unwrap();
    assert!(r.density_grid.iter().all(|p| p.1 >= 0.0));
    assert!((r.grid_mass() - 1.0).abs() < 1e-2);
    assert!(r.max_clamp < 1e-3);
    // all eigenvalues of the matrix model fall inside the computed support
    let eig = sample_matrix_spectrum(&s3, 2000, 5).unwrap();
    let emp = sample_matrix_spectrum(&mp, 2000, 6).unwrap();
    let sp = freeprob::spectra::free_combine_spectra(&eig, &emp, freeprob::spectra::CombineOp::Mul, 7).unwrap();
    let slack = 0.05 * (r.support.b - r.support.a);
    assert!(sp.eigenvalues[0] > r.support.a - slack && sp.eigenvalues[1999] < r.support.b + slack);

    let q = multiplicative_convolve(&s3, &s3, &ContourConfig::default()).unwrap();
    assert!(q.support.a > 0.0);
    assert!((q.mean() - 9.0).abs() < 1e-4);
}

#[test]
fn two_point_masses_fall_back() {
    let a = make_atomic(&[(2.0, 1.0)]).unwrap();
    let cfg = ContourConfig::default();
    let (t1, t2) = multiplicative_tables(&a, &a, &cfg).unwrap();
    let s = find_support_multiplicative(&t1, &t2, &cfg).unwrap();
    assert_eq!(s.warnings.len(), 2);
}

#[test]
fn radius_search() {
    let sm = make_semicircle(0.0, 2.0).unwrap();
    let cfg = ContourConfig::default();
    let (t1, t2) = additive_tables(&sm, &sm, &cfg).unwrap();
    let g = |w: C64| g_additive(&t1, &t2, w);
    assert!((g(C64::new(0.0, 0.1)).unwrap() - C64::new(0.0, -9.8)).norm() < 1e-8);
    let start = 0.95 * t1.inscribed_radius().min(0.5f64.sqrt());
    let crit = |r: f64| circle_passes(&g, r, 64);
    let r_b = find_image_radius(&crit, start, &cfg).unwrap();
    assert!(r_b <= start);
    assert!(crit(r_b) && crit(r_b / 2.0));
    assert!(matches!(find_image_radius(&|_| false, 1.0, &cfg), Err(freeprob::Error::ContourTooSmall(_))));
}

#[test]
fn every_final_circle_point_passes() {
    let s3 = make_semicircle(3.0, 2.0).unwrap();
    let mp = make_marchenko_pastur(0.2).unwrap();
    let cfg = ContourConfig::default();
    let r = multiplicative_convolve(&s3, &mp, &cfg).unwrap();
    let (t1, t2) = multiplicative_tables(&s3, &mp, &cfg).unwrap();
    assert!(circle_passes(&|w| t_multiplicative(&t1, &t2, w), r.r_b, 64));
}

#[test]
fn inner_radius_of_semicircle_curve() {
    let s = SupportInterval::new(-8f64.sqrt(), 8f64.sqrt()).unwrap();
    let cfg = ContourConfig::default();
    let gamma: Vec<C64> = roots_of_unity(4096).into_iter().map(|x| 2.0 * x * 0.3 + (x * 0.3).inv()).collect();
    let r_c = choose_inner_radius(&gamma, s, &cfg).unwrap();
    // J⁻ of 2w + 1/w is √2·w, so the inner curve is the circle of radius 0.3√2
    let brute = gamma.iter().map(|g| joukowski_inv(s, *g, Branch::Inner).unwrap().norm()).fold(f64::INFINITY, f64::min);
    assert!((brute - 0.3 * 2f64.sqrt()).abs() < 1e-12);
    assert!((r_c - 0.95 * brute).abs() < 1e-15);
    assert!(r_c < 1.0);
}

#[test]
fn bad_configs() {
    let s = make_semicircle(0.0, 2.0).unwrap();
    for cfg in [
        ContourConfig { epsilon: 0.0, ..Default::default() },
        ContourConfig { r_a: Some(1.2), ..Default::default() },
        ContourConfig { m_coeffs: 0, ..Default::default() },
        ContourConfig { support_tol: -1.0, ..Default::default() },
    ] {
        assert!(additive_convolve(&s, &s, &cfg).is_err());
    }
}
