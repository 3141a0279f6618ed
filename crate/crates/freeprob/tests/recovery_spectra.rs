use freeprob::conformal::{joukowski, roots_of_unity};
use freeprob::freeconv::additive_convolve;
use freeprob::measures::*;
use freeprob::recovery::*;
use freeprob::spectra::*;
use freeprob::{ContourConfig, SupportInterval, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn circle_values(f: impl Fn(C64) -> C64, r: f64, m: usize) -> Vec<C64> {
    roots_of_unity(m).into_iter().map(|x| f(x * r)).collect()
}

#[test]
fn mp_taylor_coefficients() {
    let lambda: f64 = 0.5;
    let mp = make_marchenko_pastur(lambda).unwrap();
    let vals = circle_values(|v| mp.analytic_g(joukowski(mp.support, v).unwrap()).unwrap(), 0.9, 3000);
    let c = coefficients_from_circle(&vals, 0.9, 40).unwrap();
    for (k, g) in c.g.iter().enumerate() {
        let n = (k + 1) as i32;
        let want = if n % 2 == 1 { 1.0 } else { -1.0 } * lambda.powf((n - 2) as f64 / 2.0);
        assert!((g - want).norm() < 1e-6, "{n} {g} {want}");
    }
}

#[test]
fn round_trip_through_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g: Vec<C64> = (0..15).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let cv = CoefficientVector { r_c: 0.8, m: 15, g: g.clone(), warnings: vec![] };
    let vals = circle_values(|v| cv.eval(v), 0.8, 256);
    let back = coefficients_from_circle(&vals, 0.8, 15).unwrap();
    for (a, b) in back.g.iter().zip(&g) {
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn noise_amplification_bound() {
    let (r, m, eps) = (0.9, 2000, 1e-8);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let clean = circle_values(|v| v, r, m);
    let noisy: Vec<C64> = clean.iter().map(|v| v + C64::new(rng.random_range(-eps..eps), rng.random_range(-eps..eps))).collect();
    let a = coefficients_from_circle(&clean, r, 20).unwrap();
    let b = coefficients_from_circle(&noisy, r, 20).unwrap();
    for j in 0..20 {
        let bound = 4.0 * eps * r.powi(-(j as i32 + 1)) / (m as f64).sqrt();
        assert!((a.g[j] - b.g[j]).norm() <= bound);
    }
}

#[test]
fn semicircle_unit_series() {
    let cv = CoefficientVector { r_c: 0.9, m: 1, g: vec![C64::new(1.0, 0.0)], warnings: vec![] };
    let s = SupportInterval::new(-2.0, 2.0).unwrap();
    let grid = density_from_coefficients(&cv, s, 400, SeriesKind::Additive).unwrap();
    let mid = grid.points.iter().find(|p| p.0.abs() < 1e-12).unwrap();
    assert!((mid.1 - 0.3183099).abs() < 1e-7);
    assert!(grid.points[0].1 < 1e-2 && grid.points.last().unwrap().1 < 1e-2);
}

#[test]
fn multiplicative_division() {
    // 𝒯 of MP(0.5) sampled exactly; the recovered x·f(x) divided by x is f
    let mp = make_marchenko_pastur(0.5).unwrap();
    let vals = circle_values(|v| mp.analytic_t(joukowski(mp.support, v).unwrap()).unwrap(), 0.9, 3000);
    let c = coefficients_from_circle(&vals, 0.9, 40).unwrap();
    let grid = density_from_coefficients(&c, mp.support, 400, SeriesKind::Multiplicative).unwrap();
    let err = grid.points.iter().map(|&(x, f)| (f - mp.density(x)).abs()).fold(0.0, f64::max);
    assert!(err < 1e-4, "{err}");
    let s = SupportInterval::new(-1.0, 1.0).unwrap();
    assert!(density_from_coefficients(&c, s, 400, SeriesKind::Multiplicative).is_err());
}

#[test]
fn padding_only_adds_points() {
    let s = make_semicircle(0.0, 2.0).unwrap();
    let m = make_marchenko_pastur(0.5).unwrap();
    let r = additive_convolve(&s, &m, &ContourConfig::default()).unwrap();
    let coarse = density_from_coefficients(&r.coefficients, r.support, 50, SeriesKind::Additive).unwrap();
    let fine = density_from_coefficients(&r.coefficients, r.support, 500, SeriesKind::Additive).unwrap();
    for p in &coarse.points {
        let q = fine.points.iter().find(|q| (q.0 - p.0).abs() < 1e-12).unwrap();
        assert!((q.1 - p.1).abs() < 1e-12);
    }
}

#[test]
fn masses_near_one() {
    let pairs = [
        (make_semicircle(0.0, 2.0).unwrap(), make_semicircle(0.0, 2.0).unwrap()),
        (make_semicircle(0.0, 2.0).unwrap(), make_uniform(-4.0, 4.0).unwrap()),
        (make_marchenko_pastur(0.7).unwrap(), make_uniform(-2.0, 2.0).unwrap()),
    ];
    for (a, b) in &pairs {
        let r = additive_convolve(a, b, &ContourConfig::default()).unwrap();
        assert!((r.grid_mass() - 1.0).abs() < 2e-2);
        for g in &r.coefficients.g {
            assert!(g.im.abs() <= 1e-6 * (1.0 + g.re.abs()));
        }
    }
}

#[test]
fn spectrum_samples() {
    let s = sample_matrix_spectrum(&make_semicircle(0.0, 2.0).unwrap(), 2000, 21).unwrap();
    assert!(s.eigenvalues[0] >= -2.3 && s.eigenvalues[1999] <= 2.3);
    assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    let m = sample_matrix_spectrum(&make_marchenko_pastur(0.5).unwrap(), 2000, 22).unwrap();
    assert!((m.mean() - 1.0).abs() < 0.05);
    let again = sample_matrix_spectrum(&make_marchenko_pastur(0.5).unwrap(), 2000, 22).unwrap();
    assert_eq!(m, again);
}

#[test]
fn combination_identities() {
    let a = sample_matrix_spectrum(&make_semicircle(1.0, 2.0).unwrap(), 300, 1).unwrap();
    let b = sample_matrix_spectrum(&make_uniform(-1.0, 3.0).unwrap(), 300, 2).unwrap();
    let sum = free_combine_spectra(&a, &b, CombineOp::Add, 3).unwrap();
    assert!((sum.mean() - (a.mean() + b.mean())).abs() < 1e-12);
    // Q D_B Qᵀ alone keeps the spectrum of B
    let zero = EmpiricalSpectrum::from_values(vec![0.0; 300], 0);
    let conj = free_combine_spectra(&zero, &b, CombineOp::Add, 3).unwrap();
    for (x, y) in conj.eigenvalues.iter().zip(&b.eigenvalues) {
        assert!((x - y).abs() < 1e-9);
    }
    assert_eq!(sum, free_combine_spectra(&a, &b, CombineOp::Add, 3).unwrap());
}

#[test]
fn ks_against_own_cdf() {
    let s = make_semicircle(0.0, 2.0).unwrap();
    let m = make_marchenko_pastur(0.5).unwrap();
    let r = additive_convolve(&s, &m, &ContourConfig { grid_size: Some(2000), ..Default::default() }).unwrap();
    let cdf = cumulative(&r.closed_grid());
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let draws: Vec<f64> = (0..100_000)
        .map(|_| {
            let u: f64 = rng.random();
            let k = cdf.partition_point(|p| p.1 < u).clamp(1, cdf.len() - 1);
            let (x0, y0) = cdf[k - 1];
            let (x1, y1) = cdf[k];
            if y1 > y0 { x0 + (x1 - x0) * (u - y0) / (y1 - y0) } else { x1 }
        })
        .collect();
    let sp = EmpiricalSpectrum::from_values(draws, 99);
    assert!(ks_distance(&sp, &r) <= 0.01);
    let grid: Vec<(f64, f64)> = vec![(0.0, 0.0), (1.0, 1.0)];
    assert_eq!(ks_distance_to_cdf(&[], &grid), 0.0);
}
