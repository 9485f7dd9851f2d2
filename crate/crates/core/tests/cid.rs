mod common;

use l1sketch::cid::{
    calibrate_c, random_test_polynomial, rescale_cid, riemann_abs_scale, sample_cid_approx_unit, ApproxConfig,
    DEFAULT_C_CONSTANT,
};
use l1sketch::poly;
use l1sketch::rng::RandomStream;

use common::{ks_cauchy, median_abs};

fn draws(d: usize, r: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let cfg = ApproxConfig::with_r(d, r).unwrap();
    let mut rng = RandomStream::new(seed, 0);
    (0..n).map(|_| sample_cid_approx_unit(&cfg, &mut rng).components).collect()
}

#[test]
fn frozen_default_reproduces() {
    let cal = calibrate_c(16, 0.01, 200, 0).unwrap();
    assert_eq!(cal.c, DEFAULT_C_CONSTANT);
    let small = calibrate_c(5, 0.01, 200, 0).unwrap();
    assert!(small.c.is_finite() && small.c <= 64.0);
}

#[test]
fn projection_law_is_riemann_scaled_cauchy() {
    let (r, coeffs) = (50, [0.4, -2.0, 1.5, 0.7]);
    let scale = riemann_abs_scale(&coeffs, r);
    let z = draws(3, r, 100_000, 51);
    let proj: Vec<f64> = z.iter().map(|x| x.iter().zip(&coeffs).map(|(a, b)| a * b).sum()).collect();
    let ks = ks_cauchy(proj, scale);
    assert!(ks < 0.01, "KS {ks} at scale {scale}");
}

#[test]
fn degree_zero_is_exact() {
    let z = draws(0, 7, 100_000, 52);
    let ks = ks_cauchy(z.iter().map(|x| x[0]).collect(), 1.0);
    assert!(ks < 0.01, "KS {ks}");
}

#[test]
fn degree_one_slope_component() {
    let z = draws(1, 1000, 50_000, 53);
    let med = median_abs(&z.iter().map(|x| x[1]).collect::<Vec<_>>());
    assert!((med / 0.5005 - 1.0).abs() < 0.03, "median {med}");
}

#[test]
fn degree_two_rescaled_top_component() {
    let cfg = ApproxConfig::with_r(2, 10_000).unwrap();
    let mut rng = RandomStream::new(54, 0);
    let top: Vec<f64> = (0..25_000)
        .map(|_| rescale_cid(&sample_cid_approx_unit(&cfg, &mut rng), 0.0, 2.0).unwrap().components[2])
        .collect();
    let med = median_abs(&top);
    assert!((med / (8.0 / 3.0) - 1.0).abs() < 0.03, "median {med}");
}

#[test]
fn interpolation_holds_on_held_out_polynomials() {
    let eps = 0.05;
    for d in 1..=5 {
        let r = ApproxConfig::new(d, eps, DEFAULT_C_CONSTANT).unwrap().r;
        let mut rng = RandomStream::new(0xfeed, d as u64);
        for _ in 0..500 {
            let (p, exact) = random_test_polynomial(d, &mut rng);
            let riemann = riemann_abs_scale(&p, r);
            assert!(
                riemann >= (1.0 - eps) * exact && riemann <= (1.0 + eps) * exact,
                "d {d}, r {r}: {riemann} vs {exact} for {p:?}"
            );
        }
    }
}

#[test]
fn linear_bound_holds_for_every_r() {
    let mut rng = RandomStream::new(0xbeef, 0);
    for _ in 0..1000 {
        let (p, exact) = random_test_polynomial(1, &mut rng);
        for r in [10, 100, 1000] {
            let rel = (riemann_abs_scale(&p, r) - exact).abs() / exact;
            assert!(rel <= DEFAULT_C_CONSTANT / r as f64, "r {r}: {rel} for {p:?}");
        }
    }
}

#[test]
fn bernstein_ratio_is_bounded() {
    for d in 1..=5 {
        let mut rng = RandomStream::new(0xabc, d as u64);
        let mut max_ratio: f64 = 0.0;
        for _ in 0..1000 {
            let (p, exact) = random_test_polynomial(d, &mut rng);
            let dp = poly::derivative(&p);
            max_ratio = max_ratio.max(poly::abs_integral(&dp, 0.0, 1.0) / exact);
        }
        let bound = DEFAULT_C_CONSTANT * (d * d) as f64;
        println!("d {d}: max ∫|p'|/∫|p| = {max_ratio:.3}, c d^2 = {bound:.3}");
        // the Riemann error is at most ∫|p'| / (2r)
        assert!(max_ratio / 2.0 <= bound, "d {d}: ratio {max_ratio}");
    }
}
