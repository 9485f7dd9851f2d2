//! Approximate draws from `CI_d(0, 1)`, the law of `∫_0^1 (1, x, ..., x^d) dL`.
//!
//! No exact sampler is known for `d >= 2`. The r-approximation replaces the
//! integral by a right-endpoint Riemann sum driven by `r` independent
//! `C(0, 1/r)` increments:
//!
//! ```text
//! (X_0, ..., X_d) = sum_{j=1}^r Z_j (1, j/r, ..., (j/r)^d)
//! ```
//!
//! For any coefficient vector `a`, `a . X` is then exactly Cauchy with scale
//! `(1/r) sum_j |p(j/r)|` ([`riemann_abs_scale`]), which is within a factor
//! `1 +- c d^2 / r` of `∫_0^1 |p|`. The constant `c` exists but is not
//! explicit, so [`calibrate_c`] measures it.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::poly;
use crate::rng::{standard_cauchy, RandomStream};
use crate::MAX_DEGREE;

/// Calibrated `c` (d <= 16, target 1%, 200 trials per degree, seed 0,
/// safety factor 2), as produced by `l1sketch calibrate`.
pub const DEFAULT_C_CONSTANT: f64 = 2.02;

/// Multiplier applied to the largest per-degree constant.
pub const CALIBRATION_SAFETY_FACTOR: f64 = 2.0;

/// Polynomials with `∫_0^1 |p|` below this are redrawn during calibration.
pub const MIN_ABS_INTEGRAL: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct CidSample {
    pub components: Vec<f64>,
}

impl CidSample {
    pub fn degree(&self) -> usize {
        self.components.len() - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ApproxConfig {
    pub degree: usize,
    pub epsilon_integration: f64,
    pub c_constant: f64,
    pub r: usize,
}

impl ApproxConfig {
    /// `r = ceil(c d^2 / eps)`, at least 1.
    pub fn new(degree: usize, epsilon_integration: f64, c_constant: f64) -> Result<Self> {
        if degree > MAX_DEGREE {
            return param(format!("degree {degree} exceeds the cap of {MAX_DEGREE}"));
        }
        if !(c_constant > 0.0 && c_constant.is_finite()) {
            return param(format!("c must be positive and finite, got {c_constant}"));
        }
        if !(epsilon_integration > 0.0 && epsilon_integration.is_finite()) {
            return param(format!("integration epsilon must be positive, got {epsilon_integration}"));
        }
        let r = (c_constant * (degree * degree) as f64 / epsilon_integration).ceil();
        if r > u32::MAX as f64 {
            return param(format!("r = {r} is too large; raise epsilon"));
        }
        Ok(ApproxConfig {
            degree,
            epsilon_integration,
            c_constant,
            r: (r as usize).max(1),
        })
    }

    /// A configuration with an explicit `r`; `epsilon_integration` is set to
    /// the implied `c d^2 / r` under [`DEFAULT_C_CONSTANT`].
    pub fn with_r(degree: usize, r: usize) -> Result<Self> {
        if degree > MAX_DEGREE {
            return param(format!("degree {degree} exceeds the cap of {MAX_DEGREE}"));
        }
        if r == 0 {
            return param("r must be at least 1");
        }
        Ok(ApproxConfig {
            degree,
            epsilon_integration: DEFAULT_C_CONSTANT * (degree * degree) as f64 / r as f64,
            c_constant: DEFAULT_C_CONSTANT,
            r,
        })
    }
}

/// Adds one r-approximation draw of `CI_d(0, 1)` into `out` (length `degree + 1`).
pub(crate) fn accumulate_unit(r: usize, rng: &mut RandomStream, out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    let inv_r = 1.0 / r as f64;
    for j in 1..=r {
        let z = inv_r * standard_cauchy(rng);
        let node = j as f64 * inv_r;
        let mut power = 1.0;
        for v in out.iter_mut() {
            *v += z * power;
            power *= node;
        }
    }
}

pub fn sample_cid_approx_unit(cfg: &ApproxConfig, rng: &mut RandomStream) -> CidSample {
    let mut components = vec![0.0; cfg.degree + 1];
    accumulate_unit(cfg.r, rng, &mut components);
    CidSample { components }
}

/// Pascal's triangle up to a fixed degree.
#[derive(Clone, Debug)]
pub(crate) struct Binomials {
    rows: Vec<Vec<f64>>,
}

impl Binomials {
    pub(crate) fn new(degree: usize) -> Self {
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(degree + 1);
        for k in 0..=degree {
            let mut row = vec![1.0; k + 1];
            for j in 1..k {
                row[j] = rows[k - 1][j - 1] + rows[k - 1][j];
            }
            rows.push(row);
        }
        Binomials { rows }
    }
}

/// `X_k = w sum_{j<=k} C(k, j) a^{k-j} w^j Z_j` with `w = b - a`.
pub(crate) fn rescale_into(z: &[f64], a: f64, width: f64, binom: &Binomials, out: &mut [f64]) {
    let d = z.len() - 1;
    let mut a_pow = [0.0; MAX_DEGREE + 1];
    let mut w_pow = [0.0; MAX_DEGREE + 1];
    a_pow[0] = 1.0;
    w_pow[0] = 1.0;
    for i in 1..=d {
        a_pow[i] = a_pow[i - 1] * a;
        w_pow[i] = w_pow[i - 1] * width;
    }
    for k in 0..=d {
        let row = &binom.rows[k];
        let mut acc = 0.0;
        for j in 0..=k {
            acc += row[j] * a_pow[k - j] * w_pow[j] * z[j];
        }
        out[k] = width * acc;
    }
}

/// Maps a `CI_d(0, 1)` draw to `CI_d(a, b)` by expanding `(a + (b - a) u)^k`.
pub fn rescale_cid(z: &CidSample, a: f64, b: f64) -> Result<CidSample> {
    if !(b > a) {
        return param(format!("rescale needs b > a, got a = {a}, b = {b}"));
    }
    let d = z.degree();
    if d > MAX_DEGREE {
        return param(format!("degree {d} exceeds the cap of {MAX_DEGREE}"));
    }
    let mut components = vec![0.0; d + 1];
    rescale_into(&z.components, a, b - a, &Binomials::new(d), &mut components);
    Ok(CidSample { components })
}

/// `(1/r) sum_{j=1}^r |p(j/r)|`: the exact Cauchy scale of `a . X` under the
/// r-approximation.
pub fn riemann_abs_scale(coeffs: &[f64], r: usize) -> f64 {
    let r = r.max(1);
    let inv_r = 1.0 / r as f64;
    (1..=r).map(|j| poly::horner(coeffs, j as f64 * inv_r).abs()).sum::<f64>() * inv_r
}

/// A random degree-`d` test polynomial (coefficients uniform on `[-1, 1]`) with
/// `∫_0^1 |p| >= MIN_ABS_INTEGRAL`, returned with that integral.
pub fn random_test_polynomial(degree: usize, rng: &mut RandomStream) -> (Vec<f64>, f64) {
    loop {
        let coeffs: Vec<f64> = (0..=degree).map(|_| 2.0 * rng.uniform_open() - 1.0).collect();
        let exact = poly::abs_integral(&coeffs, 0.0, 1.0);
        if exact >= MIN_ABS_INTEGRAL {
            return (coeffs, exact);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeCalibration {
    /// Smallest `r` meeting the target on every trial polynomial.
    pub r: usize,
    /// `r * target_eps / d^2` (0 for `d = 0`).
    pub c_d: f64,
    /// Largest relative Riemann error among the trials at that `r`.
    pub max_rel_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Calibration {
    pub c: f64,
    pub target_eps: f64,
    pub trials: usize,
    pub seed: u64,
    pub safety_factor: f64,
    pub per_degree: BTreeMap<usize, DegreeCalibration>,
}

fn trial_stream(seed: u64, degree: usize, trial: usize) -> RandomStream {
    RandomStream::new(seed, ((degree as u64) << 32) | trial as u64)
}

fn max_rel_error(polys: &[(Vec<f64>, f64)], r: usize) -> f64 {
    polys
        .par_iter()
        .map(|(p, exact)| (riemann_abs_scale(p, r) - exact).abs() / exact)
        .reduce(|| 0.0, f64::max)
}

/// Empirical `c` such that `r = ceil(c d^2 / eps)` keeps the Riemann scale within
/// `1 +- eps` of `∫_0^1 |p|`.
///
/// For each degree `1..=d_max`, `trials` random polynomials are drawn (one
/// substream per trial) and the smallest passing `r` is found by doubling and
/// bisection. The result is the largest `r * eps / d^2`, times
/// [`CALIBRATION_SAFETY_FACTOR`].
pub fn calibrate_c(d_max: usize, target_eps: f64, trials: usize, seed: u64) -> Result<Calibration> {
    if d_max == 0 || d_max > MAX_DEGREE {
        return param(format!("d_max must lie in 1..={MAX_DEGREE}, got {d_max}"));
    }
    if !(target_eps > 0.0 && target_eps < 1.0) {
        return param(format!("target epsilon must lie in (0, 1), got {target_eps}"));
    }
    if trials == 0 {
        return param("calibration needs at least one trial");
    }
    let mut per_degree = BTreeMap::new();
    // constant polynomials are integrated exactly by any Riemann sum
    per_degree.insert(
        0,
        DegreeCalibration {
            r: 1,
            c_d: 0.0,
            max_rel_error: 0.0,
        },
    );
    let mut worst: f64 = 0.0;
    for d in 1..=d_max {
        let polys: Vec<(Vec<f64>, f64)> = (0..trials)
            .into_par_iter()
            .map(|i| random_test_polynomial(d, &mut trial_stream(seed, d, i)))
            .collect();
        let passes = |r: usize| max_rel_error(&polys, r) <= target_eps;

        let mut hi = 1usize;
        while !passes(hi) {
            if hi >= 1 << 40 {
                return Err(Error::Internal(format!("calibration did not converge for degree {d}")));
            }
            hi *= 2;
        }
        let mut lo = hi / 2;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if passes(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let c_d = hi as f64 * target_eps / (d * d) as f64;
        worst = worst.max(c_d);
        per_degree.insert(
            d,
            DegreeCalibration {
                r: hi,
                c_d,
                max_rel_error: max_rel_error(&polys, hi),
            },
        );
    }
    Ok(Calibration {
        c: CALIBRATION_SAFETY_FACTOR * worst,
        target_eps,
        trials,
        seed,
        safety_factor: CALIBRATION_SAFETY_FACTOR,
        per_degree,
    })
}
