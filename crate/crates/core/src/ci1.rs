//! The law of `(∫_0^1 1 dL, ∫_0^1 x dL)` for a Cauchy motion `L`.
//!
//! The density has a closed form in terms of the complex number
//! `Q = 1 - 2i x0 + x0^2 + 4i x1`:
//!
//! ```text
//! f(x0, x1) = (4/pi^2) / ((1 + x0^2)^2 + (2 x0 - 4 x1)^2)
//!           + (2/pi^2) Re( atan(i sqrt(Q) / (x0 - 2 x1)) / Q^{3/2} )        x0 != 2 x1
//! f(x0, x1) = (4/pi^2) / (1 + x0^2)^2 + 1 / (pi (1 + x0^2)^{3/2})          x0 == 2 x1
//! ```
//!
//! All complex functions use principal branches: `ln` with argument in
//! `(-pi, pi]`, `atan(z) = (i/2)(ln(1 - iz) - ln(1 + iz))`,
//! `Q^{3/2} = exp(1.5 ln Q)`.
//!
//! Exact draws come from rejection sampling under the bivariate Student-t
//! envelope `g(x) = (1/pi)(1 + x0^2 + (2 x1 - x0)^2)^{-3/2}`, which dominates
//! `f` with `f <= (25/pi) g`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{param, Error, Result};
use crate::rng::{sample_chi2_1, sample_std_normal, RandomStream};

/// Rejection constant: `f <= (ENVELOPE_CONSTANT / pi) * g` everywhere.
pub const ENVELOPE_CONSTANT: f64 = 25.0;

/// Proposals allowed per draw before the sampler reports a domination bug.
pub const MAX_REJECTION_ITERATIONS: usize = 10_000;

const FOUR_OVER_PI2: f64 = 4.0 / (PI * PI);
const TWO_OVER_PI2: f64 = 2.0 / (PI * PI);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ci1Sample {
    pub x0: f64,
    pub x1: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DensityBranch {
    Generic,
    Diagonal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ci1DensityTrace {
    pub q: Complex64,
    pub branch: DensityBranch,
    pub value: f64,
}

/// Principal-branch complex arctangent, `(i/2)(ln(1 - iz) - ln(1 + iz))`.
pub fn complex_atan(z: Complex64) -> Complex64 {
    let iz = Complex64::i() * z;
    let one = Complex64::new(1.0, 0.0);
    Complex64::new(0.0, 0.5) * ((one - iz).ln() - (one + iz).ln())
}

/// Half-width of the band around `x0 = 2 x1` evaluated with the diagonal formula.
#[inline]
pub fn diagonal_tolerance(x0: f64) -> f64 {
    1e-8 * (1.0 + x0.abs())
}

#[inline]
fn q_of(x0: f64, x1: f64) -> Complex64 {
    Complex64::new(1.0 + x0 * x0, 4.0 * x1 - 2.0 * x0)
}

/// The generic closed form. Undefined on `x0 = 2 x1`.
pub fn ci1_density_generic(x0: f64, x1: f64) -> f64 {
    let q = q_of(x0, x1);
    let t = 2.0 * x0 - 4.0 * x1;
    let s = 1.0 + x0 * x0;
    // 1 + 6x0^2 + x0^4 - 16 x0 x1 + 16 x1^2, written as a sum of squares
    let rational = FOUR_OVER_PI2 / (s * s + t * t);
    let z = Complex64::i() * q.sqrt() / (x0 - 2.0 * x1);
    let q32 = (1.5 * q.ln()).exp();
    rational + TWO_OVER_PI2 * (complex_atan(z) / q32).re
}

/// The density on the line `x0 = 2 x1`.
pub fn ci1_density_diagonal(x0: f64) -> f64 {
    let s = 1.0 + x0 * x0;
    FOUR_OVER_PI2 / (s * s) + 1.0 / (PI * s * s.sqrt())
}

pub fn ci1_density_traced(x0: f64, x1: f64) -> Ci1DensityTrace {
    let q = q_of(x0, x1);
    if (x0 - 2.0 * x1).abs() <= diagonal_tolerance(x0) {
        Ci1DensityTrace {
            q,
            branch: DensityBranch::Diagonal,
            value: ci1_density_diagonal(x0),
        }
    } else {
        Ci1DensityTrace {
            q,
            branch: DensityBranch::Generic,
            value: ci1_density_generic(x0, x1).max(0.0),
        }
    }
}

/// Density of `CI_1(0, 1)` at `(x0, x1)`.
#[inline]
pub fn ci1_density(x0: f64, x1: f64) -> f64 {
    ci1_density_traced(x0, x1).value
}

/// Bivariate Student-t (one degree of freedom) envelope density.
#[inline]
pub fn student_envelope_density(x0: f64, x1: f64) -> f64 {
    let v = 2.0 * x1 - x0;
    let r = 1.0 + x0 * x0 + v * v;
    1.0 / (PI * r * r.sqrt())
}

/// Draw from the envelope.
///
/// With `u = x0` and `v = 2 x1 - x0` the envelope is the standard bivariate
/// t density `(1/2pi)(1 + u^2 + v^2)^{-3/2}`, sampled as `(y1, y2) / sqrt(w)`.
pub fn sample_student_envelope(rng: &mut RandomStream) -> Ci1Sample {
    let y1 = sample_std_normal(rng);
    let y2 = sample_std_normal(rng);
    let mut w = sample_chi2_1(rng);
    while w == 0.0 {
        w = sample_chi2_1(rng);
    }
    let s = w.sqrt();
    let (u, v) = (y1 / s, y2 / s);
    Ci1Sample {
        x0: u,
        x1: 0.5 * (u + v),
    }
}

/// One proposal and its accept/reject decision.
pub fn rejection_step(rng: &mut RandomStream) -> (Ci1Sample, bool) {
    let z = sample_student_envelope(rng);
    let u = rng.uniform_open();
    let bound = ENVELOPE_CONSTANT / PI * student_envelope_density(z.x0, z.x1);
    let accept = u * bound <= ci1_density(z.x0, z.x1);
    (z, accept)
}

/// Exact draw from `CI_1(0, 1)` together with the number of proposals used.
pub fn sample_ci1_unit_counted(rng: &mut RandomStream) -> Result<(Ci1Sample, usize)> {
    for attempt in 1..=MAX_REJECTION_ITERATIONS {
        let (z, accept) = rejection_step(rng);
        if accept {
            return Ok((z, attempt));
        }
    }
    Err(Error::Internal(format!(
        "CI1 rejection sampler exceeded {MAX_REJECTION_ITERATIONS} proposals (seed {}, stream {})",
        rng.seed(),
        rng.stream_id()
    )))
}

/// Exact draw from `CI_1(0, 1)`; about `25/pi` proposals on average.
pub fn sample_ci1_unit(rng: &mut RandomStream) -> Result<Ci1Sample> {
    sample_ci1_unit_counted(rng).map(|(z, _)| z)
}

/// Maps a `CI_1(0, 1)` draw to `CI_1(a, b)`.
///
/// With `x = a + (b - a) u`: `∫_a^b 1 dL = (b - a) Z0` and
/// `∫_a^b x dL = (b - a)(a Z0 + (b - a) Z1)`.
pub fn rescale_ci1(z: Ci1Sample, a: f64, b: f64) -> Result<Ci1Sample> {
    if !(b > a) {
        return param(format!("rescale needs b > a, got a = {a}, b = {b}"));
    }
    Ok(rescale_ci1_unchecked(z, a, b - a))
}

#[inline]
pub(crate) fn rescale_ci1_unchecked(z: Ci1Sample, a: f64, width: f64) -> Ci1Sample {
    Ci1Sample {
        x0: width * z.x0,
        x1: width * (a * z.x0 + width * z.x1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn density_at_origin() {
        assert_relative_eq!(ci1_density(0.0, 0.0), 4.0 / (PI * PI) + 1.0 / PI, epsilon = 1e-15);
        assert_relative_eq!(ci1_density(0.0, 0.0), 0.723595, epsilon = 1e-6);
    }

    #[test]
    fn density_on_diagonal() {
        let expect = 1.0 / (PI * PI) + 1.0 / (2.0 * 2f64.sqrt() * PI);
        assert_relative_eq!(ci1_density(1.0, 0.5), expect, epsilon = 1e-15);
        assert_relative_eq!(ci1_density(1.0, 0.5), 0.213861, epsilon = 1e-6);
        assert_eq!(ci1_density_traced(1.0, 0.5).branch, DensityBranch::Diagonal);
        assert_eq!(ci1_density_traced(1.0, 0.6).branch, DensityBranch::Generic);
    }

    #[test]
    fn density_is_even() {
        for &(a, b) in &[(0.3, 0.1), (2.0, 3.0), (-5.0, 1.0), (0.01, 1.0), (40.0, -7.0)] {
            assert_relative_eq!(ci1_density(a, b), ci1_density(-a, -b), max_relative = 1e-12);
        }
    }

    #[test]
    fn trace_q() {
        let t = ci1_density_traced(0.5, 0.25 + 1.0);
        assert_eq!(t.q, c(1.25, 4.0 * 1.25 - 1.0));
        assert!(t.value >= 0.0);
    }

    #[test]
    fn envelope_values() {
        assert_relative_eq!(student_envelope_density(0.0, 0.0), 1.0 / PI, epsilon = 1e-15);
        assert_relative_eq!(student_envelope_density(1.0, 0.5), 2f64.powf(-1.5) / PI, epsilon = 1e-15);
        assert_relative_eq!(student_envelope_density(1.0, 0.5), 0.112540, epsilon = 1e-6);
    }

    #[test]
    fn atan_is_inverse_of_tan() {
        for z in [c(0.3, 0.2), c(-2.0, 0.5), c(0.1, -3.0), c(5.0, 5.0)] {
            let w = complex_atan(z);
            assert!((w.tan() - z).norm() < 1e-12 * (1.0 + z.norm()));
            assert!(w.re > -PI / 2.0 && w.re < PI / 2.0);
        }
    }

    #[test]
    fn atan_addition_inside_unit_disk() {
        let pairs = [(c(0.3, 0.2), c(-0.5, 0.1)), (c(0.7, -0.6), c(0.2, 0.9)), (c(-0.1, 0.0), c(0.0, -0.95))];
        for (x, y) in pairs {
            assert!(x.norm() < 1.0 && y.norm() < 1.0);
            let lhs = complex_atan(x) + complex_atan(y);
            let rhs = complex_atan((x + y) / (c(1.0, 0.0) - x * y));
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn atan_conjugate_sum_outside_unit_disk() {
        for &(a, b) in &[(0.5f64, 1.2f64), (2.0, 0.0), (1.0, 3.0), (0.1, 1.5)] {
            assert!(a >= 0.0 && a * a + b * b > 1.0);
            let lhs = complex_atan(c(a, b)) + complex_atan(c(a, -b));
            let rhs = PI + (2.0 * a / (1.0 - a * a - b * b)).atan();
            assert!((lhs - c(rhs, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn atan_conjugate_difference() {
        for &(a, b) in &[(0.5f64, 1.2f64), (0.0, 0.3), (3.0, -2.0), (1.0, 0.0)] {
            let lhs = complex_atan(c(a, b)) - complex_atan(c(a, -b));
            let rhs = complex_atan(c(0.0, 2.0 * b / (1.0 + a * a + b * b)));
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn atan_matches_library() {
        for z in [c(0.3, 0.2), c(-2.0, 0.5), c(0.1, -3.0), c(5.0, 5.0), c(0.0, 0.5)] {
            assert!((complex_atan(z) - z.atan()).norm() < 1e-12);
        }
    }

    #[test]
    fn rescale_identity_and_errors() {
        let z = Ci1Sample { x0: 0.7, x1: -1.3 };
        assert_eq!(rescale_ci1(z, 0.0, 1.0).unwrap(), z);
        assert!(rescale_ci1(z, 1.0, 1.0).is_err());
        assert!(rescale_ci1(z, 2.0, 1.0).is_err());
        let r = rescale_ci1(z, 3.0, 4.0).unwrap();
        assert_relative_eq!(r.x0, 0.7);
        assert_relative_eq!(r.x1, 3.0 * 0.7 - 1.3);
    }

    #[test]
    fn sampler_is_deterministic() {
        let draw = |stream| {
            let mut rng = RandomStream::new(17, stream);
            (0..100).map(|_| sample_ci1_unit(&mut rng).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(draw(0), draw(0));
        assert_ne!(draw(0), draw(1));
    }
}
