//! Random density families for tests and benchmarks.
//!
//! Each density has `n` contiguous pieces starting at a random offset. A piece is
//! a polynomial with nonnegative Bernstein coefficients, so it is nonnegative on
//! its interval by construction; the whole density is then scaled to mass 1.

use crate::density::{merge_breakpoints, DensityFamily, RawDensity, RawPiece};
use crate::error::{param, Result};
use crate::poly;
use crate::rng::RandomStream;
use crate::MAX_DEGREE;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilySpec {
    pub m: usize,
    pub n: usize,
    pub degree: usize,
    pub seed: u64,
}

/// Monomial coefficients (in `x`) of the Bernstein polynomial with coefficients
/// `b` on `[lo, lo + width]`.
pub fn bernstein_to_monomial(b: &[f64], lo: f64, width: f64) -> Vec<f64> {
    let d = b.len() - 1;
    let mut local = vec![0.0; d + 1];
    for (k, &bk) in b.iter().enumerate() {
        // C(d,k) u^k (1-u)^(d-k) = C(d,k) sum_i C(d-k,i) (-1)^i u^(k+i)
        let ck = binomial(d, k);
        for i in 0..=(d - k) {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            local[k + i] += bk * ck * binomial(d - k, i) * sign;
        }
    }
    // u = (x - lo) / width
    poly::to_local(&local, -lo / width, 1.0 / width)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// One random nonnegative, mass-1 density with `n` contiguous pieces.
pub fn random_density(name: &str, n: usize, degree: usize, rng: &mut RandomStream) -> RawDensity {
    let mut lo = 3.0 * rng.uniform_open();
    let mut shapes = Vec::with_capacity(n);
    let mut mass = 0.0;
    for _ in 0..n {
        let width = 0.25 + 0.75 * rng.uniform_open();
        let b: Vec<f64> = (0..=degree).map(|_| rng.uniform_open()).collect();
        mass += width * b.iter().sum::<f64>() / (degree + 1) as f64;
        shapes.push((lo, width, b));
        lo += width;
    }
    let pieces = shapes
        .into_iter()
        .map(|(lo, width, b)| {
            let scaled: Vec<f64> = b.iter().map(|v| v / mass).collect();
            RawPiece {
                lo,
                hi: lo + width,
                coeffs: bernstein_to_monomial(&scaled, lo, width),
            }
        })
        .collect();
    RawDensity {
        name: name.to_string(),
        pieces,
    }
}

/// `m` densities named `f0, f1, ...`, merged onto a common grid. Density `j`
/// uses stream `j` of `seed`.
pub fn random_family(spec: FamilySpec) -> Result<DensityFamily> {
    if spec.m == 0 || spec.n == 0 {
        return param("random family needs m >= 1 and n >= 1");
    }
    if spec.degree > MAX_DEGREE {
        return param(format!("degree {} exceeds the cap of {MAX_DEGREE}", spec.degree));
    }
    let raw: Vec<RawDensity> = (0..spec.m)
        .map(|j| {
            let mut rng = RandomStream::new(spec.seed, j as u64);
            random_density(&format!("f{j}"), spec.n, spec.degree, &mut rng)
        })
        .collect();
    merge_breakpoints(&raw, spec.degree)
}
