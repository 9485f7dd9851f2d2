//! Dense univariate polynomials in the monomial basis.
//!
//! Coefficients are stored lowest degree first, `[c0, c1, ..., cd]`. Interval
//! work is done in a local variable `u in [0, 1]` (`x = lo + width * u`), which
//! keeps the coefficients well scaled regardless of where the interval sits.

/// Evaluates `sum c_k x^k` by Horner's rule.
#[inline]
pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Coefficients of `q(u) = p(lo + width * u)`.
pub fn to_local(coeffs: &[f64], lo: f64, width: f64) -> Vec<f64> {
    // Taylor shift by repeated synthetic division, then scale.
    let mut shifted = coeffs.to_vec();
    let n = shifted.len();
    for i in 0..n {
        for k in (i..n.saturating_sub(1)).rev() {
            shifted[k] += lo * shifted[k + 1];
        }
    }
    let mut scale = 1.0;
    for c in shifted.iter_mut() {
        *c *= scale;
        scale *= width;
    }
    shifted
}

/// Antiderivative of `coeffs` evaluated at `x`, with zero constant term.
#[inline]
pub fn antiderivative_at(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for (k, &c) in coeffs.iter().enumerate().rev() {
        acc = acc * x + c / (k as f64 + 1.0);
    }
    acc * x
}

/// Exact integral of `p` over `[lo, hi]`.
pub fn integral(coeffs: &[f64], lo: f64, hi: f64) -> f64 {
    let width = hi - lo;
    if width == 0.0 {
        return 0.0;
    }
    let local = to_local(coeffs, lo, width);
    width * antiderivative_at(&local, 1.0)
}

/// Derivative coefficients.
pub fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

/// Exact `∫ |p|` over `[lo, hi]`.
///
/// The interval is split at every sign change of `p` (isolated with a Sturm
/// sequence and refined by bisection to `1e-12 * (hi - lo)`), and each piece
/// is integrated in closed form.
pub fn abs_integral(coeffs: &[f64], lo: f64, hi: f64) -> f64 {
    let width = hi - lo;
    if width <= 0.0 || coeffs.iter().all(|&c| c == 0.0) {
        return 0.0;
    }
    let local = to_local(coeffs, lo, width);
    width * abs_integral_unit(&local)
}

/// `∫_0^1 |q(u)| du` for a polynomial already expressed in the local variable.
pub fn abs_integral_unit(local: &[f64]) -> f64 {
    let mut cuts = vec![0.0];
    cuts.extend(sign_changes_unit(local));
    cuts.push(1.0);
    cuts.windows(2)
        .map(|w| (antiderivative_at(local, w[1]) - antiderivative_at(local, w[0])).abs())
        .sum()
}

/// Sorted points in `(0, 1)` where `q` changes sign.
pub fn sign_changes_unit(q: &[f64]) -> Vec<f64> {
    let q = trim(q);
    if q.len() <= 1 {
        return Vec::new();
    }
    let mut roots = Vec::new();

    let chain = SturmChain::new(&q);
    let mut brackets = Vec::new();
    chain.isolate(0.0, 1.0, 0, &mut brackets);
    for (a, b) in brackets {
        if let Some(root) = bisect_sign_change(&q, a, b) {
            roots.push(root);
        }
    }

    // Sampled scan as a backstop for a miscounted floating-point chain.
    let samples = 8 * q.len();
    let mut prev_u = 0.0;
    let mut prev_v = horner(&q, 0.0);
    for i in 1..=samples {
        let u = i as f64 / samples as f64;
        let v = horner(&q, u);
        if prev_v * v < 0.0 && !roots.iter().any(|&r| r >= prev_u && r <= u) {
            if let Some(root) = bisect_sign_change(&q, prev_u, u) {
                roots.push(root);
            }
        }
        prev_u = u;
        prev_v = v;
    }

    roots.retain(|&r| r > 0.0 && r < 1.0);
    roots.sort_by(f64::total_cmp);
    roots.dedup();
    roots
}

const ROOT_TOL: f64 = 1e-12;

fn bisect_sign_change(q: &[f64], mut a: f64, mut b: f64) -> Option<f64> {
    let mut fa = horner(q, a);
    let fb = horner(q, b);
    if fa * fb >= 0.0 {
        return None;
    }
    while b - a > ROOT_TOL {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = horner(q, mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    Some(0.5 * (a + b))
}

/// Drops leading coefficients that are negligible against the largest one.
fn trim(q: &[f64]) -> Vec<f64> {
    let scale = q.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut out = q.to_vec();
    while let Some(&last) = out.last() {
        if last.abs() <= 1e-14 * scale || last == 0.0 {
            out.pop();
        } else {
            break;
        }
    }
    out
}

fn normalize(p: &mut [f64]) {
    let scale = p.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if scale > 0.0 {
        p.iter_mut().for_each(|c| *c /= scale);
    }
}

/// Remainder of `a / b`; `b` must have a nonzero leading coefficient.
fn remainder(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db];
    while r.len() > db {
        let dr = r.len() - 1;
        let factor = r[dr] / lead;
        for (i, &bc) in b.iter().enumerate() {
            r[dr - db + i] -= factor * bc;
        }
        r.pop();
    }
    r
}

/// Sturm sequence of a polynomial; counts distinct real roots in intervals.
pub struct SturmChain {
    polys: Vec<Vec<f64>>,
}

impl SturmChain {
    pub fn new(p: &[f64]) -> Self {
        let mut p0 = trim(p);
        normalize(&mut p0);
        let mut p1 = trim(&derivative(&p0));
        normalize(&mut p1);
        let mut polys = vec![p0];
        if !p1.is_empty() {
            polys.push(p1);
        }
        while polys.len() >= 2 {
            let n = polys.len();
            let dividend = &polys[n - 2];
            let divisor = &polys[n - 1];
            if divisor.len() <= 1 {
                break;
            }
            let mut r: Vec<f64> = remainder(dividend, divisor).iter().map(|c| -c).collect();
            // Relative cutoff: exact division leaves only rounding noise.
            let scale = dividend.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            while let Some(&last) = r.last() {
                if last.abs() <= 1e-12 * scale {
                    r.pop();
                } else {
                    break;
                }
            }
            if r.is_empty() {
                break;
            }
            normalize(&mut r);
            polys.push(r);
        }
        SturmChain { polys }
    }

    /// Number of sign variations of the chain at `x` (zeros skipped).
    pub fn variations(&self, x: f64) -> usize {
        let mut count = 0;
        let mut last = 0.0f64;
        for p in &self.polys {
            let v = horner(p, x);
            if v != 0.0 {
                if last != 0.0 && (v > 0.0) != (last > 0.0) {
                    count += 1;
                }
                last = v;
            }
        }
        count
    }

    /// Number of distinct roots in `(a, b]`.
    pub fn count_roots(&self, a: f64, b: f64) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }

    fn isolate(&self, a: f64, b: f64, depth: u32, out: &mut Vec<(f64, f64)>) {
        let n = self.count_roots(a, b);
        if n == 0 {
            return;
        }
        if n == 1 || depth >= 48 || b - a <= ROOT_TOL {
            out.push((a, b));
            return;
        }
        let mid = 0.5 * (a + b);
        self.isolate(a, mid, depth + 1, out);
        self.isolate(mid, b, depth + 1, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn horner_matches_direct_sum() {
        let c = [1.0, -2.0, 0.5, 3.0];
        let x = 0.7f64;
        let direct = 1.0 - 2.0 * x + 0.5 * x * x + 3.0 * x.powi(3);
        assert_relative_eq!(horner(&c, x), direct, epsilon = 1e-15);
    }

    #[test]
    fn local_transform_preserves_values() {
        let c = [0.3, -1.0, 2.0, -0.25];
        let (lo, w) = (2.5, 0.75);
        let q = to_local(&c, lo, w);
        for i in 0..=10 {
            let u = i as f64 / 10.0;
            assert_relative_eq!(horner(&q, u), horner(&c, lo + w * u), epsilon = 1e-12);
        }
    }

    #[test]
    fn integral_of_linear_density() {
        assert_relative_eq!(integral(&[0.0, 2.0], 0.0, 1.0), 1.0, epsilon = 1e-15);
        assert_relative_eq!(integral(&[1.0], 3.0, 4.5), 1.5, epsilon = 1e-15);
    }

    #[test]
    fn abs_integral_splits_at_roots() {
        // ∫_0^1 |1 - 2x| = 1/2
        assert_relative_eq!(abs_integral(&[1.0, -2.0], 0.0, 1.0), 0.5, epsilon = 1e-13);
        // ∫_0^1 |x - 1/3| = (1/9 + 4/9)/2
        assert_relative_eq!(
            abs_integral(&[-1.0 / 3.0, 1.0], 0.0, 1.0),
            5.0 / 18.0,
            epsilon = 1e-13
        );
    }

    #[test]
    fn abs_integral_triple_root() {
        // (x - 1/2)^3 changes sign once at a triple root
        let c = [-0.125, 0.75, -1.5, 1.0];
        assert_relative_eq!(abs_integral(&c, 0.0, 1.0), 2.0 * 0.5f64.powi(4) / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn double_root_needs_no_split() {
        // (x - 1/2)^2 >= 0
        let c = [0.25, -1.0, 1.0];
        assert!(sign_changes_unit(&c).is_empty());
        assert_relative_eq!(abs_integral(&c, 0.0, 1.0), 1.0 / 12.0, epsilon = 1e-14);
    }

    #[test]
    fn sturm_counts_distinct_roots() {
        // (u - 0.2)(u - 0.5)(u - 0.9)
        let c = [-0.09, 0.73, -1.6, 1.0];
        let chain = SturmChain::new(&c);
        assert_eq!(chain.count_roots(0.0, 1.0), 3);
        assert_eq!(chain.count_roots(0.3, 1.0), 2);
        let roots = sign_changes_unit(&c);
        assert_eq!(roots.len(), 3);
        for (r, e) in roots.iter().zip([0.2, 0.5, 0.9]) {
            assert!((r - e).abs() < 1e-11);
        }
    }

    #[test]
    fn root_at_endpoint_is_not_a_cut() {
        assert!(sign_changes_unit(&[0.0, 1.0]).is_empty());
        assert!(sign_changes_unit(&[-1.0, 1.0]).is_empty());
    }
}
