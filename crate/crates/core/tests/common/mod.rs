//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

pub fn cauchy_cdf(x: f64, scale: f64) -> f64 {
    0.5 + (x / scale).atan() / PI
}

/// Kolmogorov-Smirnov statistic of `samples` against a continuous CDF.
pub fn ks_statistic(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

pub fn ks_cauchy(samples: Vec<f64>, scale: f64) -> f64 {
    ks_statistic(samples, |x| cauchy_cdf(x, scale))
}

pub fn median_abs(samples: &[f64]) -> f64 {
    let mut v: Vec<f64> = samples.iter().map(|x| x.abs()).collect();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One 15-point Kronrod rule and its embedded 7-point Gauss rule.
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let pair = f(c - h * XGK[i]) + f(c + h * XGK[i]);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * h, gauss * h)
}

/// Adaptive Gauss-Kronrod quadrature with absolute tolerance `tol`.
pub fn gauss_kronrod(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (k, g) = gk15(f, a, b);
        if depth == 0 || (k - g).abs() <= tol {
            return k;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, tol / 2.0, depth - 1) + rec(f, m, b, tol / 2.0, depth - 1)
    }
    rec(f, a, b, tol, 40)
}

/// Gauss-Kronrod over consecutive ranges between sorted `cuts`.
pub fn gauss_kronrod_split(f: &dyn Fn(f64) -> f64, cuts: &[f64], tol: f64) -> f64 {
    let k = (cuts.len() - 1) as f64;
    cuts.windows(2).map(|w| gauss_kronrod(f, w[0], w[1], tol / k)).sum()
}

/// `∫_0^1 |u + v y| dy`.
pub fn abs_linear_integral(u: f64, v: f64) -> f64 {
    let antider = |y: f64| u * y + 0.5 * v * y * y;
    if v != 0.0 {
        let root = -u / v;
        if root > 0.0 && root < 1.0 {
            return (antider(root) - antider(0.0)).abs() + (antider(1.0) - antider(root)).abs();
        }
    }
    (antider(1.0) - antider(0.0)).abs()
}

/// Density of `(∫_0^1 dL, ∫_0^1 x dL)` by Fourier inversion, independent of the
/// closed form.
///
/// The characteristic function is `exp(-psi(w))` with `psi(w) = ∫_0^1 |w0 + w1 y| dy`,
/// positively homogeneous of degree 1. In polar coordinates the radial integral
/// is `Re 1/(h + i s)^2 = (h^2 - s^2)/(h^2 + s^2)^2` with `h = psi(theta)` and
/// `s = <x, theta>`, leaving one angular integral over `[0, pi)` (the integrand
/// is pi-periodic).
pub fn ci1_density_fourier(x0: f64, x1: f64) -> f64 {
    let integrand = |theta: f64| {
        let (u, v) = (theta.cos(), theta.sin());
        let h = abs_linear_integral(u, v);
        let s = x0 * u + x1 * v;
        let (h2, s2) = (h * h, s * s);
        (h2 - s2) / ((h2 + s2) * (h2 + s2))
    };
    // psi has kinks where the root of u + v y crosses 0 or 1
    let cuts = [0.0, 0.5 * PI, 0.75 * PI, PI];
    gauss_kronrod_split(&integrand, &cuts, 1e-11) / (2.0 * PI * PI)
}
