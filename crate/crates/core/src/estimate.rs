//! Scale estimation for centered Cauchy samples.
//!
//! If `X_1, ..., X_t` are i.i.d. `C(0, D)`, the geometric mean of `|X_j|` is an
//! unbiased-in-log estimator of `D` (the log of a standard Cauchy has mean 0):
//!
//! ```text
//! P( D_gm in [(1 - eps) D, (1 + eps) D] ) >= 1 - 2 exp(-t eps^2 / 8),  eps in [0, 1/2]
//! ```
//!
//! A union bound over the `m^2` ordered pairs then gives the sample count
//! `t >= (8 / eps)^2 ln(m^2 / delta)` returned by [`required_sample_count`].

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScaleEstimate {
    pub value: f64,
    pub t: usize,
    pub epsilon: f64,
    pub delta: f64,
}

/// Which scale estimator to apply to the projection differences.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    #[default]
    GeometricMean,
    /// Sample median of `|X_j|`; the median of `|C(0, D)|` is `D tan(pi/4) = D`.
    /// No tail bound is claimed for it.
    Median,
}

impl Estimator {
    pub fn estimate(self, samples: &[f64], epsilon: f64, delta: f64) -> Result<ScaleEstimate> {
        match self {
            Estimator::GeometricMean => geometric_mean_estimate(samples, epsilon, delta),
            Estimator::Median => median_estimate(samples, epsilon, delta),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Estimator::GeometricMean => "geometric_mean",
            Estimator::Median => "median",
        }
    }
}

impl std::str::FromStr for Estimator {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "geometric_mean" => Ok(Estimator::GeometricMean),
            "median" => Ok(Estimator::Median),
            other => Err(format!("unknown estimator '{other}' (expected geometric_mean or median)")),
        }
    }
}

pub(crate) fn check_epsilon_delta(epsilon: f64, delta: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return param(format!("epsilon must lie in (0, 1/2], got {epsilon}"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return param(format!("delta must lie in (0, 1), got {delta}"));
    }
    Ok(())
}

/// `ceil((8 / eps)^2 ln(m^2 / delta))`.
pub fn required_sample_count(epsilon: f64, delta: f64, m: usize) -> Result<usize> {
    check_epsilon_delta(epsilon, delta)?;
    if m < 2 {
        return param(format!("sample count bound needs m >= 2, got {m}"));
    }
    let m = m as f64;
    let t = (8.0 / epsilon).powi(2) * (m * m / delta).ln();
    Ok(t.ceil().max(1.0) as usize)
}

/// Upper bound `2 exp(-t eps^2 / 8)` on the probability that the geometric-mean
/// estimate misses `[(1 - eps) D, (1 + eps) D]`.
pub fn geometric_mean_failure_bound(t: usize, epsilon: f64) -> f64 {
    2.0 * (-(t as f64) * epsilon * epsilon / 8.0).exp()
}

/// `exp(mean ln|X_j|)`; any exact zero short-circuits to 0.
pub fn geometric_mean_estimate(samples: &[f64], epsilon: f64, delta: f64) -> Result<ScaleEstimate> {
    if samples.is_empty() {
        return param("geometric mean of an empty sample");
    }
    let mut log_sum = 0.0;
    let mut value = None;
    for &x in samples {
        if x == 0.0 {
            value = Some(0.0);
            break;
        }
        log_sum += x.abs().ln();
    }
    let value = value.unwrap_or_else(|| (log_sum / samples.len() as f64).exp());
    Ok(ScaleEstimate {
        value,
        t: samples.len(),
        epsilon,
        delta,
    })
}

pub fn median_estimate(samples: &[f64], epsilon: f64, delta: f64) -> Result<ScaleEstimate> {
    if samples.is_empty() {
        return param("median of an empty sample");
    }
    let mut abs: Vec<f64> = samples.iter().map(|x| x.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let n = abs.len();
    let value = if n % 2 == 1 {
        abs[n / 2]
    } else {
        0.5 * (abs[n / 2 - 1] + abs[n / 2])
    };
    Ok(ScaleEstimate {
        value,
        t: n,
        epsilon,
        delta,
    })
}
