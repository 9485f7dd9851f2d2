//! # l1sketch
//!
//! All-pairs L1 distances between piecewise-polynomial probability densities.
//!
//! Every density in a family is projected onto a single random variable by
//! integrating it against a shared Cauchy motion. The difference of two
//! projections is Cauchy distributed with scale equal to the L1 distance of the
//! two densities, so `t` independent replicates of the projection vector are
//! enough to recover every pairwise distance with a scale estimator.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`density`] | Families, evaluation, grid merging, sampling, strict validation |
//! | [`exact`] | Exact L1 distances by root isolation (the ground-truth oracle) |
//! | [`rng`] | Counter-based seeded streams, Cauchy/normal/chi-squared draws |
//! | [`estimate`] | Sample-count bound, geometric-mean and median scale estimators |
//! | [`ci1`] | Closed-form density of the integral of `(1, x)` and its exact sampler |
//! | [`cid`] | Riemann-sum approximation for higher degrees, calibration of `c` |
//! | [`pipeline`] | Sketch construction, estimation, Monte Carlo baseline, dispatch |
//! | [`io`] | JSON family format, distance output, run manifests |
//!
//! ## Quick start
//!
//! ```rust
//! use l1sketch::density::{merge_breakpoints, RawDensity, RawPiece};
//! use l1sketch::pipeline::{run_scheme, Method, SchemeParams};
//!
//! let uniform = |name: &str, lo: f64| RawDensity {
//!     name: name.into(),
//!     pieces: vec![RawPiece { lo, hi: lo + 1.0, coeffs: vec![1.0] }],
//! };
//! let family = merge_breakpoints(&[uniform("a", 0.0), uniform("b", 0.5)], 0).unwrap();
//!
//! let exact = run_scheme(&family, &SchemeParams::new(Method::Exact)).unwrap();
//! assert!((exact.get(0, 1) - 1.0).abs() < 1e-12);
//!
//! let sketch = run_scheme(&family, &SchemeParams::new(Method::Sketch)).unwrap();
//! assert!((sketch.get(0, 1) - 1.0).abs() < 0.2);
//! ```

pub mod ci1;
pub mod cid;
pub mod cli;
pub mod density;
pub mod error;
pub mod estimate;
pub mod exact;
pub mod generate;
pub mod io;
pub mod pipeline;
pub mod poly;
pub mod rng;

pub use error::{Error, Result};

/// Highest polynomial degree accepted anywhere in the crate.
pub const MAX_DEGREE: usize = 16;
