//! End-to-end all-pairs distance schemes.
//!
//! A sketch replicate draws one random vector `Z_l` per elementary interval
//! `[a_l, a_{l+1})` (the integral of `(1, x, ..., x^d)` against the Cauchy
//! motion on that interval), forms prefix sums `Y_l = Z_0 + ... + Z_{l-1}`, and
//! projects every density as
//!
//! ```text
//! X_j = sum over segments [a_b, a_c) of f_j:  alpha . (Y_c - Y_b)
//! ```
//!
//! All densities share the same `Z` within a replicate, so `X_j - X_k` is
//! `C(0, ||f_j - f_k||_1)` and a scale estimate over `t` replicates recovers the
//! distance. Replicate `i` always uses stream `(seed, i)`, which makes the sketch
//! independent of how replicates are spread over worker threads.

use rayon::prelude::*;
use serde::Serialize;

use crate::ci1::{rescale_ci1_unchecked, sample_ci1_unit};
use crate::cid::{accumulate_unit, rescale_into, ApproxConfig, Binomials, DEFAULT_C_CONSTANT};
use crate::density::{
    validate_family, Breakpoints, DensityFamily, DensitySampler, PiecewisePolyDensity, PolySegment,
};
use crate::error::{param, Error, Result};
use crate::estimate::{check_epsilon_delta, required_sample_count, Estimator};
use crate::exact::exact_all_pairs;
use crate::poly;
use crate::rng::{standard_cauchy, RandomStream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SketchMode {
    /// Degree 0: scalar `C(0, a_{l+1} - a_l)` increments.
    UniformFastpath,
    /// Degree 1: exact `CI_1` draws by rejection sampling.
    ExactCi1,
    /// Any degree >= 1: r-approximation of `CI_d`.
    CidApprox { r: usize },
    /// Any degree: replace each density by its cell averages on `pieces`
    /// equal cells per elementary interval, then use the degree-0 path.
    Uniformize { pieces: usize },
}

impl SketchMode {
    fn check_degree(self, degree: usize) -> Result<()> {
        let ok = match self {
            SketchMode::UniformFastpath => degree == 0,
            SketchMode::ExactCi1 => degree == 1,
            SketchMode::CidApprox { r } => degree >= 1 && r >= 1,
            SketchMode::Uniformize { pieces } => pieces >= 1,
        };
        if ok {
            Ok(())
        } else {
            param(format!("sketch mode {self:?} is not usable for degree {degree}"))
        }
    }
}

/// `m x t` projection values, one row per density.
#[derive(Clone, Debug, PartialEq)]
pub struct SketchMatrix {
    names: Vec<String>,
    values: Vec<f64>,
    m: usize,
    t: usize,
    mode: SketchMode,
}

impl SketchMatrix {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn mode(&self) -> SketchMode {
        self.mode
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.t..(j + 1) * self.t]
    }

    pub fn get(&self, j: usize, rep: usize) -> f64 {
        self.values[j * self.t + rep]
    }

    /// `X_j - X_k` for every replicate.
    pub fn differences(&self, j: usize, k: usize) -> Vec<f64> {
        self.row(j).iter().zip(self.row(k)).map(|(a, b)| a - b).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Sketch,
    Mc,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Sketch => "sketch",
            Method::Mc => "mc",
        }
    }
}

/// Effective parameters of the run that produced a [`DistanceMatrix`].
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimator: Option<Estimator>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<SketchMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_constant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_integration: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_estimation: Option<f64>,
    /// Range of `estimate / true distance` guaranteed with probability `1 - delta`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_error_factor: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples_per_density: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceMatrix {
    names: Vec<String>,
    entries: Vec<f64>,
    method: Method,
    echo: RunEcho,
}

impl DistanceMatrix {
    pub fn zeros(names: Vec<String>, method: Method, echo: RunEcho) -> Self {
        let m = names.len();
        DistanceMatrix {
            names,
            entries: vec![0.0; m * m],
            method,
            echo,
        }
    }

    pub fn m(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn echo(&self) -> &RunEcho {
        &self.echo
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.entries[j * self.m() + k]
    }

    /// Sets `(j, k)` and `(k, j)`.
    pub fn set(&mut self, j: usize, k: usize, value: f64) {
        let m = self.m();
        self.entries[j * m + k] = value;
        self.entries[k * m + j] = value;
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.m().max(1)).map(|r| r.to_vec()).collect()
    }

    fn with_echo(mut self, echo: RunEcho) -> Self {
        self.echo = echo;
        self
    }
}

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => param("thread count must be at least 1"),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

struct Projector<'a> {
    family: &'a DensityFamily,
    mode: SketchMode,
    dim: usize,
    binom: Binomials,
}

struct Scratch {
    prefix: Vec<f64>,
    unit: Vec<f64>,
}

impl<'a> Projector<'a> {
    fn new(family: &'a DensityFamily, mode: SketchMode) -> Self {
        let dim = family.degree + 1;
        Projector {
            family,
            mode,
            dim,
            binom: Binomials::new(family.degree),
        }
    }

    fn scratch(&self) -> Scratch {
        Scratch {
            prefix: vec![0.0; self.family.breakpoints.len() * self.dim],
            unit: vec![0.0; self.dim],
        }
    }

    /// Fills `out[j] = X_j` for replicate `rep`.
    fn replicate(&self, seed: u64, rep: usize, scratch: &mut Scratch, out: &mut [f64]) -> Result<()> {
        let mut rng = RandomStream::new(seed, rep as u64);
        let bp = self.family.breakpoints.points();
        let dim = self.dim;
        let Scratch { prefix, unit } = scratch;
        prefix[..dim].iter_mut().for_each(|v| *v = 0.0);
        for l in 0..bp.len() - 1 {
            let (a, width) = (bp[l], bp[l + 1] - bp[l]);
            let (done, rest) = prefix.split_at_mut((l + 1) * dim);
            let prev = &done[l * dim..];
            let next = &mut rest[..dim];
            match self.mode {
                SketchMode::UniformFastpath | SketchMode::Uniformize { .. } => {
                    next[0] = width * standard_cauchy(&mut rng);
                }
                SketchMode::ExactCi1 => {
                    let z = rescale_ci1_unchecked(sample_ci1_unit(&mut rng)?, a, width);
                    next[0] = z.x0;
                    next[1] = z.x1;
                }
                SketchMode::CidApprox { r } => {
                    accumulate_unit(r, &mut rng, unit);
                    rescale_into(unit, a, width, &self.binom, next);
                }
            }
            for k in 0..dim {
                next[k] += prev[k];
            }
        }
        for (x, density) in out.iter_mut().zip(&self.family.densities) {
            let mut acc = 0.0;
            for seg in &density.segments {
                let yb = &prefix[seg.start * dim..(seg.start + 1) * dim];
                let yc = &prefix[seg.end * dim..(seg.end + 1) * dim];
                for k in 0..dim {
                    acc += seg.coeffs[k] * (yc[k] - yb[k]);
                }
            }
            *x = acc;
        }
        Ok(())
    }
}

/// Replaces every density by its cell averages on `pieces` equal cells per
/// elementary interval. Masses are preserved exactly.
pub fn uniformize_family(family: &DensityFamily, pieces: usize) -> Result<DensityFamily> {
    if pieces == 0 {
        return param("uniformize needs at least one piece per interval");
    }
    let bp = family.breakpoints.points();
    let mut grid = Vec::with_capacity((bp.len() - 1) * pieces + 1);
    for l in 0..bp.len() - 1 {
        let w = (bp[l + 1] - bp[l]) / pieces as f64;
        for q in 0..pieces {
            grid.push(if q == 0 { bp[l] } else { bp[l] + q as f64 * w });
        }
    }
    grid.push(bp[bp.len() - 1]);
    let fine = Breakpoints::new(grid)?;

    let densities = family
        .densities
        .iter()
        .map(|d| {
            let mut segments = Vec::new();
            for seg in &d.segments {
                for l in seg.start..seg.end {
                    for q in 0..pieces {
                        let i = l * pieces + q;
                        let (lo, hi) = (fine[i], fine[i + 1]);
                        let avg = poly::integral(&seg.coeffs, lo, hi) / (hi - lo);
                        segments.push(PolySegment::new(i, i + 1, vec![avg]));
                    }
                }
            }
            PiecewisePolyDensity {
                name: d.name.clone(),
                segments,
            }
        })
        .collect();
    DensityFamily::new(fine, densities, 0)
}

/// Builds the `m x t` sketch of a family.
pub fn sketch_family(family: &DensityFamily, t: usize, mode: SketchMode, seed: u64) -> Result<SketchMatrix> {
    mode.check_degree(family.degree)?;
    if t == 0 {
        return param("sketch needs t >= 1 replicates");
    }
    if family.m() == 0 {
        return param("sketch needs at least one density");
    }
    if let SketchMode::Uniformize { pieces } = mode {
        let coarse = uniformize_family(family, pieces)?;
        let mut sketch = sketch_family(&coarse, t, SketchMode::UniformFastpath, seed)?;
        sketch.mode = mode;
        return Ok(sketch);
    }

    let m = family.m();
    let projector = Projector::new(family, mode);
    let mut columns = vec![0.0; m * t];
    columns
        .par_chunks_mut(m)
        .enumerate()
        .try_for_each_init(
            || projector.scratch(),
            |scratch, (rep, col)| projector.replicate(seed, rep, scratch, col),
        )?;

    let mut values = vec![0.0; m * t];
    for (rep, col) in columns.chunks(m).enumerate() {
        for (j, &x) in col.iter().enumerate() {
            values[j * t + rep] = x;
        }
    }
    Ok(SketchMatrix {
        names: family.names(),
        values,
        m,
        t,
        mode,
    })
}

/// Scale estimate of `X_j - X_k` for every pair.
pub fn estimate_all_pairs(
    sketch: &SketchMatrix,
    epsilon: f64,
    delta: f64,
    estimator: Estimator,
) -> Result<DistanceMatrix> {
    let required = required_sample_count(epsilon, delta, sketch.m().max(2))?;
    if sketch.t() < required {
        return param(format!(
            "t = {} replicates is too few for epsilon = {epsilon}, delta = {delta}, m = {}: need t >= {required}",
            sketch.t(),
            sketch.m()
        ));
    }
    let m = sketch.m();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|j| ((j + 1)..m).map(move |k| (j, k))).collect();
    let values = pairs
        .par_iter()
        .map(|&(j, k)| Ok(estimator.estimate(&sketch.differences(j, k), epsilon, delta)?.value))
        .collect::<Result<Vec<f64>>>()?;

    let echo = RunEcho {
        epsilon: Some(epsilon),
        delta: Some(delta),
        t: Some(sketch.t()),
        estimator: Some(estimator),
        mode: Some(sketch.mode()),
        ..RunEcho::default()
    };
    let mut out = DistanceMatrix::zeros(sketch.names().to_vec(), Method::Sketch, echo);
    for (&(j, k), &v) in pairs.iter().zip(&values) {
        out.set(j, k, v);
    }
    Ok(out)
}

/// `ceil(8 eps^-2 ln(2 m^2 / delta))` draws per density for the Monte Carlo baseline.
pub fn mc_sample_count(epsilon_abs: f64, delta: f64, m: usize) -> Result<usize> {
    if !(epsilon_abs > 0.0 && epsilon_abs.is_finite()) {
        return param(format!("absolute epsilon must be positive, got {epsilon_abs}"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return param(format!("delta must lie in (0, 1), got {delta}"));
    }
    let m = m.max(1) as f64;
    Ok((8.0 / (epsilon_abs * epsilon_abs) * (2.0 * m * m / delta).ln()).ceil() as usize)
}

/// Absolute-error Monte Carlo estimate of all distances.
///
/// For `X ~ f_j`, `E[sgn(f_j(X) - f_k(X))] + E[sgn(f_k(Y) - f_j(Y))]` with
/// `Y ~ f_k` equals `||f_j - f_k||_1`. One sample per density (stream `j`) is
/// reused against every other density. Estimates are clamped to `[0, 2]`.
pub fn mc_all_pairs(family: &DensityFamily, epsilon_abs: f64, delta: f64, seed: u64) -> Result<DistanceMatrix> {
    let warnings = validate_family(family, true)?;
    if let Some(w) = warnings.first() {
        return Err(Error::Sampling(format!("Monte Carlo needs probability densities: {w}")));
    }
    let m = family.m();
    let n = mc_sample_count(epsilon_abs, delta, m)?;
    let bp = &family.breakpoints;

    // sign_means[j][k] = mean over X ~ f_j of sgn(f_j(X) - f_k(X))
    let sign_means = family
        .densities
        .par_iter()
        .enumerate()
        .map(|(j, fj)| {
            let sampler = DensitySampler::new(fj, bp)?;
            let mut rng = RandomStream::new(seed, j as u64);
            let mut sums = vec![0.0f64; m];
            for _ in 0..n {
                let x = sampler.sample(&mut rng);
                let own = fj.eval(bp, x);
                for (k, fk) in family.densities.iter().enumerate() {
                    if k != j {
                        let diff = own - fk.eval(bp, x);
                        sums[k] += if diff > 0.0 {
                            1.0
                        } else if diff < 0.0 {
                            -1.0
                        } else {
                            0.0
                        };
                    }
                }
            }
            Ok(sums.into_iter().map(|s| s / n as f64).collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;

    let echo = RunEcho {
        epsilon: Some(epsilon_abs),
        delta: Some(delta),
        seed: Some(seed),
        samples_per_density: Some(n),
        ..RunEcho::default()
    };
    let mut out = DistanceMatrix::zeros(family.names(), Method::Mc, echo);
    for j in 0..m {
        for k in (j + 1)..m {
            out.set(j, k, (sign_means[j][k] + sign_means[k][j]).clamp(0.0, 2.0));
        }
    }
    Ok(out)
}

/// Which sketch sampler `run_scheme` uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SketchChoice {
    /// Degree 0: uniform path; degree 1: exact `CI_1`; higher: r-approximation.
    #[default]
    Auto,
    CidApprox,
    Uniformize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchemeParams {
    pub method: Method,
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub estimator: Estimator,
    pub c_constant: f64,
    pub sketch_choice: SketchChoice,
    pub threads: Option<usize>,
}

impl SchemeParams {
    pub fn new(method: Method) -> Self {
        SchemeParams {
            method,
            epsilon: 0.2,
            delta: 0.1,
            seed: 0,
            estimator: Estimator::GeometricMean,
            c_constant: DEFAULT_C_CONSTANT,
            sketch_choice: SketchChoice::Auto,
            threads: None,
        }
    }
}

/// Picks mode and `t` for a sketch run and returns the echo describing them.
pub fn plan_sketch(family: &DensityFamily, params: &SchemeParams) -> Result<(SketchMode, usize, RunEcho)> {
    check_epsilon_delta(params.epsilon, params.delta)?;
    let d = family.degree;
    let m = family.m().max(2);
    let eps = params.epsilon;
    let exact_sampler = match params.sketch_choice {
        SketchChoice::Auto => d <= 1,
        _ => false,
    };
    let mut echo = RunEcho {
        epsilon: Some(eps),
        delta: Some(params.delta),
        seed: Some(params.seed),
        estimator: Some(params.estimator),
        ..RunEcho::default()
    };
    let (mode, eps_est) = if exact_sampler {
        let mode = if d == 0 {
            SketchMode::UniformFastpath
        } else {
            SketchMode::ExactCi1
        };
        echo.relative_error_factor = Some([1.0 - eps, 1.0 + eps]);
        (mode, eps)
    } else {
        // integration error and estimation error each get half the budget
        let (eps_int, eps_est) = (eps / 2.0, eps / 2.0);
        let cfg = ApproxConfig::new(d, eps_int, params.c_constant)?;
        let mode = match params.sketch_choice {
            SketchChoice::Uniformize => SketchMode::Uniformize { pieces: cfg.r },
            _ if d == 0 => SketchMode::UniformFastpath,
            _ => SketchMode::CidApprox { r: cfg.r },
        };
        echo.c_constant = Some(params.c_constant);
        echo.epsilon_integration = Some(eps_int);
        echo.epsilon_estimation = Some(eps_est);
        echo.relative_error_factor = Some([(1.0 - eps_int) * (1.0 - eps_est), (1.0 + eps_int) * (1.0 + eps_est)]);
        (mode, eps_est)
    };
    let t = required_sample_count(eps_est, params.delta, m)?;
    echo.t = Some(t);
    echo.mode = Some(mode);
    Ok((mode, t, echo))
}

/// Computes the distance matrix with the requested method.
pub fn run_scheme(family: &DensityFamily, params: &SchemeParams) -> Result<DistanceMatrix> {
    match params.method {
        Method::Exact => Ok(exact_all_pairs(family)),
        Method::Mc => with_threads(params.threads, || {
            mc_all_pairs(family, params.epsilon, params.delta, params.seed)
        })?,
        Method::Sketch => {
            let (mode, t, echo) = plan_sketch(family, params)?;
            if family.m() < 2 {
                return Ok(DistanceMatrix::zeros(family.names(), Method::Sketch, echo));
            }
            let eps_est = echo.epsilon_estimation.unwrap_or(params.epsilon);
            with_threads(params.threads, || {
                let sketch = sketch_family(family, t, mode, params.seed)?;
                estimate_all_pairs(&sketch, eps_est, params.delta, params.estimator)
            })?
            .map(|d| d.with_echo(echo))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{merge_breakpoints, RawDensity, RawPiece};

    fn uniform(name: &str, lo: f64, hi: f64) -> RawDensity {
        RawDensity {
            name: name.into(),
            pieces: vec![RawPiece {
                lo,
                hi,
                coeffs: vec![1.0 / (hi - lo)],
            }],
        }
    }

    fn median_abs(mut v: Vec<f64>) -> f64 {
        v.iter_mut().for_each(|x| *x = x.abs());
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    }

    #[test]
    fn mode_degree_compatibility() {
        let fam = merge_breakpoints(&[uniform("a", 0.0, 1.0)], 0).unwrap();
        assert!(sketch_family(&fam, 10, SketchMode::ExactCi1, 0).is_err());
        assert!(sketch_family(&fam, 10, SketchMode::CidApprox { r: 4 }, 0).is_err());
        assert!(sketch_family(&fam, 10, SketchMode::UniformFastpath, 0).is_ok());
        assert!(sketch_family(&fam, 0, SketchMode::UniformFastpath, 0).is_err());
    }

    #[test]
    fn disjoint_uniform_difference_scale() {
        let fam = merge_breakpoints(&[uniform("a", 0.0, 1.0), uniform("b", 1.0, 2.0)], 0).unwrap();
        let sketch = sketch_family(&fam, 100_000, SketchMode::UniformFastpath, 1).unwrap();
        let med = median_abs(sketch.differences(0, 1));
        assert!((med / 2.0 - 1.0).abs() < 0.03, "median {med}");
    }

    #[test]
    fn identical_densities_cancel_exactly() {
        let fam = merge_breakpoints(&[uniform("a", 0.0, 1.0), uniform("b", 0.0, 1.0)], 0).unwrap();
        let sketch = sketch_family(&fam, 1000, SketchMode::UniformFastpath, 2).unwrap();
        assert!(sketch.differences(0, 1).iter().all(|&d| d == 0.0));
        let est = estimate_all_pairs(&sketch, 0.5, 0.5, Estimator::GeometricMean);
        // t = 1000 is enough for eps = 1/2
        assert_eq!(est.unwrap().get(0, 1), 0.0);
    }

    #[test]
    fn too_few_replicates_is_rejected() {
        let fam = merge_breakpoints(&[uniform("a", 0.0, 1.0), uniform("b", 1.0, 2.0)], 0).unwrap();
        let sketch = sketch_family(&fam, 100, SketchMode::UniformFastpath, 2).unwrap();
        let err = estimate_all_pairs(&sketch, 0.2, 0.1, Estimator::GeometricMean).unwrap_err();
        assert!(err.to_string().contains("need t >="));
    }

    #[test]
    fn uniformize_preserves_mass_and_shape() {
        let fam = merge_breakpoints(
            &[RawDensity {
                name: "ramp".into(),
                pieces: vec![RawPiece {
                    lo: 0.0,
                    hi: 1.0,
                    coeffs: vec![0.0, 2.0],
                }],
            }],
            1,
        )
        .unwrap();
        let u = uniformize_family(&fam, 4).unwrap();
        assert_eq!(u.degree, 0);
        assert_eq!(u.breakpoints.len(), 5);
        assert!((u.densities[0].mass(&u.breakpoints) - 1.0).abs() < 1e-14);
        assert!((u.densities[0].eval(&u.breakpoints, 0.1) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn mc_trivial_cases() {
        let same = merge_breakpoints(&[uniform("a", 0.0, 1.0), uniform("b", 0.0, 1.0)], 0).unwrap();
        assert_eq!(mc_all_pairs(&same, 0.1, 0.1, 0).unwrap().get(0, 1), 0.0);
        let disjoint = merge_breakpoints(&[uniform("a", 0.0, 1.0), uniform("b", 1.0, 2.0)], 0).unwrap();
        assert_eq!(mc_all_pairs(&disjoint, 0.1, 0.1, 0).unwrap().get(0, 1), 2.0);
    }

    #[test]
    fn mc_rejects_signed_density() {
        let fam = merge_breakpoints(
            &[RawDensity {
                name: "signed".into(),
                pieces: vec![RawPiece {
                    lo: 0.0,
                    hi: 1.0,
                    coeffs: vec![1.0, -3.0],
                }],
            }],
            1,
        )
        .unwrap();
        assert!(matches!(mc_all_pairs(&fam, 0.1, 0.1, 0), Err(Error::Sampling(_))));
    }

    #[test]
    fn mc_sample_count_formula() {
        let n = mc_sample_count(0.05, 0.1, 2).unwrap();
        assert_eq!(n, (3200.0f64 * 80.0f64.ln()).ceil() as usize);
    }

    #[test]
    fn run_scheme_dispatch() {
        let fam = merge_breakpoints(
            &[
                RawDensity {
                    name: "a".into(),
                    pieces: vec![RawPiece {
                        lo: 0.0,
                        hi: 1.0,
                        coeffs: vec![1.0, 0.0],
                    }],
                },
                RawDensity {
                    name: "b".into(),
                    pieces: vec![RawPiece {
                        lo: 0.0,
                        hi: 1.0,
                        coeffs: vec![0.0, 2.0],
                    }],
                },
            ],
            1,
        )
        .unwrap();
        let exact = run_scheme(&fam, &SchemeParams::new(Method::Exact)).unwrap();
        assert_eq!(exact, exact_all_pairs(&fam));

        let (mode, t, _) = plan_sketch(&fam, &SchemeParams::new(Method::Sketch)).unwrap();
        assert_eq!(mode, SketchMode::ExactCi1);
        assert_eq!(t, required_sample_count(0.2, 0.1, 2).unwrap());

        let mut p = SchemeParams::new(Method::Sketch);
        p.sketch_choice = SketchChoice::CidApprox;
        let (mode, t, echo) = plan_sketch(&fam, &p).unwrap();
        assert_eq!(mode, SketchMode::CidApprox { r: (DEFAULT_C_CONSTANT / 0.1).ceil() as usize });
        assert_eq!(t, required_sample_count(0.1, 0.1, 2).unwrap());
        assert_eq!(echo.epsilon_integration, Some(0.1));
    }

    #[test]
    fn sketch_rejects_large_epsilon() {
        let fam = merge_breakpoints(&[uniform("a", 0.0, 1.0), uniform("b", 1.0, 2.0)], 0).unwrap();
        let mut p = SchemeParams::new(Method::Sketch);
        p.epsilon = 0.6;
        assert!(matches!(run_scheme(&fam, &p), Err(Error::Parameter(_))));
    }

    #[test]
    fn same_seed_same_matrix() {
        let fam = merge_breakpoints(&[uniform("a", 0.0, 1.0), uniform("b", 0.5, 2.0)], 0).unwrap();
        let p = SchemeParams::new(Method::Sketch);
        assert_eq!(run_scheme(&fam, &p).unwrap(), run_scheme(&fam, &p).unwrap());
    }
}
