//! Piecewise-polynomial density families over a shared breakpoint grid.
//!
//! A family stores one sorted grid `a_0 < a_1 < ... < a_{s-1}`. Each density is a
//! list of segments; a segment covers the half-open range `[a_b, a_c)` of the
//! grid (0-based indices) and carries the monomial coefficients
//! `(alpha_0, ..., alpha_d)` of the polynomial that the density equals there.
//! Outside every segment the density is 0.

use serde::{Deserialize, Serialize};

use crate::error::{structure, Error, Result};
use crate::poly;
use crate::rng::RandomStream;
use crate::MAX_DEGREE;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Breakpoints(Vec<f64>);

impl Breakpoints {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return structure(format!("need at least 2 breakpoints, got {}", points.len()));
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return structure(format!("breakpoint {p} is not finite"));
        }
        if let Some(i) = (1..points.len()).find(|&i| points[i] <= points[i - 1]) {
            return structure(format!(
                "breakpoints must be strictly increasing: a[{}] = {} <= a[{}] = {}",
                i,
                points[i],
                i - 1,
                points[i - 1]
            ));
        }
        Ok(Breakpoints(points))
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of elementary intervals, `s - 1`.
    pub fn intervals(&self) -> usize {
        self.0.len() - 1
    }

    /// Index `l` of the elementary interval `[a_l, a_{l+1})` holding `x`.
    pub fn locate(&self, x: f64) -> Option<usize> {
        let p = &self.0;
        if !(x >= p[0] && x < p[p.len() - 1]) {
            return None;
        }
        Some(p.partition_point(|&a| a <= x) - 1)
    }
}

impl TryFrom<Vec<f64>> for Breakpoints {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Breakpoints::new(v)
    }
}

impl From<Breakpoints> for Vec<f64> {
    fn from(b: Breakpoints) -> Self {
        b.0
    }
}

impl std::ops::Index<usize> for Breakpoints {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolySegment {
    #[serde(rename = "b")]
    pub start: usize,
    #[serde(rename = "c")]
    pub end: usize,
    pub coeffs: Vec<f64>,
}

impl PolySegment {
    pub fn new(start: usize, end: usize, coeffs: Vec<f64>) -> Self {
        PolySegment { start, end, coeffs }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewisePolyDensity {
    pub name: String,
    pub segments: Vec<PolySegment>,
}

impl PiecewisePolyDensity {
    /// The segment covering elementary interval `l`, if any.
    pub fn segment_at(&self, l: usize) -> Option<&PolySegment> {
        let i = self.segments.partition_point(|s| s.end <= l);
        self.segments.get(i).filter(|s| s.start <= l)
    }

    pub fn eval(&self, bp: &Breakpoints, x: f64) -> f64 {
        eval_density(self, bp, x)
    }

    /// Exact `∫ f`.
    pub fn mass(&self, bp: &Breakpoints) -> f64 {
        self.segments
            .iter()
            .map(|s| poly::integral(&s.coeffs, bp[s.start], bp[s.end]))
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityFamily {
    pub breakpoints: Breakpoints,
    pub densities: Vec<PiecewisePolyDensity>,
    pub degree: usize,
}

impl DensityFamily {
    /// Builds a family, rejecting structural violations.
    pub fn new(breakpoints: Breakpoints, densities: Vec<PiecewisePolyDensity>, degree: usize) -> Result<Self> {
        let family = DensityFamily {
            breakpoints,
            densities,
            degree,
        };
        check_structure(&family)?;
        Ok(family)
    }

    pub fn m(&self) -> usize {
        self.densities.len()
    }

    /// Declared complexity `n`: the largest segment count of any member.
    pub fn max_segments(&self) -> usize {
        self.densities.iter().map(|d| d.segments.len()).max().unwrap_or(0)
    }

    pub fn names(&self) -> Vec<String> {
        self.densities.iter().map(|d| d.name.clone()).collect()
    }
}

/// Soft findings from strict validation.
#[derive(Clone, Debug, PartialEq)]
pub enum ValidationWarning {
    Negative {
        density: String,
        x: f64,
        value: f64,
    },
    Mass {
        density: String,
        mass: f64,
    },
}

impl std::fmt::Display for ValidationWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ValidationWarning::Negative { density, x, value } => {
                write!(f, "density '{density}' is negative at x = {x} (value {value})")
            }
            ValidationWarning::Mass { density, mass } => {
                write!(f, "density '{density}' has total mass {mass}, not 1")
            }
        }
    }
}

const MASS_TOL: f64 = 1e-6;
const NEGATIVE_TOL: f64 = 1e-12;

fn check_structure(family: &DensityFamily) -> Result<()> {
    if family.degree > MAX_DEGREE {
        return structure(format!("degree {} exceeds the cap of {MAX_DEGREE}", family.degree));
    }
    let s = family.breakpoints.len();
    for d in &family.densities {
        let mut prev_end = 0;
        for (i, seg) in d.segments.iter().enumerate() {
            if seg.start >= seg.end {
                return structure(format!(
                    "density '{}' segment {i}: empty index range b = {} >= c = {}",
                    d.name, seg.start, seg.end
                ));
            }
            if seg.end > s - 1 {
                return structure(format!(
                    "density '{}' segment {i}: index c = {} out of range for {s} breakpoints",
                    d.name, seg.end
                ));
            }
            if i > 0 && seg.start < prev_end {
                return structure(format!(
                    "density '{}' segment {i} overlaps or precedes the previous segment",
                    d.name
                ));
            }
            if seg.coeffs.len() != family.degree + 1 {
                return structure(format!(
                    "density '{}' segment {i}: {} coefficients for degree {}",
                    d.name,
                    seg.coeffs.len(),
                    family.degree
                ));
            }
            if let Some(c) = seg.coeffs.iter().find(|c| !c.is_finite()) {
                return structure(format!("density '{}' segment {i}: coefficient {c} is not finite", d.name));
            }
            prev_end = seg.end;
        }
    }
    Ok(())
}

/// Structural checks always; with `strict`, nonnegativity and unit mass too.
///
/// Structural problems are errors. Negativity and mass problems are returned as
/// warnings, since the projection scheme works for any integrable function.
pub fn validate_family(family: &DensityFamily, strict: bool) -> Result<Vec<ValidationWarning>> {
    check_structure(family)?;
    let mut warnings = Vec::new();
    if !strict {
        return Ok(warnings);
    }
    let bp = &family.breakpoints;
    let probes = 2 * family.degree + 1;
    for d in &family.densities {
        'segments: for seg in &d.segments {
            let (lo, hi) = (bp[seg.start], bp[seg.end]);
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            let cheb = (0..probes).map(|k| {
                mid + half * ((2 * k + 1) as f64 * std::f64::consts::PI / (2 * probes) as f64).cos()
            });
            for x in [lo, hi].into_iter().chain(cheb) {
                let v = poly::horner(&seg.coeffs, x);
                if v < -NEGATIVE_TOL {
                    warnings.push(ValidationWarning::Negative {
                        density: d.name.clone(),
                        x,
                        value: v,
                    });
                    continue 'segments;
                }
            }
        }
        let mass = d.mass(bp);
        if (mass - 1.0).abs() > MASS_TOL {
            warnings.push(ValidationWarning::Mass {
                density: d.name.clone(),
                mass,
            });
        }
    }
    Ok(warnings)
}

/// Value at `x` under the half-open convention; 0 outside every segment.
pub fn eval_density(f: &PiecewisePolyDensity, bp: &Breakpoints, x: f64) -> f64 {
    match bp.locate(x).and_then(|l| f.segment_at(l)) {
        Some(seg) => poly::horner(&seg.coeffs, x),
        None => 0.0,
    }
}

/// One piece of a density given with its own endpoints, before grid merging.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawPiece {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawDensity {
    pub name: String,
    pub pieces: Vec<RawPiece>,
}

/// Merges private endpoints into one sorted grid and re-splits every piece
/// along it, one segment per elementary interval, coefficients unchanged.
pub fn merge_breakpoints(raw: &[RawDensity], degree: usize) -> Result<DensityFamily> {
    let mut grid = Vec::new();
    for d in raw {
        for (i, p) in d.pieces.iter().enumerate() {
            if !p.lo.is_finite() || !p.hi.is_finite() {
                return structure(format!("density '{}' piece {i}: endpoints must be finite", d.name));
            }
            if p.lo >= p.hi {
                return structure(format!("density '{}' piece {i}: lo = {} >= hi = {}", d.name, p.lo, p.hi));
            }
            grid.push(p.lo);
            grid.push(p.hi);
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let bp = Breakpoints::new(grid)?;
    let index = |x: f64| bp.points().partition_point(|&a| a < x);

    let mut densities = Vec::with_capacity(raw.len());
    for d in raw {
        let mut pieces: Vec<&RawPiece> = d.pieces.iter().collect();
        pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut segments = Vec::new();
        for p in pieces {
            let (b, c) = (index(p.lo), index(p.hi));
            for l in b..c {
                segments.push(PolySegment::new(l, l + 1, p.coeffs.clone()));
            }
        }
        densities.push(PiecewisePolyDensity {
            name: d.name.clone(),
            segments,
        });
    }
    DensityFamily::new(bp, densities, degree)
}

/// Precomputed segment masses for repeated sampling from one density.
pub struct DensitySampler {
    segments: Vec<SamplerSegment>,
    cumulative: Vec<f64>,
    total: f64,
}

struct SamplerSegment {
    lo: f64,
    width: f64,
    local: Vec<f64>,
}

impl DensitySampler {
    pub fn new(f: &PiecewisePolyDensity, bp: &Breakpoints) -> Result<Self> {
        let mut segments = Vec::with_capacity(f.segments.len());
        let mut cumulative = Vec::with_capacity(f.segments.len());
        let mut total = 0.0;
        for seg in &f.segments {
            let (lo, hi) = (bp[seg.start], bp[seg.end]);
            let local = poly::to_local(&seg.coeffs, lo, hi - lo);
            let mass = (hi - lo) * poly::antiderivative_at(&local, 1.0);
            if mass < 0.0 {
                return Err(Error::Sampling(format!(
                    "density '{}' has negative mass {mass} on [{lo}, {hi})",
                    f.name
                )));
            }
            total += mass;
            cumulative.push(total);
            segments.push(SamplerSegment {
                lo,
                width: hi - lo,
                local,
            });
        }
        if !(total > 0.0) {
            return Err(Error::Sampling(format!("density '{}' has nonpositive total mass {total}", f.name)));
        }
        Ok(DensitySampler {
            segments,
            cumulative,
            total,
        })
    }

    pub fn total_mass(&self) -> f64 {
        self.total
    }

    /// Picks a segment by mass, then inverts its CDF by bisection.
    pub fn sample(&self, rng: &mut RandomStream) -> f64 {
        let target = rng.uniform_open() * self.total;
        let i = self
            .cumulative
            .partition_point(|&c| c < target)
            .min(self.segments.len() - 1);
        let seg = &self.segments[i];
        let before = if i == 0 { 0.0 } else { self.cumulative[i - 1] };
        // local CDF in units of the segment variable u, scaled so it ends at the segment mass
        let want = (target - before) / seg.width;
        let tol = 1e-12 * self.total / seg.width;
        let (mut a, mut b) = (0.0f64, 1.0f64);
        let mut u = 0.5;
        for _ in 0..200 {
            u = 0.5 * (a + b);
            let cdf = poly::antiderivative_at(&seg.local, u);
            if (cdf - want).abs() <= tol || u <= a || u >= b {
                break;
            }
            if cdf < want {
                a = u;
            } else {
                b = u;
            }
        }
        let x = seg.lo + seg.width * u;
        // keep inside the half-open segment
        x.min(seg.lo + seg.width * (1.0 - f64::EPSILON)).max(seg.lo)
    }
}

/// One draw from `f`. Builds a [`DensitySampler`]; reuse one for many draws.
pub fn sample_from_density(f: &PiecewisePolyDensity, bp: &Breakpoints, rng: &mut RandomStream) -> Result<f64> {
    Ok(DensitySampler::new(f, bp)?.sample(rng))
}
