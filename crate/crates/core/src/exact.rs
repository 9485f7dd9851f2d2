//! Exact L1 distances between piecewise polynomials.

use crate::density::{Breakpoints, DensityFamily, PiecewisePolyDensity};
use crate::pipeline::{DistanceMatrix, Method, RunEcho};
use crate::poly;

/// `∫ |f - g|`, exact up to the root-isolation tolerance.
///
/// The grid is swept over the maximal ranges on which neither density changes
/// segment; on each range `f - g` is a single polynomial whose absolute value is
/// integrated by [`poly::abs_integral`].
pub fn exact_l1_distance(f: &PiecewisePolyDensity, g: &PiecewisePolyDensity, bp: &Breakpoints) -> f64 {
    let mut cuts: Vec<usize> = f
        .segments
        .iter()
        .chain(&g.segments)
        .flat_map(|s| [s.start, s.end])
        .collect();
    cuts.sort_unstable();
    cuts.dedup();

    let mut total = 0.0;
    let mut diff = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let fs = f.segment_at(lo).map(|s| s.coeffs.as_slice()).unwrap_or(&[]);
        let gs = g.segment_at(lo).map(|s| s.coeffs.as_slice()).unwrap_or(&[]);
        if fs.is_empty() && gs.is_empty() {
            continue;
        }
        diff.clear();
        diff.resize(fs.len().max(gs.len()), 0.0);
        for (k, c) in fs.iter().enumerate() {
            diff[k] += c;
        }
        for (k, c) in gs.iter().enumerate() {
            diff[k] -= c;
        }
        total += poly::abs_integral(&diff, bp[lo], bp[hi]);
    }
    total
}

/// Symmetric matrix of exact distances with zero diagonal.
pub fn exact_all_pairs(family: &DensityFamily) -> DistanceMatrix {
    let m = family.m();
    let mut out = DistanceMatrix::zeros(family.names(), Method::Exact, RunEcho::default());
    for j in 0..m {
        for k in (j + 1)..m {
            let d = exact_l1_distance(&family.densities[j], &family.densities[k], &family.breakpoints);
            out.set(j, k, d);
        }
    }
    out
}
