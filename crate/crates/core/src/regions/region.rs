use rayon::prelude::*;

use super::polytope::{Polytope, RatePair};

/// Minimum number of evenly spaced `r1` samples on a frontier.
pub const FRONTIER_SAMPLES: usize = 256;

/// Downward-closed achievable region: a union of convex polygons together
/// with its sampled Pareto frontier.
///
/// Membership is decided against the polygons, so it is exact up to
/// rounding. The frontier, sorted by `r1` ascending and `r2` descending, is
/// what gets exported and compared.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRegion {
    pieces: Vec<Polytope>,
    boundary: Vec<RatePair>,
}

impl RateRegion {
    pub fn from_pieces(pieces: Vec<Polytope>) -> Self {
        let pieces: Vec<Polytope> = pieces.into_iter().filter(|p| !p.is_empty()).collect();
        let boundary = frontier(&pieces);
        Self { pieces, boundary }
    }

    /// Region under a set of achievable points (union of their boxes).
    pub fn from_points(points: impl IntoIterator<Item = RatePair>) -> Self {
        Self::from_pieces(points.into_iter().map(Polytope::rectangle).collect())
    }

    pub fn pieces(&self) -> &[Polytope] {
        &self.pieces
    }

    /// Pareto frontier, mutually non-dominated.
    pub fn boundary(&self) -> &[RatePair] {
        &self.boundary
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Whether `p`, relaxed by `tol` per coordinate, is achievable.
    pub fn contains_point(&self, p: RatePair, tol: f64) -> bool {
        let q = RatePair::new((p.r1 - tol).max(0.0), (p.r2 - tol).max(0.0));
        self.pieces.iter().any(|piece| piece.contains(q))
    }

    /// Largest `r1 + r2` and a point achieving it.
    pub fn max_sum_rate(&self) -> (f64, RatePair) {
        self.max_weighted(1.0, 1.0)
    }

    pub fn max_weighted(&self, w1: f64, w2: f64) -> (f64, RatePair) {
        self.pieces.iter().map(|p| p.max_weighted(w1, w2)).fold(
            (f64::NEG_INFINITY, RatePair::new(0.0, 0.0)),
            |best, cur| {
                if cur.0 > best.0 {
                    cur
                } else {
                    best
                }
            },
        )
    }

    /// Largest per-coordinate gap from any boundary point of `self` to the
    /// nearest boundary point of `other`, and vice versa.
    pub fn boundary_distance(&self, other: &RateRegion) -> f64 {
        fn one_way(a: &[RatePair], b: &[RatePair]) -> f64 {
            a.iter()
                .map(|p| {
                    b.iter()
                        .map(|q| (p.r1 - q.r1).abs().max((p.r2 - q.r2).abs()))
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max)
        }
        one_way(&self.boundary, &other.boundary).max(one_way(&other.boundary, &self.boundary))
    }
}

/// True iff every boundary point of `inner` is dominated, within `tol` in each
/// coordinate, by some point of `outer`.
pub fn region_contains(outer: &RateRegion, inner: &RateRegion, tol: f64) -> bool {
    inner.boundary().iter().all(|p| outer.contains_point(*p, tol))
}

fn frontier(pieces: &[Polytope]) -> Vec<RatePair> {
    if pieces.is_empty() {
        return Vec::new();
    }
    let r1_max = pieces.iter().map(Polytope::max_r1).fold(0.0, f64::max);
    let mut xs: Vec<f64> = (0..=FRONTIER_SAMPLES)
        .map(|i| r1_max * i as f64 / FRONTIER_SAMPLES as f64)
        .collect();
    for p in pieces {
        xs.extend(p.vertices().into_iter().map(|v| v.r1));
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * (1.0 + b.abs()));

    let samples: Vec<RatePair> = xs
        .par_iter()
        .filter_map(|&r1| {
            pieces
                .iter()
                .filter_map(|p| p.max_r2_at(r1))
                .reduce(f64::max)
                .map(|r2| RatePair::new(r1, r2))
        })
        .collect();
    pareto_filter(samples)
}

/// Keeps points not weakly dominated by a later one. Input sorted by `r1`.
fn pareto_filter(sorted_by_r1: Vec<RatePair>) -> Vec<RatePair> {
    let mut out: Vec<RatePair> = Vec::new();
    let mut best_r2: Option<f64> = None;
    for p in sorted_by_r1.into_iter().rev() {
        if best_r2.is_none_or(|b| p.r2 > b + 1e-13 * (1.0 + b.abs())) {
            best_r2 = Some(p.r2);
            out.push(p);
        }
    }
    out.reverse();
    out
}
