use serde::{Deserialize, Serialize};

/// Slack granted to feasibility checks so that vertices computed by line
/// intersection stay inside their own polygon.
pub const FEAS_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePair {
    pub r1: f64,
    pub r2: f64,
}

impl RatePair {
    pub fn new(r1: f64, r2: f64) -> Self {
        Self { r1, r2 }
    }

    pub fn sum(&self) -> f64 {
        self.r1 + self.r2
    }

    /// `self >= other` in both coordinates, with `tol` slack.
    pub fn dominates(&self, other: &RatePair, tol: f64) -> bool {
        self.r1 >= other.r1 - tol && self.r2 >= other.r2 - tol
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.r2, self.r1)
    }
}

/// `a1 * r1 + a2 * r2 <= b` with `a1, a2 >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub a1: f64,
    pub a2: f64,
    pub b: f64,
}

impl HalfPlane {
    pub fn new(a1: f64, a2: f64, b: f64) -> Self {
        debug_assert!(a1 >= 0.0 && a2 >= 0.0 && (a1 > 0.0 || a2 > 0.0));
        Self { a1, a2, b }
    }

    fn holds(&self, p: RatePair, eps: f64) -> bool {
        self.a1 * p.r1 + self.a2 * p.r2 <= self.b + eps * (1.0 + self.b.abs())
    }
}

/// Bounded convex polygon `{r >= 0, every half-plane holds}`. Non-negative
/// coefficients make it downward closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polytope {
    constraints: Vec<HalfPlane>,
}

impl Polytope {
    /// Panics if the polygon is unbounded along either axis.
    pub fn new(constraints: Vec<HalfPlane>) -> Self {
        assert!(
            constraints.iter().any(|c| c.a1 > 0.0) && constraints.iter().any(|c| c.a2 > 0.0),
            "rate polygon must be bounded"
        );
        Self { constraints }
    }

    /// Box `[0, r1] x [0, r2]`.
    pub fn rectangle(corner: RatePair) -> Self {
        Self::new(vec![
            HalfPlane::new(1.0, 0.0, corner.r1),
            HalfPlane::new(0.0, 1.0, corner.r2),
        ])
    }

    pub fn constraints(&self) -> &[HalfPlane] {
        &self.constraints
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.iter().any(|c| c.b < 0.0)
    }

    pub fn contains(&self, p: RatePair) -> bool {
        p.r1 >= -FEAS_EPS && p.r2 >= -FEAS_EPS && self.constraints.iter().all(|c| c.holds(p, FEAS_EPS))
    }

    /// Largest `r1` on the polygon (at `r2 = 0`).
    pub fn max_r1(&self) -> f64 {
        self.constraints
            .iter()
            .filter(|c| c.a1 > 0.0)
            .map(|c| c.b / c.a1)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `r2` achievable together with `r1`, or `None` when `r1` is
    /// outside the polygon's projection.
    pub fn max_r2_at(&self, r1: f64) -> Option<f64> {
        let mut best = f64::INFINITY;
        for c in &self.constraints {
            if c.a2 > 0.0 {
                best = best.min((c.b - c.a1 * r1) / c.a2);
            } else if !c.holds(RatePair::new(r1, 0.0), FEAS_EPS) {
                return None;
            }
        }
        if best < -FEAS_EPS * (1.0 + r1.abs()) {
            None
        } else {
            Some(best.max(0.0))
        }
    }

    /// All vertices, including the ones on the axes.
    pub fn vertices(&self) -> Vec<RatePair> {
        if self.is_empty() {
            return Vec::new();
        }
        let mut lines: Vec<HalfPlane> = self.constraints.clone();
        // r1 = 0 and r2 = 0 as lines a.r = 0
        lines.push(HalfPlane {
            a1: 1.0,
            a2: 0.0,
            b: 0.0,
        });
        lines.push(HalfPlane {
            a1: 0.0,
            a2: 1.0,
            b: 0.0,
        });
        let mut out = Vec::new();
        for i in 0..lines.len() {
            for j in (i + 1)..lines.len() {
                let (p, q) = (lines[i], lines[j]);
                let det = p.a1 * q.a2 - p.a2 * q.a1;
                if det.abs() < 1e-300 {
                    continue;
                }
                let r1 = (p.b * q.a2 - p.a2 * q.b) / det;
                let r2 = (p.a1 * q.b - p.b * q.a1) / det;
                let v = RatePair::new(r1.max(0.0), r2.max(0.0));
                if r1 >= -FEAS_EPS && r2 >= -FEAS_EPS && self.contains(v) {
                    out.push(v);
                }
            }
        }
        out
    }

    /// Maximiser of `w1 r1 + w2 r2` (non-negative weights) over the polygon.
    pub fn max_weighted(&self, w1: f64, w2: f64) -> (f64, RatePair) {
        self.vertices().into_iter().map(|v| (w1 * v.r1 + w2 * v.r2, v)).fold(
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
}
