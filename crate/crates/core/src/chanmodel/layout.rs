use serde::{Deserialize, Serialize};

use super::BeamPattern;
use crate::{Error, Result};

/// Frequency-reuse scheme of the beam lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reuse {
    Full,
    TwoColor,
    FourColor,
}

impl Reuse {
    pub fn palette(self) -> usize {
        match self {
            Reuse::Full => 1,
            Reuse::TwoColor => 2,
            Reuse::FourColor => 4,
        }
    }

    /// Bandwidth share of one beam.
    pub fn bandwidth_fraction(self) -> f64 {
        1.0 / self.palette() as f64
    }
}

impl std::str::FromStr for Reuse {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Reuse::Full),
            "two_color" | "two-color" => Ok(Reuse::TwoColor),
            "four_color" | "four-color" => Ok(Reuse::FourColor),
            other => Err(Error::invalid(format!("unknown reuse scheme '{other}'"))),
        }
    }
}

/// Beam boresights on a hexagonal lattice centred at nadir.
///
/// Directions are small-angle offsets `(x, y)` in radians from nadir, so the
/// off-axis angle between two directions is their Euclidean distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamLayout {
    pub centers: Vec<[f64; 2]>,
    pub spacing: f64,
    pub reuse: Reuse,
}

/// Place `k` beams on a hex lattice with centre-to-centre `spacing`.
///
/// Cells are filled ring by ring; within a ring by increasing azimuth
/// starting at `+x`. Hex numbers (1, 7, 19, 37, ...) give complete rings.
pub fn place_beams(k: usize, spacing: f64) -> Result<BeamLayout> {
    if k == 0 {
        return Err(Error::invalid("beam count must be at least 1"));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::invalid(format!("beam spacing must be positive, got {spacing}")));
    }
    let mut rings = 0i64;
    while 1 + 3 * rings * (rings + 1) < k as i64 {
        rings += 1;
    }
    let mut cells: Vec<(i64, f64, [f64; 2])> = Vec::new();
    for q in -rings..=rings {
        for r in -rings..=rings {
            let d = q.abs().max(r.abs()).max((q + r).abs());
            if d > rings {
                continue;
            }
            let x = spacing * (q as f64 + 0.5 * r as f64);
            let y = spacing * (r as f64 * 3f64.sqrt() / 2.0);
            let mut az = y.atan2(x);
            if az < -1e-12 {
                az += 2.0 * std::f64::consts::PI;
            }
            cells.push((d, az.max(0.0), [x, y]));
        }
    }
    cells.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    Ok(BeamLayout {
        centers: cells.into_iter().take(k).map(|c| c.2).collect(),
        spacing,
        reuse: Reuse::Full,
    })
}

impl BeamLayout {
    pub fn with_reuse(mut self, reuse: Reuse) -> Self {
        self.reuse = reuse;
        self
    }

    pub fn k(&self) -> usize {
        self.centers.len()
    }

    /// Beams whose centres are one lattice step apart.
    pub fn neighbors(&self, beam: usize) -> Vec<usize> {
        let c = self.centers[beam];
        (0..self.k())
            .filter(|&j| j != beam && (distance(c, self.centers[j]) - self.spacing).abs() < 1e-6 * self.spacing)
            .collect()
    }

    /// Colour per beam under the layout's reuse scheme.
    ///
    /// Greedy in beam-index order, lowest free colour first. If every colour
    /// is taken by a neighbour, the colour with the fewest conflicting
    /// neighbours wins (lowest index on ties).
    pub fn colors(&self) -> Vec<usize> {
        let palette = self.reuse.palette();
        let mut colors: Vec<usize> = Vec::with_capacity(self.k());
        for b in 0..self.k() {
            let mut used = vec![0usize; palette];
            for j in self.neighbors(b) {
                if j < b {
                    used[colors[j]] += 1;
                }
            }
            let best = (0..palette).min_by_key(|&c| (used[c], c)).unwrap_or(0);
            colors.push(best);
        }
        colors
    }

    /// Index of the beam whose centre is closest to `dir` (lowest index on ties).
    pub fn nearest_beam(&self, dir: [f64; 2]) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, &c) in self.centers.iter().enumerate() {
            let d = distance(c, dir);
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }

    /// Gain at the midpoint between adjacent beams relative to boresight, dB.
    pub fn crossover_db(&self, pattern: &BeamPattern) -> Result<f64> {
        Ok(pattern.gain_db(self.spacing / 2.0)? - pattern.g_max_db)
    }
}

pub fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}
