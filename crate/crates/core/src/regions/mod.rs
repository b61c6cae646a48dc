//! Two-user achievable rate regions.
//!
//! Receiver `k` sees its own transmitter at SNR `s_k` and the other
//! transmitter at INR `i_k` (both noise-normalised).

mod polytope;
mod region;

use serde::{Deserialize, Serialize};

pub use polytope::{HalfPlane, Polytope, RatePair, FEAS_EPS};
pub use region::{region_contains, RateRegion, FRONTIER_SAMPLES};

use crate::{capacity, Error, Result};

/// Default tolerance for region comparisons, b/s/Hz.
pub const DEFAULT_TOL: f64 = 1e-6;

/// Default step of the power-split grids.
pub const DEFAULT_GRID_STEP: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkPair {
    pub s1: f64,
    pub s2: f64,
    pub i1: f64,
    pub i2: f64,
}

impl LinkPair {
    pub fn new(s1: f64, s2: f64, i1: f64, i2: f64) -> Result<Self> {
        let l = Self { s1, s2, i1, i2 };
        l.validate()?;
        Ok(l)
    }

    pub fn symmetric(snr: f64, inr: f64) -> Result<Self> {
        Self::new(snr, snr, inr, inr)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("s1", self.s1), ("s2", self.s2), ("i1", self.i1), ("i2", self.i2)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Receiver roles exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            s1: self.s2,
            s2: self.s1,
            i1: self.i2,
            i2: self.i1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodingMode {
    /// Interference treated as noise.
    Ian,
    /// Simultaneous (unique) decoding of both messages.
    Sd,
    /// Simultaneous non-unique decoding.
    Snd,
}

impl DecodingMode {
    pub fn tag(self) -> &'static str {
        match self {
            DecodingMode::Ian => "ian",
            DecodingMode::Sd => "sd",
            DecodingMode::Snd => "snd",
        }
    }
}

impl std::str::FromStr for DecodingMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ian" | "sud" => Ok(DecodingMode::Ian),
            "sd" => Ok(DecodingMode::Sd),
            "snd" => Ok(DecodingMode::Snd),
            other => Err(Error::invalid(format!("unknown decoding mode '{other}'"))),
        }
    }
}

/// `log2(1 + snr / (1 + inr))`.
pub fn rate_ian(snr: f64, inr: f64) -> Result<f64> {
    if !(snr >= 0.0) || !(inr >= 0.0) {
        return Err(Error::invalid(format!(
            "snr and inr must be non-negative, got ({snr}, {inr})"
        )));
    }
    Ok(capacity(snr / (1.0 + inr)))
}

// Per-receiver constraint sets. `own`/`other` map the receiver's rates onto
// (r1, r2) coordinates.

fn ian_corner(link: &LinkPair) -> RatePair {
    RatePair::new(capacity(link.s1 / (1.0 + link.i1)), capacity(link.s2 / (1.0 + link.i2)))
}

/// Receiver `k` decodes both messages non-uniquely: own rate and sum rate.
fn nonunique_constraints(link: &LinkPair, receiver: usize) -> Vec<HalfPlane> {
    let (s, i) = if receiver == 0 {
        (link.s1, link.i1)
    } else {
        (link.s2, link.i2)
    };
    let own = if receiver == 0 {
        HalfPlane::new(1.0, 0.0, capacity(s))
    } else {
        HalfPlane::new(0.0, 1.0, capacity(s))
    };
    vec![own, HalfPlane::new(1.0, 1.0, capacity(s + i))]
}

fn ian_constraint(link: &LinkPair, receiver: usize) -> HalfPlane {
    let c = ian_corner(link);
    if receiver == 0 {
        HalfPlane::new(1.0, 0.0, c.r1)
    } else {
        HalfPlane::new(0.0, 1.0, c.r2)
    }
}

/// Receiver `k` treats interference as noise or decodes it non-uniquely.
pub fn snd_receiver_accepts(link: &LinkPair, receiver: usize, p: RatePair, tol: f64) -> bool {
    let q = RatePair::new((p.r1 - tol).max(0.0), (p.r2 - tol).max(0.0));
    let holds = |c: &HalfPlane| c.a1 * q.r1 + c.a2 * q.r2 <= c.b + FEAS_EPS * (1.0 + c.b);
    holds(&ian_constraint(link, receiver)) || nonunique_constraints(link, receiver).iter().all(holds)
}

/// The four convex pieces whose union is the SND region: each receiver picks
/// either its IAN half-plane or its non-unique decoding set.
pub fn snd_pieces(link: &LinkPair) -> Vec<Polytope> {
    let mut pieces = Vec::with_capacity(4);
    for rx0_decodes in [false, true] {
        for rx1_decodes in [false, true] {
            let mut c = Vec::new();
            if rx0_decodes {
                c.extend(nonunique_constraints(link, 0));
            } else {
                c.push(ian_constraint(link, 0));
            }
            if rx1_decodes {
                c.extend(nonunique_constraints(link, 1));
            } else {
                c.push(ian_constraint(link, 1));
            }
            // Each branch bounds only its own rate; add the other receiver's
            // single-user bound, which every branch implies anyway.
            c.push(HalfPlane::new(1.0, 0.0, capacity(link.s1)));
            c.push(HalfPlane::new(0.0, 1.0, capacity(link.s2)));
            pieces.push(Polytope::new(c));
        }
    }
    pieces
}

fn sd_piece(link: &LinkPair) -> Polytope {
    let mut c = nonunique_constraints(link, 0);
    c.push(HalfPlane::new(0.0, 1.0, capacity(link.i1)));
    c.extend(nonunique_constraints(link, 1));
    c.push(HalfPlane::new(1.0, 0.0, capacity(link.i2)));
    Polytope::new(c)
}

/// Two-user region under interference-as-noise, simultaneous decoding, or
/// simultaneous non-unique decoding.
pub fn region_two_user(link: &LinkPair, mode: DecodingMode) -> Result<RateRegion> {
    link.validate()?;
    Ok(match mode {
        DecodingMode::Ian => RateRegion::from_points([ian_corner(link)]),
        DecodingMode::Sd => RateRegion::from_pieces(vec![sd_piece(link)]),
        DecodingMode::Snd => RateRegion::from_pieces(snd_pieces(link)),
    })
}

/// Largest SND sum rate and where it is attained, without building a frontier.
/// Each piece is bounded by `r1 <= a1`, `r2 <= a2` and `r1 + r2 <= c`; among
/// the maximisers the one with the largest `r1` is returned.
pub fn snd_max_sum_rate(link: &LinkPair) -> (f64, RatePair) {
    let ian = ian_corner(link);
    let mut best = (f64::NEG_INFINITY, RatePair::new(0.0, 0.0));
    for rx0_decodes in [false, true] {
        for rx1_decodes in [false, true] {
            let a1 = if rx0_decodes { capacity(link.s1) } else { ian.r1 };
            let a2 = if rx1_decodes { capacity(link.s2) } else { ian.r2 };
            let mut c = f64::INFINITY;
            if rx0_decodes {
                c = c.min(capacity(link.s1 + link.i1));
            }
            if rx1_decodes {
                c = c.min(capacity(link.s2 + link.i2));
            }
            let at = if a1 + a2 <= c {
                RatePair::new(a1, a2)
            } else {
                let r1 = a1.min(c);
                RatePair::new(r1, (c - r1).min(a2))
            };
            let sum = at.sum();
            if sum > best.0 || (sum == best.0 && at.r1 > best.1.r1) {
                best = (sum, at);
            }
        }
    }
    best
}

/// Superposition-coded broadcast with successive cancellation at the strong
/// user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcNomaParams {
    /// Total power.
    pub p: f64,
    /// Strong user's channel power gain.
    pub g_s: f64,
    /// Weak user's channel power gain.
    pub g_w: f64,
    /// Power fraction of the weak user.
    pub beta: f64,
}

impl BcNomaParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 0.0 && self.p.is_finite()) {
            return Err(Error::invalid("power must be finite and non-negative"));
        }
        if !(self.g_w >= 0.0 && self.g_s.is_finite()) {
            return Err(Error::invalid("channel gains must be finite and non-negative"));
        }
        if self.g_s < self.g_w {
            return Err(Error::invalid(format!(
                "strong gain {} below weak gain {}",
                self.g_s, self.g_w
            )));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::invalid(format!("beta {} outside [0, 1]", self.beta)));
        }
        Ok(())
    }

    /// `(r_weak, r_strong)`.
    pub fn rates(&self) -> Result<RatePair> {
        self.validate()?;
        let w = self.beta * self.p * self.g_w;
        let s = (1.0 - self.beta) * self.p;
        Ok(RatePair::new(
            capacity(w / (1.0 + s * self.g_w)),
            capacity(s * self.g_s),
        ))
    }
}

/// `n + 1` evenly spaced values on `[0, 1]` with the given step (end point
/// always included).
pub fn unit_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::invalid(format!("grid step must be in (0, 1], got {step}")));
    }
    let n = (1.0 / step).round().max(1.0) as usize;
    Ok((0..=n).map(|i| i as f64 / n as f64).collect())
}

/// Union over the power-split grid of the broadcast NOMA points, as
/// `(r_weak, r_strong)`.
pub fn region_noma_bc(base: &BcNomaParams, betas: &[f64]) -> Result<RateRegion> {
    if betas.is_empty() {
        return Err(Error::invalid("beta grid is empty"));
    }
    let points = betas
        .iter()
        .map(|&beta| BcNomaParams { beta, ..*base }.rates())
        .collect::<Result<Vec<_>>>()?;
    Ok(RateRegion::from_points(points))
}

/// Private-power fractions of a rate-splitting scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HkSplit {
    pub lam1: f64,
    pub lam2: f64,
}

impl HkSplit {
    pub fn new(lam1: f64, lam2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lam1) || !(0.0..=1.0).contains(&lam2) {
            return Err(Error::invalid(format!(
                "split fractions must be in [0, 1], got ({lam1}, {lam2})"
            )));
        }
        Ok(Self { lam1, lam2 })
    }

    /// Full product grid with the given step.
    pub fn grid(step: f64) -> Result<Vec<HkSplit>> {
        let g = unit_grid(step)?;
        Ok(g.iter()
            .flat_map(|&a| g.iter().map(move |&b| HkSplit { lam1: a, lam2: b }))
            .collect())
    }
}

/// Compact Han–Kobayashi region with Gaussian inputs for one split, no time
/// sharing.
pub fn hk_polytope(link: &LinkPair, split: HkSplit) -> Polytope {
    let LinkPair { s1, s2, i1, i2 } = *link;
    let HkSplit { lam1, lam2 } = split;
    let d1 = 1.0 + lam2 * i1;
    let d2 = 1.0 + lam1 * i2;
    // Receiver 1 terms.
    let all_1 = capacity((s1 + (1.0 - lam2) * i1) / d1);
    let priv_1 = capacity(lam1 * s1 / d1);
    let cross_1 = capacity((lam1 * s1 + (1.0 - lam2) * i1) / d1);
    // Receiver 2 terms.
    let all_2 = capacity((s2 + (1.0 - lam1) * i2) / d2);
    let priv_2 = capacity(lam2 * s2 / d2);
    let cross_2 = capacity((lam2 * s2 + (1.0 - lam1) * i2) / d2);
    Polytope::new(vec![
        HalfPlane::new(1.0, 0.0, capacity(s1 / d1)),
        HalfPlane::new(0.0, 1.0, capacity(s2 / d2)),
        HalfPlane::new(1.0, 1.0, all_1 + priv_2),
        HalfPlane::new(1.0, 1.0, priv_1 + all_2),
        HalfPlane::new(1.0, 1.0, cross_1 + cross_2),
        HalfPlane::new(2.0, 1.0, all_1 + priv_1 + cross_2),
        HalfPlane::new(1.0, 2.0, all_2 + priv_2 + cross_1),
    ])
}

/// Union of [`hk_polytope`] over the split grid.
pub fn region_hk(link: &LinkPair, splits: &[HkSplit]) -> Result<RateRegion> {
    link.validate()?;
    if splits.is_empty() {
        return Err(Error::invalid("split grid is empty"));
    }
    for s in splits {
        HkSplit::new(s.lam1, s.lam2)?;
    }
    Ok(RateRegion::from_pieces(
        splits.iter().map(|&s| hk_polytope(link, s)).collect(),
    ))
}

/// Power-preserving frequency sharing: user 1 gets fraction `alpha` of the
/// band at power spectral density scaled by `1/alpha`.
pub fn fdm_point(link: &LinkPair, alpha: f64) -> RatePair {
    let share = |frac: f64, s: f64| if frac <= 0.0 { 0.0 } else { frac * capacity(s / frac) };
    RatePair::new(share(alpha, link.s1), share(1.0 - alpha, link.s2))
}

/// Union over the sharing grid of [`fdm_point`]. Independent of the INRs.
pub fn region_orthogonal(link: &LinkPair, alphas: &[f64]) -> Result<RateRegion> {
    link.validate()?;
    if alphas.is_empty() {
        return Err(Error::invalid("sharing grid is empty"));
    }
    if alphas.iter().any(|a| !(0.0..=1.0).contains(a)) {
        return Err(Error::invalid("sharing fractions must be in [0, 1]"));
    }
    Ok(RateRegion::from_points(alphas.iter().map(|&a| fdm_point(link, a))))
}
