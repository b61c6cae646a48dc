use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{layout::distance, BeamLayout, BeamPattern, UserTerminal};
use crate::rng::{stream_rng, streams};
use crate::{db_to_linear, Error, Result};

/// Power and noise budget of the forward link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    /// Saturated power per feed, W.
    pub p_feed_sat_w: f64,
    /// Amplifier output back-off, dB.
    pub obo_db: f64,
    /// Path loss, Boltzmann noise and receiver temperature lumped together,
    /// dBW. `|h|^2 * p` is a linear SNR after dividing by this.
    pub noise_ref_db: f64,
    /// User bandwidth B, Hz.
    pub bandwidth_hz: f64,
}

impl Default for LinkParams {
    fn default() -> Self {
        Self {
            p_feed_sat_w: 55.0,
            obo_db: 5.0,
            noise_ref_db: 51.4,
            bandwidth_hz: 500e6,
        }
    }
}

impl LinkParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_feed_sat_w > 0.0 && self.p_feed_sat_w.is_finite()) {
            return Err(Error::invalid("p_feed_sat must be positive"));
        }
        if !(self.obo_db >= 0.0 && self.obo_db.is_finite()) {
            return Err(Error::invalid("obo must be non-negative"));
        }
        if !self.noise_ref_db.is_finite() {
            return Err(Error::invalid("noise_ref must be finite"));
        }
        if !(self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite()) {
            return Err(Error::invalid("bandwidth must be positive"));
        }
        Ok(())
    }

    /// Usable power per feed after back-off, W.
    pub fn p_feed_eff(&self) -> f64 {
        self.p_feed_sat_w * db_to_linear(-self.obo_db)
    }
}

/// Noise-normalised complex channel, users x feeds.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    h: DMatrix<Complex64>,
}

impl ChannelMatrix {
    pub fn new(h: DMatrix<Complex64>) -> Result<Self> {
        if h.nrows() == 0 || h.ncols() == 0 {
            return Err(Error::invalid("channel matrix is empty"));
        }
        if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("channel matrix has non-finite entries"));
        }
        for (u, row) in h.row_iter().enumerate() {
            if row.iter().all(|z| z.norm_sqr() == 0.0) {
                return Err(Error::invalid(format!("channel row {u} is all zero")));
            }
        }
        Ok(Self { h })
    }

    /// Build from real row-major data (handy in tests and examples).
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("ragged channel rows"));
        }
        Self::new(DMatrix::from_fn(rows.len(), n, |i, j| Complex64::new(rows[i][j], 0.0)))
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.h
    }

    pub fn u_count(&self) -> usize {
        self.h.nrows()
    }

    pub fn n_count(&self) -> usize {
        self.h.ncols()
    }

    pub fn get(&self, user: usize, feed: usize) -> Complex64 {
        self.h[(user, feed)]
    }

    /// `|h[u, n]|^2`.
    pub fn power(&self, user: usize, feed: usize) -> f64 {
        self.h[(user, feed)].norm_sqr()
    }

    pub fn row_norm_sqr(&self, user: usize) -> f64 {
        self.h.row(user).iter().map(|z| z.norm_sqr()).sum()
    }

    /// Sub-matrix with the given users, in order.
    pub fn select_rows(&self, users: &[usize]) -> Self {
        Self {
            h: self.h.select_rows(users.iter()),
        }
    }
}

/// Channel with one feed per beam, placed at the beam centres.
pub fn build_channel(
    layout: &BeamLayout,
    users: &[UserTerminal],
    pattern: &BeamPattern,
    params: &LinkParams,
    seed: u64,
) -> Result<ChannelMatrix> {
    build_channel_with_feeds(&layout.centers, users, pattern, params, seed)
}

/// Channel for an explicit feed layout; feed `n` radiates the pattern centred
/// on `feeds[n]`.
///
/// Each user row carries one common phase drawn uniformly in `[0, 2pi)`.
pub fn build_channel_with_feeds(
    feeds: &[[f64; 2]],
    users: &[UserTerminal],
    pattern: &BeamPattern,
    params: &LinkParams,
    seed: u64,
) -> Result<ChannelMatrix> {
    params.validate()?;
    if users.is_empty() || feeds.is_empty() {
        return Err(Error::invalid("need at least one user and one feed"));
    }
    let noise = db_to_linear(params.noise_ref_db);
    let mut phase_rng = stream_rng(seed, streams::CHANNEL_PHASES);
    let mut h = DMatrix::<Complex64>::zeros(users.len(), feeds.len());
    for (u, user) in users.iter().enumerate() {
        if !user.direction.iter().all(|v| v.is_finite()) || !user.rx_gain_db.is_finite() {
            return Err(Error::invalid(format!("user {} has non-finite geometry", user.id)));
        }
        let phase = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase_rng.gen::<f64>());
        let rx = db_to_linear(user.rx_gain_db);
        for (n, &feed) in feeds.iter().enumerate() {
            let theta = distance(user.direction, feed);
            let g = pattern
                .gain_linear(theta)
                .map_err(|_| Error::invalid(format!("user {} lies outside the pattern domain of feed {n}", user.id)))?;
            h[(u, n)] = phase * (g * rx / noise).sqrt();
        }
    }
    ChannelMatrix::new(h)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkMetrics {
    pub snr: f64,
    pub inr: f64,
}

/// Per-user SNR and co-channel INR without precoding.
///
/// Beam `b` is radiated by feed `b` with power `powers[b]`; `colors[b]` is its
/// reuse colour (see [`BeamLayout::colors`]). Only same-colour beams interfere.
pub fn link_metrics(
    h: &ChannelMatrix,
    powers: &[f64],
    assignment: &[usize],
    colors: &[usize],
) -> Result<Vec<LinkMetrics>> {
    if powers.len() != colors.len() || powers.len() > h.n_count() {
        return Err(Error::invalid("powers and colours must cover the beam feeds"));
    }
    if assignment.len() != h.u_count() {
        return Err(Error::invalid("assignment must cover every user"));
    }
    if powers.iter().any(|p| !(*p >= 0.0)) {
        return Err(Error::invalid("feed powers must be non-negative"));
    }
    assignment
        .iter()
        .enumerate()
        .map(|(u, &b)| {
            if b >= powers.len() {
                return Err(Error::invalid(format!("user {u} assigned to unknown beam {b}")));
            }
            let snr = h.power(u, b) * powers[b];
            let inr = (0..powers.len())
                .filter(|&j| j != b && colors[j] == colors[b])
                .map(|j| h.power(u, j) * powers[j])
                .sum();
            Ok(LinkMetrics { snr, inr })
        })
        .collect()
}
