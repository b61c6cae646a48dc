use serde::{Deserialize, Serialize};

use super::bessel::bessel_j_scaled;
use crate::{Error, Result};

/// `u` at which the tapered-aperture bracket drops to -3 dB.
pub const HALF_POWER_U: f64 = 2.07123;

/// Pattern floor relative to peak, keeps nulls finite.
const FLOOR_DB: f64 = -100.0;

/// Tapered circular-aperture beam pattern
/// `G(theta) = G_max * (J1(u)/(2u) + 36 J3(u)/u^3)^2`, with
/// `u = 2.07123 sin(theta) / sin(theta_3db)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamPattern {
    /// Peak gain, dB.
    pub g_max_db: f64,
    /// One-sided half-power beamwidth, radians.
    pub theta_3db: f64,
}

impl BeamPattern {
    pub fn new(g_max_db: f64, theta_3db: f64) -> Result<Self> {
        if !g_max_db.is_finite() {
            return Err(Error::invalid("g_max must be finite"));
        }
        if !(theta_3db > 0.0 && theta_3db < std::f64::consts::FRAC_PI_2) {
            return Err(Error::invalid(format!(
                "theta_3db must be in (0, pi/2), got {theta_3db}"
            )));
        }
        Ok(Self { g_max_db, theta_3db })
    }

    /// Pattern argument `u` for an off-axis angle.
    pub fn u(&self, theta: f64) -> f64 {
        HALF_POWER_U * theta.sin() / self.theta_3db.sin()
    }

    /// Amplitude bracket, equal to 1 on boresight.
    pub fn bracket(&self, theta: f64) -> f64 {
        if theta == 0.0 {
            return 1.0;
        }
        let u = self.u(theta);
        0.5 * bessel_j_scaled(1, u) + 36.0 * bessel_j_scaled(3, u)
    }

    /// Gain in dB at off-axis angle `theta` (radians).
    pub fn gain_db(&self, theta: f64) -> Result<f64> {
        if !(theta >= 0.0) {
            return Err(Error::invalid(format!(
                "off-axis angle must be non-negative, got {theta}"
            )));
        }
        if theta > std::f64::consts::FRAC_PI_2 {
            return Err(Error::invalid(format!(
                "off-axis angle {theta} outside the pattern domain"
            )));
        }
        if theta == 0.0 {
            return Ok(self.g_max_db);
        }
        let b = self.bracket(theta).abs();
        let rel = if b > 0.0 { 20.0 * b.log10() } else { FLOOR_DB };
        Ok(self.g_max_db + rel.max(FLOOR_DB))
    }

    pub fn gain_linear(&self, theta: f64) -> Result<f64> {
        Ok(crate::db_to_linear(self.gain_db(theta)?))
    }
}
