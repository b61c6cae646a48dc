use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{layout::distance, BeamLayout, BeamPattern};
use crate::rng::{stream_rng, streams};
use crate::{Error, Result};

/// A class of user terminal, e.g. a large fixed dish or a small mobile one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TerminalClass {
    /// Receive-gain offset, dB.
    pub rx_gain_db: f64,
    pub probability: f64,
}

/// Validated terminal-class table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<TerminalClass>", into = "Vec<TerminalClass>")]
pub struct TerminalClasses(Vec<TerminalClass>);

impl TerminalClasses {
    pub fn new(classes: Vec<TerminalClass>) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::invalid("terminal class table is empty"));
        }
        if classes
            .iter()
            .any(|c| !c.rx_gain_db.is_finite() || !(c.probability >= 0.0))
        {
            return Err(Error::invalid(
                "terminal classes need finite gains and non-negative probabilities",
            ));
        }
        let total: f64 = classes.iter().map(|c| c.probability).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "terminal class probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self(classes))
    }

    pub fn as_slice(&self) -> &[TerminalClass] {
        &self.0
    }

    /// Inverse-CDF sampling from a uniform draw in `[0, 1)`.
    fn sample(&self, v: f64) -> &TerminalClass {
        let mut acc = 0.0;
        for c in &self.0 {
            acc += c.probability;
            if v < acc {
                return c;
            }
        }
        self.0.iter().rev().find(|c| c.probability > 0.0).unwrap_or(&self.0[0])
    }
}

impl Default for TerminalClasses {
    /// Two equiprobable classes 10 dB apart.
    fn default() -> Self {
        Self(vec![
            TerminalClass {
                rx_gain_db: 0.0,
                probability: 0.5,
            },
            TerminalClass {
                rx_gain_db: -10.0,
                probability: 0.5,
            },
        ])
    }
}

impl TryFrom<Vec<TerminalClass>> for TerminalClasses {
    type Error = Error;
    fn try_from(v: Vec<TerminalClass>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<TerminalClasses> for Vec<TerminalClass> {
    fn from(c: TerminalClasses) -> Self {
        c.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserTerminal {
    pub id: usize,
    /// Off-nadir direction `(x, y)`, radians.
    pub direction: [f64; 2],
    pub beam_id: usize,
    pub rx_gain_db: f64,
}

/// Drop `users_per_beam` users uniformly inside each beam's -3 dB footprint.
///
/// Points closer to another beam centre than to their own are redrawn, so every
/// user is best served by its own beam. User ids run beam by beam.
pub fn drop_users(
    layout: &BeamLayout,
    pattern: &BeamPattern,
    users_per_beam: usize,
    classes: &TerminalClasses,
    seed: u64,
) -> Result<Vec<UserTerminal>> {
    if users_per_beam == 0 {
        return Err(Error::invalid("users_per_beam must be at least 1"));
    }
    let mut pos_rng = stream_rng(seed, streams::USER_POSITIONS);
    let mut class_rng = stream_rng(seed, streams::USER_CLASSES);
    let radius = pattern.theta_3db;
    let mut users = Vec::with_capacity(layout.k() * users_per_beam);
    for (beam, &center) in layout.centers.iter().enumerate() {
        for _ in 0..users_per_beam {
            let direction = loop {
                let r = radius * pos_rng.gen::<f64>().sqrt();
                let phi = 2.0 * std::f64::consts::PI * pos_rng.gen::<f64>();
                let d = [center[0] + r * phi.cos(), center[1] + r * phi.sin()];
                let own = distance(d, center);
                if layout.centers.iter().all(|&c| distance(d, c) >= own) {
                    break d;
                }
            };
            let class = classes.sample(class_rng.gen::<f64>());
            users.push(UserTerminal {
                id: users.len(),
                direction,
                beam_id: beam,
                rx_gain_db: class.rx_gain_db,
            });
        }
    }
    Ok(users)
}
