//! Numerical simulator for non-orthogonal multiple access (NOMA) in multibeam
//! satellite forward links.
//!
//! The crate is organised bottom-up:
//!
//! * [`chanmodel`]: beam lattice, tapered-aperture beam pattern, user drops and
//!   the noise-normalised channel matrix.
//! * [`regions`]: two-user achievable rate regions (interference as noise,
//!   simultaneous decoding, simultaneous non-unique decoding, superposition
//!   broadcast, Han–Kobayashi rate splitting, orthogonal sharing).
//! * [`precode`]: zero-forcing and regularised precoders under per-feed power
//!   limits, layered (two users per beam) rates and joint broadcast/multicast.
//! * [`sched`]: intra-beam user pairing heuristics plus an exhaustive oracle.
//! * [`syssim`]: Monte Carlo comparison of transmission schemes and schedulers.
//! * [`cli`] and [`output`]: configuration, subcommands and CSV artifacts.
//!
//! All rates are Shannon rates, `C(x) = log2(1 + x)`.

// `!(x > 0.0)` guards deliberately reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chanmodel;
pub mod cli;
pub mod config;
pub mod error;
pub mod output;
pub mod precode;
pub mod regions;
pub mod rng;
pub mod sched;
pub mod syssim;

pub use error::{Error, Result};

/// Gaussian channel capacity in b/s/Hz.
#[inline]
pub fn capacity(x: f64) -> f64 {
    (1.0 + x).log2()
}

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
