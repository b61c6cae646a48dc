//! Multibeam geometry and the noise-normalised channel.

mod bessel;
mod channel;
mod layout;
mod pattern;
mod users;

pub use bessel::{bessel_j, bessel_j_scaled};
pub use channel::{build_channel, build_channel_with_feeds, link_metrics, ChannelMatrix, LinkMetrics, LinkParams};
pub use layout::{distance, place_beams, BeamLayout, Reuse};
pub use pattern::{BeamPattern, HALF_POWER_U};
pub use users::{drop_users, TerminalClass, TerminalClasses, UserTerminal};
