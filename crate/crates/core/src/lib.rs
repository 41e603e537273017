//! Energy-efficiency-optimal operating points for a multi-antenna
//! downlink: transmit power, bandwidth and antenna count.
//!
//! - [`model`]: capacity, power consumption and EE of a design point.
//! - [`lambertw`]: principal branch of the Lambert W function.
//! - [`closedform`]: closed-form maximizers and optimal ratios.
//! - [`numericopt`]: bandwidth bisection, grid oracle and EE surfaces.
//! - [`jointopt`]: constrained joint maximization over (P, B, M).
//! - [`cli`]: configuration files and the `ee-opt` command line.

pub mod cli;
pub mod closedform;
pub mod error;
pub mod jointopt;
pub mod lambertw;
pub mod model;
pub mod numericopt;

pub use error::{Degeneracy, Error, Result};
pub use jointopt::{joint_optimize, OptimizationResult};
pub use model::{ChannelGain, DesignPoint, HardwareProfile, Limits};
