//! Sampling primitives shared by the multi-level estimators.

mod mcmc;
mod quantile;
mod resample;

pub use mcmc::{mcmc_step, AcceptRegion, BinThresholds, Everywhere, McmcConfig, Particle};
pub use quantile::interp_quantile;
pub use resample::{residual_resample, OffspringCounts};
