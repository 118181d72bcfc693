use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::limit_state::{EvalCounter, LimitState};
use crate::partition::{BinIndex, Partition};
use crate::rng::{Point, RandomStream};

/// Autoregressive Gaussian proposal `ξ = c·θ + sqrt(1 − c²)·ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McmcConfig {
    corr: f64,
}

impl McmcConfig {
    pub const DEFAULT_CORR: f64 = 0.8;

    pub fn new(corr: f64) -> Result<Self, ConfigError> {
        if !(corr > 0.0 && corr < 1.0) {
            return Err(ConfigError::invalid(
                "mcmc_corr",
                format!("must lie in (0, 1), got {corr}"),
            ));
        }
        Ok(McmcConfig { corr })
    }

    pub fn corr(&self) -> f64 {
        self.corr
    }
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            corr: Self::DEFAULT_CORR,
        }
    }
}

/// A population member: its position, limit-state value and bin.
#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub point: Point,
    pub g: f64,
    pub bin: BinIndex,
}

/// Target region of a chain: `N(0, I)` restricted to this set.
pub trait AcceptRegion {
    /// Whether the region intersects bin `bin` at all. Proposals landing in
    /// a bin that is not admitted are rejected without evaluating `g`.
    fn admits_bin(&self, bin: BinIndex) -> bool;

    /// Membership of a point with limit-state value `g` in (admitted) `bin`.
    fn admits(&self, bin: BinIndex, g: f64) -> bool;
}

/// The whole space.
#[derive(Debug, Clone, Copy)]
pub struct Everywhere;

impl AcceptRegion for Everywhere {
    fn admits_bin(&self, _: BinIndex) -> bool {
        true
    }

    fn admits(&self, _: BinIndex, _: f64) -> bool {
        true
    }
}

/// `∪_{j active} {θ ∈ B_j : g(θ) ≤ γ_j}`.
#[derive(Debug, Clone, Copy)]
pub struct BinThresholds<'a> {
    pub thresholds: &'a [f64],
    pub active: &'a [bool],
}

impl AcceptRegion for BinThresholds<'_> {
    fn admits_bin(&self, bin: BinIndex) -> bool {
        self.active[bin.index()]
    }

    fn admits(&self, bin: BinIndex, g: f64) -> bool {
        g <= self.thresholds[bin.index()]
    }
}

/// One Metropolis step targeting `N(0, I)` truncated to `region`.
///
/// The autoregressive proposal is reversible with respect to `N(0, I)`, so
/// the acceptance ratio reduces to the indicator of the region. Returns the
/// new state and whether the proposal was accepted; on rejection the
/// current state is returned unchanged.
pub fn mcmc_step<R: AcceptRegion + ?Sized>(
    current: &Particle,
    region: &R,
    cfg: &McmcConfig,
    stream: &mut RandomStream,
    ls: &LimitState,
    partition: &Partition,
    ctr: &mut EvalCounter,
) -> (Particle, bool) {
    let c = cfg.corr;
    let s = (1.0 - c * c).sqrt();
    let proposal: Vec<f64> = current
        .point
        .coords()
        .iter()
        .map(|x| c * x + s * stream.normal())
        .collect();
    let point = Point::new(proposal);
    let bin = partition.classify(&point);
    if !region.admits_bin(bin) {
        return (current.clone(), false);
    }
    let g = ls.evaluate_unchecked(&point, ctr);
    if region.admits(bin, g) {
        (Particle { point, g, bin }, true)
    } else {
        (current.clone(), false)
    }
}
