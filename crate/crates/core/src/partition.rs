//! Conic partitions ("bins") of the input space with exact bin probabilities.
//!
//! Every bin is a cone: it contains whole half-lines from the origin, so
//! the probability mass of a bin under `N(0, I)` only depends on its set of
//! directions and is known in closed form.
//!
//! Points that fall exactly on a cut belong to the `≥` side of that cut.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::rng::Point;

const TAU: f64 = 2.0 * PI;

/// Zero-based bin index. Displayed one-based (`B1`, `B2`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BinIndex(usize);

impl BinIndex {
    pub fn new(index: usize) -> Self {
        BinIndex(index)
    }

    /// Zero-based position, usable to index per-bin vectors.
    pub fn index(self) -> usize {
        self.0
    }

    /// One-based label.
    pub fn label(self) -> usize {
        self.0 + 1
    }
}

impl Serialize for BinIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(self.label() as u64)
    }
}

impl fmt::Display for BinIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B{}", self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Single,
    /// Sorted cut angles; bin `k` is `[cuts[k], cuts[k + 1])`, the last bin
    /// wraps around to `cuts[0] + 2π`.
    Angular {
        cuts: Vec<f64>,
    },
    Halfspace {
        axis: usize,
    },
    Orthants,
}

/// Declarative description of a partition, as found in run configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PartitionSpec {
    Single,
    /// Cut angles in radians.
    Angular {
        cuts: Vec<f64>,
    },
    /// One-based coordinate index.
    Halfspace {
        axis: usize,
    },
    Orthants,
}

impl PartitionSpec {
    pub fn build(&self, dim: usize) -> Result<Partition, ConfigError> {
        match self {
            PartitionSpec::Single => Partition::single_bin(dim),
            PartitionSpec::Angular { cuts } => {
                if dim != 2 {
                    return Err(ConfigError::DimensionMismatch {
                        expected: 2,
                        got: dim,
                    });
                }
                Partition::angular_sectors_2d(cuts)
            }
            PartitionSpec::Halfspace { axis } => Partition::halfspace(*axis, dim),
            PartitionSpec::Orthants => Partition::orthants(dim),
        }
    }
}

/// A partition of `R^n` into `J` cones with known probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    dim: usize,
    kind: Kind,
    probs: Vec<f64>,
}

impl Partition {
    /// The trivial partition; directional subset simulation on it is plain
    /// subset simulation.
    pub fn single_bin(dim: usize) -> Result<Self, ConfigError> {
        check_dim(dim)?;
        Ok(Partition {
            dim,
            kind: Kind::Single,
            probs: vec![1.0],
        })
    }

    /// Sectors of the plane between consecutive polar angles.
    ///
    /// `cuts` must be strictly increasing in `(−π, π]` with at least two
    /// entries. Sector `k` is `[cuts[k], cuts[k+1])`; the last sector wraps
    /// from the largest cut around to the smallest one.
    pub fn angular_sectors_2d(cuts: &[f64]) -> Result<Self, ConfigError> {
        if cuts.len() < 2 {
            return Err(ConfigError::invalid(
                "cuts",
                "at least two cut angles are required",
            ));
        }
        if cuts.iter().any(|c| !c.is_finite() || *c <= -PI || *c > PI) {
            return Err(ConfigError::invalid("cuts", "angles must lie in (-pi, pi]"));
        }
        if cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::invalid(
                "cuts",
                "angles must be strictly increasing",
            ));
        }
        let k = cuts.len();
        let mut probs: Vec<f64> = cuts.windows(2).map(|w| (w[1] - w[0]) / TAU).collect();
        probs.push((cuts[0] + TAU - cuts[k - 1]) / TAU);
        Ok(Partition {
            dim: 2,
            kind: Kind::Angular {
                cuts: cuts.to_vec(),
            },
            probs,
        })
    }

    /// Two bins split by the sign of coordinate `axis` (one-based):
    /// bin 1 is `θ_axis < 0`, bin 2 is `θ_axis ≥ 0`.
    pub fn halfspace(axis: usize, dim: usize) -> Result<Self, ConfigError> {
        check_dim(dim)?;
        if axis == 0 || axis > dim {
            return Err(ConfigError::invalid(
                "axis",
                format!("must be in 1..={dim}, got {axis}"),
            ));
        }
        Ok(Partition {
            dim,
            kind: Kind::Halfspace { axis: axis - 1 },
            probs: vec![0.5, 0.5],
        })
    }

    /// The `2^n` orthants. Bit `k` of the bin index is set when `θ_k ≥ 0`.
    pub fn orthants(dim: usize) -> Result<Self, ConfigError> {
        check_dim(dim)?;
        if dim > 30 {
            return Err(ConfigError::invalid(
                "dimension",
                format!("orthant partition limited to 30 dimensions, got {dim}"),
            ));
        }
        let j = 1usize << dim;
        Ok(Partition {
            dim,
            kind: Kind::Orthants,
            probs: vec![1.0 / j as f64; j],
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_bins(&self) -> usize {
        self.probs.len()
    }

    /// Exact bin probabilities `P(Θ ∈ B_j)`.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, bin: BinIndex) -> f64 {
        self.probs[bin.0]
    }

    pub fn classify(&self, p: &Point) -> BinIndex {
        let x = p.coords();
        debug_assert_eq!(x.len(), self.dim);
        let j = match &self.kind {
            Kind::Single => 0,
            Kind::Angular { cuts } => {
                let mut a = x[1].atan2(x[0]);
                if a <= -PI {
                    a = PI;
                }
                // Last cut not above `a`; angles below the first cut belong to
                // the wrap-around sector.
                match cuts.partition_point(|c| *c <= a) {
                    0 => cuts.len() - 1,
                    k => k - 1,
                }
            }
            Kind::Halfspace { axis } => usize::from(x[*axis] >= 0.0),
            Kind::Orthants => x
                .iter()
                .enumerate()
                .filter(|(_, v)| **v >= 0.0)
                .fold(0, |acc, (k, _)| acc | (1 << k)),
        };
        BinIndex(j)
    }
}

fn check_dim(dim: usize) -> Result<(), ConfigError> {
    if dim == 0 {
        return Err(ConfigError::invalid("dimension", "must be at least 1"));
    }
    Ok(())
}
