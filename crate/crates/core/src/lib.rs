//! Estimation of small failure probabilities `P(g(Θ) ≤ 0)` for standard
//! Gaussian inputs.
//!
//! Three estimators are provided:
//!
//! - brute-force Monte Carlo ([`estimators::run_mcs`]),
//! - subset simulation ([`estimators::run_ss`]),
//! - directional subset simulation ([`estimators::run_dss`]), which splits
//!   the input space into cones ("bins") and keeps a separate intermediate
//!   threshold in each of them so that every failure mode stays populated.
//!
//! The [`harness`] module replicates runs and computes the summary
//! statistics (mean, coefficient of variation, log-scale RMSE, average
//! evaluation count); [`config`] and [`io`] implement the declarative run
//! configuration and the CSV/JSON result files used by the command line tool.

pub mod config;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod io;
pub mod kernels;
pub mod limit_state;
pub mod partition;
pub mod rng;

pub use error::{ConfigError, FormatError, RunError};
pub use estimators::{
    level_snapshot, run_dss, run_mcs, run_ss, BinOutcome, BinStatus, DssConfig, LevelRecord,
    LevelView, RunResult, RunStatus, SsConfig,
};
pub use kernels::{McmcConfig, OffspringCounts};
pub use limit_state::{EvalCounter, LimitState, Registry};
pub use partition::{BinIndex, Partition};
pub use rng::{Point, RandomStream};
