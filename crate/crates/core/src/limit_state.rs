//! Limit-state functions and evaluation accounting.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::ConfigError;
use crate::rng::Point;

type Evaluator = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A deterministic limit-state function `g: R^n → R`. Failure is `g ≤ 0`.
#[derive(Clone)]
pub struct LimitState {
    name: String,
    dim: usize,
    eval: Arc<Evaluator>,
}

impl fmt::Debug for LimitState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LimitState")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .finish_non_exhaustive()
    }
}

impl LimitState {
    pub fn new<F>(name: impl Into<String>, dim: usize, eval: F) -> Result<Self, ConfigError>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if dim == 0 {
            return Err(ConfigError::invalid("dimension", "must be at least 1"));
        }
        Ok(LimitState {
            name: name.into(),
            dim,
            eval: Arc::new(eval),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Evaluates `g(p)` and bumps the counter.
    pub fn evaluate(&self, p: &Point, ctr: &mut EvalCounter) -> Result<f64, ConfigError> {
        self.check_dim(p.dim())?;
        Ok(self.evaluate_unchecked(p, ctr))
    }

    /// Same as [`evaluate`](Self::evaluate) without the dimension check;
    /// estimators validate the dimension once per run.
    #[inline]
    pub(crate) fn evaluate_unchecked(&self, p: &Point, ctr: &mut EvalCounter) -> f64 {
        ctr.count += 1;
        (self.eval)(p.coords())
    }

    pub(crate) fn check_dim(&self, got: usize) -> Result<(), ConfigError> {
        if got != self.dim {
            return Err(ConfigError::DimensionMismatch {
                expected: self.dim,
                got,
            });
        }
        Ok(())
    }
}

/// Number of limit-state evaluations performed during one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalCounter {
    count: u64,
}

impl EvalCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> u64 {
        self.count
    }
}

/// Series system with a dominant mode at `θ1 ≥ 4` and a secondary mode at
/// `θ2 ≥ 5`. Near the origin the secondary branch decreases ten times
/// faster, which pulls plain subset simulation towards the wrong mode.
pub fn piecewise_linear_value(t1: f64, t2: f64) -> f64 {
    let g1 = if t1 > 3.5 { 4.0 - t1 } else { 0.85 - 0.1 * t1 };
    let g2 = if t2 > 2.0 { 0.5 - 0.1 * t2 } else { 2.3 - t2 };
    g1.min(g2)
}

/// `g = 12 − |θ1·θ2|`: four symmetric design points, one per quadrant.
pub fn beta_points_value(t1: f64, t2: f64) -> f64 {
    12.0 - (t1 * t2).abs()
}

pub fn make_piecewise_linear() -> LimitState {
    LimitState::new("piecewise_linear", 2, |x| {
        piecewise_linear_value(x[0], x[1])
    })
    .expect("valid dimension")
}

pub fn make_beta_points() -> LimitState {
    LimitState::new("beta_points", 2, |x| beta_points_value(x[0], x[1])).expect("valid dimension")
}

/// `g ≡ value` in dimension `dim`; handy for degenerate checks.
pub fn make_constant(name: &str, dim: usize, value: f64) -> Result<LimitState, ConfigError> {
    LimitState::new(name, dim, move |_| value)
}

/// Named collection of limit-state functions.
///
/// [`Registry::builtin`] holds the two benchmark problems plus the
/// degenerate `always_fail` (`g ≡ −1`) and `never_fail` (`g ≡ +1`) problems
/// in two dimensions.
#[derive(Debug, Clone, Default)]
pub struct Registry {
    problems: BTreeMap<String, LimitState>,
}

impl Registry {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(make_piecewise_linear());
        r.register(make_beta_points());
        r.register(make_constant("always_fail", 2, -1.0).expect("valid dimension"));
        r.register(make_constant("never_fail", 2, 1.0).expect("valid dimension"));
        r
    }

    /// Adds (or replaces) a problem under its own name.
    pub fn register(&mut self, ls: LimitState) {
        self.problems.insert(ls.name().to_owned(), ls);
    }

    pub fn lookup(&self, name: &str) -> Result<LimitState, ConfigError> {
        self.problems
            .get(name)
            .cloned()
            .ok_or_else(|| ConfigError::UnknownProblem(name.to_owned()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.problems.keys().map(String::as_str)
    }
}

/// Looks a problem up in the built-in registry.
pub fn lookup(name: &str) -> Result<LimitState, ConfigError> {
    Registry::builtin().lookup(name)
}
