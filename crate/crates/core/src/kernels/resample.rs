use crate::error::RunError;
use crate::rng::RandomStream;

/// Number of offspring assigned to each seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OffspringCounts(Vec<usize>);

impl OffspringCounts {
    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

/// Residual resampling of `m` equally weighted seeds into `n` offspring.
///
/// Every seed receives `⌊n/m⌋` offspring; the remaining `n − m·⌊n/m⌋` are
/// spread by independent uniform draws over the seeds.
pub fn residual_resample(
    m: usize,
    n: usize,
    stream: &mut RandomStream,
) -> Result<OffspringCounts, RunError> {
    if m == 0 {
        return Err(RunError::Extinction {
            level: 0,
            n_evals: 0,
        });
    }
    let base = n / m;
    let mut counts = vec![base; m];
    for _ in 0..n - base * m {
        counts[stream.index(m)] += 1;
    }
    Ok(OffspringCounts(counts))
}
