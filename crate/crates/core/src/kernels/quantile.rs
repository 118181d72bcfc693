use crate::error::ConfigError;

/// Empirical quantile of order `rho` by linear interpolation between order
/// statistics.
///
/// With sorted values `x_(1) ≤ … ≤ x_(k)` and `h = (k − 1)·rho + 1`, returns
/// `x_(⌊h⌋) + (h − ⌊h⌋)·(x_(⌊h⌋+1) − x_(⌊h⌋))`.
pub fn interp_quantile(values: &[f64], rho: f64) -> Result<f64, ConfigError> {
    if values.is_empty() {
        return Err(ConfigError::invalid(
            "values",
            "quantile of an empty sample",
        ));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(ConfigError::invalid(
            "rho",
            format!("must lie in (0, 1), got {rho}"),
        ));
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    Ok(quantile_sorted(&sorted, rho))
}

pub(crate) fn quantile_sorted(sorted: &[f64], rho: f64) -> f64 {
    let k = sorted.len();
    if k == 1 {
        return sorted[0];
    }
    let h = (k - 1) as f64 * rho;
    let lo = (h.floor() as usize).min(k - 1);
    let hi = (lo + 1).min(k - 1);
    let frac = h - lo as f64;
    if frac == 0.0 || sorted[lo] == sorted[hi] {
        return sorted[lo];
    }
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}
