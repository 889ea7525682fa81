//! Kolmogorov-Smirnov goodness-of-fit statistic.

use super::DistributionFit;

/// Sup-norm distance between the empirical CDF of `samples` and the fitted
/// CDF.
pub fn ks_statistic(samples: &[f64], fit: &DistributionFit) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = fit.params.cdf(x);
        let below = f - i as f64 / n;
        let above = (i + 1) as f64 / n - f;
        d = d.max(below).max(above);
    }
    d
}
