//! Model selection across the five candidate families.

use super::{fit_gaussian_mixture, fit_johnson_su, fit_shash, DistributionFit, StatsError};
use rayon::prelude::*;

/// Fit Normal-1/2/3-Mixture, Johnson Su and SHASH, and return the
/// minimum-AIC fit; ties break toward fewer parameters, then smaller KS.
/// Fails only when every candidate fitter fails.
pub fn select_best_fit(samples: &[f64], seed: u64) -> Result<DistributionFit, StatsError> {
    let candidates: Vec<Box<dyn Fn() -> Result<DistributionFit, StatsError> + Sync + Send>> = vec![
        Box::new(move || fit_gaussian_mixture(samples, 1, seed)),
        Box::new(move || fit_gaussian_mixture(samples, 2, seed)),
        Box::new(move || fit_gaussian_mixture(samples, 3, seed)),
        Box::new(move || fit_johnson_su(samples, seed)),
        Box::new(move || fit_shash(samples, seed)),
    ];
    let results: Vec<Result<DistributionFit, StatsError>> =
        candidates.par_iter().map(|fit| fit()).collect();

    let mut fits = Vec::new();
    let mut causes = Vec::new();
    for result in results {
        match result {
            Ok(fit) => fits.push(fit),
            Err(err) => causes.push(err.to_string()),
        }
    }
    fits.into_iter()
        .min_by(|a, b| {
            a.aic
                .total_cmp(&b.aic)
                .then_with(|| a.params.param_count().cmp(&b.params.param_count()))
                .then_with(|| a.ks_stat.total_cmp(&b.ks_stat))
        })
        .ok_or(StatsError::AllFitsFailed { causes })
}
