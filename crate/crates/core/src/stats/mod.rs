//! Moment statistics and parametric distribution fitting for error
//! populations: Gaussian mixtures (k = 1, 2, 3) by EM, Johnson Su and
//! sinh-arcsinh (SHASH) by derivative-free maximum likelihood, with AIC
//! model selection and Kolmogorov-Smirnov goodness of fit.

mod johnson;
mod ks;
mod mixture;
mod moments;
mod nelder;
mod normal;
mod select;
mod shash;

pub use johnson::{fit_johnson_su, sample_johnson_su};
pub use ks::ks_statistic;
pub use mixture::{fit_gaussian_mixture, fit_gaussian_mixture_with_trace, sample_mixture};
pub use moments::moments;
pub use select::select_best_fit;
pub use shash::{fit_shash, sample_shash};

use normal::cdf_std;
use thiserror::Error;

/// Seed used for fit restarts when the caller has no preference.
pub const DEFAULT_FIT_SEED: u64 = 0xF17;

/// Uncorrected central-moment summary of a sample.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct MomentSummary {
    pub mean: f64,
    pub variance: f64,
    /// m3 / m2^1.5; `None` when the variance is zero.
    pub skewness: Option<f64>,
    /// m4 / m2^2 - 3; `None` when the variance is zero.
    pub excess_kurtosis: Option<f64>,
    pub n: usize,
}

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("samples have no spread; nothing to fit")]
    DegenerateData,
    #[error("fit did not converge within the iteration budget")]
    NonConvergence { best: Box<DistributionFit> },
    #[error("every candidate fitter failed: {}", causes.join("; "))]
    AllFitsFailed { causes: Vec<String> },
}

/// One component of a normal mixture.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: f64,
    pub std: f64,
}

/// Parameters of a fitted family.
#[derive(Clone, Debug, PartialEq)]
pub enum FitParams {
    /// Components sorted by mean; weights sum to 1.
    NormalMixture(Vec<MixtureComponent>),
    JohnsonSu {
        gamma: f64,
        delta: f64,
        xi: f64,
        lambda: f64,
    },
    Shash {
        mu: f64,
        sigma: f64,
        epsilon: f64,
        tau: f64,
    },
}

impl FitParams {
    /// Free parameters: 3k - 1 for a k-mixture, 4 for the transformed
    /// families.
    pub fn param_count(&self) -> usize {
        match self {
            FitParams::NormalMixture(c) => 3 * c.len() - 1,
            FitParams::JohnsonSu { .. } | FitParams::Shash { .. } => 4,
        }
    }

    pub fn family_name(&self) -> String {
        match self {
            FitParams::NormalMixture(c) => format!("Normal-{}-Mixture", c.len()),
            FitParams::JohnsonSu { .. } => "JohnsonSu".to_string(),
            FitParams::Shash { .. } => "SHASH".to_string(),
        }
    }

    /// Cumulative distribution via the normalizing transform (weighted
    /// normal CDFs for mixtures).
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            FitParams::NormalMixture(comps) => comps
                .iter()
                .map(|c| c.weight * cdf_std((x - c.mean) / c.std))
                .sum(),
            FitParams::JohnsonSu {
                gamma,
                delta,
                xi,
                lambda,
            } => {
                let z = (x - xi) / lambda;
                cdf_std(gamma + delta * z.asinh())
            }
            FitParams::Shash {
                mu,
                sigma,
                epsilon,
                tau,
            } => {
                let z = (x - mu) / sigma;
                cdf_std((tau * z.asinh() - epsilon).sinh())
            }
        }
    }

    pub fn log_density(&self, x: f64) -> f64 {
        match self {
            FitParams::NormalMixture(comps) => {
                let terms: Vec<f64> = comps
                    .iter()
                    .map(|c| c.weight.ln() + normal::log_pdf(x, c.mean, c.std))
                    .collect();
                normal::logsumexp(&terms)
            }
            FitParams::JohnsonSu {
                gamma,
                delta,
                xi,
                lambda,
            } => johnson::log_density(x, *gamma, *delta, *xi, *lambda),
            FitParams::Shash {
                mu,
                sigma,
                epsilon,
                tau,
            } => shash::log_density(x, *mu, *sigma, *epsilon, *tau),
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        self.log_density(x).exp()
    }
}

/// A fitted parametric model with its selection statistics.
#[derive(Clone, Debug)]
pub struct DistributionFit {
    pub params: FitParams,
    pub log_likelihood: f64,
    /// 2 * param_count - 2 * log_likelihood, exactly.
    pub aic: f64,
    /// param_count * ln(n) - 2 * log_likelihood, reported for transparency.
    pub bic: f64,
    /// Sup distance between the empirical and fitted CDFs.
    pub ks_stat: f64,
    /// Set when a degenerate mixture component was pruned and the fit
    /// restarted with one component fewer.
    pub degenerate_pruned: bool,
}

impl DistributionFit {
    pub(crate) fn from_params(
        params: FitParams,
        log_likelihood: f64,
        samples: &[f64],
        degenerate_pruned: bool,
    ) -> DistributionFit {
        let p = params.param_count() as f64;
        let n = samples.len() as f64;
        let mut fit = DistributionFit {
            params,
            log_likelihood,
            aic: 2.0 * p - 2.0 * log_likelihood,
            bic: p * n.ln() - 2.0 * log_likelihood,
            ks_stat: f64::NAN,
            degenerate_pruned,
        };
        fit.ks_stat = ks::ks_statistic(samples, &fit);
        fit
    }

    pub fn family_name(&self) -> String {
        self.params.family_name()
    }
}

/// Median and IQR/1.349 of a sample; the robust initialization every fitter
/// starts from.
pub(crate) fn robust_location_scale(samples: &[f64]) -> (f64, f64) {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q = |p: f64| -> f64 {
        let idx = p * (sorted.len() - 1) as f64;
        let lo = idx.floor() as usize;
        let hi = idx.ceil() as usize;
        let frac = idx - lo as f64;
        sorted[lo] * (1.0 - frac) + sorted[hi] * frac
    };
    let median = q(0.5);
    let mut scale = (q(0.75) - q(0.25)) / 1.349;
    if scale <= 0.0 {
        // Quartiles collapsed; fall back to the full std.
        let n = sorted.len() as f64;
        let mean: f64 = sorted.iter().sum::<f64>() / n;
        let var: f64 = sorted.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        scale = var.sqrt();
    }
    (median, scale)
}

/// Sign of the sample skewness, used to orient shape-parameter starts.
pub(crate) fn skewness_sign(samples: &[f64]) -> f64 {
    match moments(samples) {
        Ok(m) => m.skewness.unwrap_or(0.0).signum(),
        Err(_) => 0.0,
    }
}
