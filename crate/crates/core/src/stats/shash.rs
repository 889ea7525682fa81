//! Sinh-arcsinh (SHASH) maximum-likelihood fitting, Jones-Pewsey form.
//!
//! Transform S = sinh(tau asinh(z) - epsilon), z = (x - mu) / sigma; S is
//! standard normal under the model. epsilon controls skew, tau tail weight;
//! epsilon = 0, tau = 1 reduces to Normal(mu, sigma^2).

use super::nelder::minimize;
use super::normal::LN_SQRT_2PI;
use super::{robust_location_scale, skewness_sign, DistributionFit, FitParams, StatsError};
use crate::rng::CounterRng;
use rayon::prelude::*;

const LN_2: f64 = std::f64::consts::LN_2;

#[inline]
fn ln_cosh(t: f64) -> f64 {
    let a = t.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

pub(crate) fn log_density(x: f64, mu: f64, sigma: f64, epsilon: f64, tau: f64) -> f64 {
    let z = (x - mu) / sigma;
    let t = tau * z.asinh() - epsilon;
    let s = t.sinh();
    tau.ln() - sigma.ln() - LN_SQRT_2PI + ln_cosh(t) - z.hypot(1.0).ln() - 0.5 * s * s
}

fn negative_log_likelihood(samples: &[f64], theta: &[f64]) -> f64 {
    // theta = [mu, ln sigma, epsilon, ln tau]
    let (mu, sigma, epsilon, tau) = (theta[0], theta[1].exp(), theta[2], theta[3].exp());
    if !sigma.is_finite() || !tau.is_finite() || sigma <= 0.0 || tau <= 0.0 {
        return f64::INFINITY;
    }
    -samples
        .iter()
        .map(|&x| log_density(x, mu, sigma, epsilon, tau))
        .sum::<f64>()
}

/// Maximum-likelihood SHASH fit; same optimizer contract as the Johnson Su
/// fitter (five jittered Nelder-Mead restarts, simplex diameter below 1e-9).
pub fn fit_shash(samples: &[f64], seed: u64) -> Result<DistributionFit, StatsError> {
    if samples.len() < 2 {
        return Err(StatsError::InsufficientData {
            needed: 2,
            got: samples.len(),
        });
    }
    let (location, scale) = robust_location_scale(samples);
    if scale <= 0.0 {
        return Err(StatsError::DegenerateData);
    }
    // Positive epsilon stretches the right tail, so start with the sample
    // skewness sign.
    let epsilon0 = 0.1 * skewness_sign(samples);
    let theta0 = [location, scale.ln(), epsilon0, 0.0];

    let mut rng = CounterRng::new(seed);
    let starts: Vec<[f64; 4]> = (0..5)
        .map(|restart| {
            let mut t = theta0;
            if restart > 0 {
                t[0] += 0.5 * scale * rng.next_symmetric();
                t[1] += 0.75 * rng.next_symmetric();
                t[2] += 0.75 * rng.next_symmetric();
                t[3] += 0.75 * rng.next_symmetric();
            }
            t
        })
        .collect();

    let runs: Vec<_> = starts
        .par_iter()
        .map(|start| {
            let steps = [0.5 * scale, 0.5, 0.5, 0.5];
            let stage1 = minimize(
                |t| negative_log_likelihood(samples, t),
                start,
                &steps,
                1e-9,
                3000,
            );
            let polish_steps = [0.02 * scale, 0.02, 0.02, 0.02];
            minimize(
                |t| negative_log_likelihood(samples, t),
                &stage1.x,
                &polish_steps,
                1e-9,
                2000,
            )
        })
        .collect();

    let best = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(i.cmp(j)))
        .map(|(_, r)| r)
        .expect("at least one restart");

    let params = FitParams::Shash {
        mu: best.x[0],
        sigma: best.x[1].exp(),
        epsilon: best.x[2],
        tau: best.x[3].exp(),
    };
    let fit = DistributionFit::from_params(params, -best.value, samples, false);
    if runs.iter().any(|r| r.converged) {
        Ok(fit)
    } else {
        Err(StatsError::NonConvergence {
            best: Box::new(fit),
        })
    }
}

/// Draw n samples: x = mu + sigma sinh((asinh(z) + epsilon) / tau), z
/// standard normal.
pub fn sample_shash(mu: f64, sigma: f64, epsilon: f64, tau: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = CounterRng::new(seed);
    (0..n)
        .map(|_| mu + sigma * ((rng.next_normal().asinh() + epsilon) / tau).sinh())
        .collect()
}
