//! Johnson Su maximum-likelihood fitting.
//!
//! Density: f(x) = delta / (lambda sqrt(2 pi)) (1 + z^2)^(-1/2)
//!                 exp(-(gamma + delta asinh z)^2 / 2),  z = (x - xi) / lambda.

use super::nelder::minimize;
use super::normal::LN_SQRT_2PI;
use super::{robust_location_scale, skewness_sign, DistributionFit, FitParams, StatsError};
use crate::rng::CounterRng;
use rayon::prelude::*;

pub(crate) fn log_density(x: f64, gamma: f64, delta: f64, xi: f64, lambda: f64) -> f64 {
    let z = (x - xi) / lambda;
    let t = gamma + delta * z.asinh();
    // ln hypot(1, z) = 0.5 ln(1 + z^2) without overflow.
    delta.ln() - lambda.ln() - LN_SQRT_2PI - z.hypot(1.0).ln() - 0.5 * t * t
}

fn negative_log_likelihood(samples: &[f64], theta: &[f64]) -> f64 {
    // theta = [gamma, ln delta, xi, ln lambda]
    let (gamma, delta, xi, lambda) = (theta[0], theta[1].exp(), theta[2], theta[3].exp());
    if !delta.is_finite() || !lambda.is_finite() || delta <= 0.0 || lambda <= 0.0 {
        return f64::INFINITY;
    }
    -samples
        .iter()
        .map(|&x| log_density(x, gamma, delta, xi, lambda))
        .sum::<f64>()
}

/// Maximum-likelihood Johnson Su fit: Nelder-Mead over (gamma, ln delta,
/// xi, ln lambda) from a moment-informed start, best of five jittered
/// restarts. Convergence means the simplex diameter fell below 1e-9; if no
/// restart converged the error carries the best iterate.
pub fn fit_johnson_su(samples: &[f64], seed: u64) -> Result<DistributionFit, StatsError> {
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
    // Skewness of Johnson Su has the opposite sign of gamma.
    let gamma0 = -0.1 * skewness_sign(samples);
    let theta0 = [gamma0, 0.0, location, scale.ln()];

    let mut rng = CounterRng::new(seed);
    let starts: Vec<[f64; 4]> = (0..5)
        .map(|restart| {
            let mut t = theta0;
            if restart > 0 {
                t[0] += 0.75 * rng.next_symmetric();
                t[1] += 0.75 * rng.next_symmetric();
                t[2] += 0.5 * scale * rng.next_symmetric();
                t[3] += 0.75 * rng.next_symmetric();
            }
            t
        })
        .collect();

    let runs: Vec<_> = starts
        .par_iter()
        .map(|start| {
            let steps = [0.5, 0.5, 0.5 * scale, 0.5];
            let stage1 = minimize(
                |t| negative_log_likelihood(samples, t),
                start,
                &steps,
                1e-9,
                3000,
            );
            // Re-inflate the simplex once to escape premature collapse.
            let polish_steps = [0.02, 0.02, 0.02 * scale, 0.02];
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

    let params = FitParams::JohnsonSu {
        gamma: best.x[0],
        delta: best.x[1].exp(),
        xi: best.x[2],
        lambda: best.x[3].exp(),
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

/// Draw n samples: x = xi + lambda sinh((z - gamma) / delta), z standard
/// normal.
pub fn sample_johnson_su(
    gamma: f64,
    delta: f64,
    xi: f64,
    lambda: f64,
    n: usize,
    seed: u64,
) -> Vec<f64> {
    let mut rng = CounterRng::new(seed);
    (0..n)
        .map(|_| xi + lambda * ((rng.next_normal() - gamma) / delta).sinh())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::moments;

    #[test]
    fn standard_parameters_are_recovered() {
        let samples = sample_johnson_su(0.0, 1.0, 0.0, 1.0, 100_000, 7);
        let fit = fit_johnson_su(&samples, 42).unwrap();
        let FitParams::JohnsonSu {
            gamma,
            delta,
            xi,
            lambda,
        } = fit.params
        else {
            unreachable!()
        };
        assert!(gamma.abs() < 0.05, "gamma {gamma}");
        assert!((delta - 1.0).abs() < 0.05, "delta {delta}");
        assert!(xi.abs() < 0.05, "xi {xi}");
        assert!((lambda - 1.0).abs() < 0.05, "lambda {lambda}");
    }

    #[test]
    fn symmetric_family_fits_with_near_zero_skew() {
        let samples = sample_johnson_su(0.0, 1.3, 0.5, 2.0, 50_000, 3);
        let fit = fit_johnson_su(&samples, 42).unwrap();
        let FitParams::JohnsonSu { gamma, delta, .. } = fit.params else {
            unreachable!()
        };
        // Fitted distribution's skewness: estimate from a large resample.
        let resampled = sample_johnson_su(gamma, delta, 0.0, 1.0, 200_000, 9);
        let skew = moments(&resampled).unwrap().skewness.unwrap();
        assert!(skew.abs() < 0.05, "skew {skew}");
    }

    #[test]
    fn location_equivariance() {
        let samples = sample_johnson_su(-0.3, 1.2, 1.0, 1.5, 4_000, 5);
        let shifted: Vec<f64> = samples.iter().map(|x| x + 10.0).collect();
        let base = fit_johnson_su(&samples, 42).unwrap();
        let moved = fit_johnson_su(&shifted, 42).unwrap();
        let FitParams::JohnsonSu {
            gamma: g1,
            delta: d1,
            xi: x1,
            lambda: l1,
        } = base.params
        else {
            unreachable!()
        };
        let FitParams::JohnsonSu {
            gamma: g2,
            delta: d2,
            xi: x2,
            lambda: l2,
        } = moved.params
        else {
            unreachable!()
        };
        assert!((x2 - x1 - 10.0).abs() < 1e-6, "xi {x1} -> {x2}");
        assert!((g2 - g1).abs() < 1e-6);
        assert!((d2 - d1).abs() < 1e-6);
        assert!((l2 - l1).abs() < 1e-6);
    }
}
