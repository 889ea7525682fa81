//! Gaussian-mixture maximum likelihood by expectation-maximization.

use super::normal::{log_pdf, logsumexp};
use super::{robust_location_scale, DistributionFit, FitParams, MixtureComponent, StatsError};
use crate::rng::CounterRng;

const MAX_ITERS: usize = 500;
const REL_TOL: f64 = 1e-8;
const RESTARTS: usize = 5;

/// EM fit with k components (1, 2 or 3), best of five jittered restarts.
///
/// A component whose std collapses below 1e-12 of the sample range is
/// pruned and the fit restarts with k - 1 components, flagged on the result.
pub fn fit_gaussian_mixture(
    samples: &[f64],
    k: usize,
    seed: u64,
) -> Result<DistributionFit, StatsError> {
    fit_gaussian_mixture_with_trace(samples, k, seed).map(|(fit, _)| fit)
}

/// As `fit_gaussian_mixture`, also returning the log-likelihood trace of the
/// winning restart (nondecreasing by construction of EM).
pub fn fit_gaussian_mixture_with_trace(
    samples: &[f64],
    k: usize,
    seed: u64,
) -> Result<(DistributionFit, Vec<f64>), StatsError> {
    assert!((1..=3).contains(&k), "mixture order {k} not in 1..=3");
    if samples.len() < 2 {
        return Err(StatsError::InsufficientData {
            needed: 2,
            got: samples.len(),
        });
    }
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    if range <= 0.0 {
        return Err(StatsError::DegenerateData);
    }
    let std_floor = 1e-12 * range;

    let (location, scale) = robust_location_scale(samples);
    let mut rng = CounterRng::new(seed);
    let mut best: Option<(EmRun, Vec<f64>)> = None;
    let mut pruned_any = false;
    for restart in 0..RESTARTS {
        let init = initial_components(k, location, scale, restart, &mut rng);
        match run_em(samples, init, std_floor) {
            EmOutcome::Converged(run, trace) | EmOutcome::Budget(run, trace) => {
                if best
                    .as_ref()
                    .map_or(true, |(b, _)| run.log_likelihood > b.log_likelihood)
                {
                    best = Some((run, trace));
                }
            }
            EmOutcome::Degenerate => pruned_any = true,
        }
    }

    match best {
        Some((run, trace)) => {
            let mut components = run.components;
            components.sort_by(|a, b| a.mean.total_cmp(&b.mean));
            let total: f64 = components.iter().map(|c| c.weight).sum();
            for c in &mut components {
                c.weight /= total;
            }
            let fit = DistributionFit::from_params(
                FitParams::NormalMixture(components),
                run.log_likelihood,
                samples,
                pruned_any,
            );
            Ok((fit, trace))
        }
        None => {
            // Every restart collapsed a component: refit with one fewer.
            if k == 1 {
                return Err(StatsError::DegenerateData);
            }
            let (fit, trace) = fit_gaussian_mixture_with_trace(samples, k - 1, seed)?;
            Ok((
                DistributionFit {
                    degenerate_pruned: true,
                    ..fit
                },
                trace,
            ))
        }
    }
}

/// Draw n samples from a mixture, for oracle tests and examples.
pub fn sample_mixture(components: &[MixtureComponent], n: usize, seed: u64) -> Vec<f64> {
    let mut rng = CounterRng::new(seed);
    (0..n)
        .map(|_| {
            let u = rng.next_f64();
            let mut acc = 0.0;
            let mut chosen = components.len() - 1;
            for (i, c) in components.iter().enumerate() {
                acc += c.weight;
                if u < acc {
                    chosen = i;
                    break;
                }
            }
            components[chosen].mean + components[chosen].std * rng.next_normal()
        })
        .collect()
}

struct EmRun {
    components: Vec<MixtureComponent>,
    log_likelihood: f64,
}

enum EmOutcome {
    Converged(EmRun, Vec<f64>),
    Budget(EmRun, Vec<f64>),
    Degenerate,
}

fn initial_components(
    k: usize,
    location: f64,
    scale: f64,
    restart: usize,
    rng: &mut CounterRng,
) -> Vec<MixtureComponent> {
    // Quartile-spread starting means; restart 0 is the clean moment init,
    // later restarts jitter positions and scales.
    let offsets: &[f64] = match k {
        1 => &[0.0],
        2 => &[-0.6745, 0.6745],
        _ => &[-0.6745, 0.0, 0.6745],
    };
    offsets
        .iter()
        .map(|&o| {
            let (mut mean, mut std) = (location + o * scale, scale);
            if restart > 0 {
                mean += 0.3 * scale * rng.next_symmetric();
                std *= (0.6 * rng.next_symmetric()).exp();
            }
            MixtureComponent {
                weight: 1.0 / k as f64,
                mean,
                std,
            }
        })
        .collect()
}

fn run_em(samples: &[f64], mut comps: Vec<MixtureComponent>, std_floor: f64) -> EmOutcome {
    let n = samples.len();
    let nf = n as f64;
    let k = comps.len();
    let mut resp = vec![0.0f64; n * k];
    let mut trace = Vec::new();
    let mut prev_ll = f64::NEG_INFINITY;

    for _ in 0..MAX_ITERS {
        // E step: responsibilities in log space, plus the log-likelihood.
        let mut ll = 0.0;
        let mut terms = vec![0.0f64; k];
        for (i, &x) in samples.iter().enumerate() {
            for (j, c) in comps.iter().enumerate() {
                terms[j] = c.weight.ln() + log_pdf(x, c.mean, c.std);
            }
            let lse = logsumexp(&terms);
            ll += lse;
            for j in 0..k {
                resp[i * k + j] = (terms[j] - lse).exp();
            }
        }
        // EM never decreases the likelihood; anything beyond floating-point
        // jitter is a bug in the update equations.
        debug_assert!(
            ll >= prev_ll - 1e-7 * prev_ll.abs().max(1.0),
            "EM log-likelihood decreased: {prev_ll} -> {ll}"
        );
        trace.push(ll);

        let converged = (ll - prev_ll).abs() < REL_TOL * prev_ll.abs().max(1.0);
        prev_ll = ll;

        // M step.
        let mut fresh = Vec::with_capacity(k);
        for j in 0..k {
            let nk: f64 = (0..n).map(|i| resp[i * k + j]).sum();
            let mean: f64 = (0..n).map(|i| resp[i * k + j] * samples[i]).sum::<f64>() / nk;
            let var: f64 = (0..n)
                .map(|i| resp[i * k + j] * (samples[i] - mean).powi(2))
                .sum::<f64>()
                / nk;
            let std = var.sqrt();
            if !(std >= std_floor) || !mean.is_finite() {
                return EmOutcome::Degenerate;
            }
            fresh.push(MixtureComponent {
                weight: nk / nf,
                mean,
                std,
            });
        }
        comps = fresh;

        if converged {
            return EmOutcome::Converged(
                EmRun {
                    components: comps,
                    log_likelihood: prev_ll,
                },
                trace,
            );
        }
    }
    EmOutcome::Budget(
        EmRun {
            components: comps,
            log_likelihood: prev_ll,
        },
        trace,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_component_recovers_sample_moments() {
        let samples = sample_mixture(
            &[MixtureComponent {
                weight: 1.0,
                mean: 2.0,
                std: 3.0,
            }],
            100_000,
            1,
        );
        let fit = fit_gaussian_mixture(&samples, 1, 42).unwrap();
        let FitParams::NormalMixture(c) = &fit.params else {
            unreachable!()
        };
        assert_eq!(c.len(), 1);
        assert!((c[0].mean - 2.0).abs() < 0.05, "mean {}", c[0].mean);
        assert!((c[0].std - 3.0).abs() < 0.05, "std {}", c[0].std);
        assert!(!fit.degenerate_pruned);
    }

    #[test]
    fn two_points_closed_form() {
        let fit = fit_gaussian_mixture(&[0.0, 2.0], 1, 0).unwrap();
        let FitParams::NormalMixture(c) = &fit.params else {
            unreachable!()
        };
        assert!((c[0].mean - 1.0).abs() < 1e-9);
        assert!((c[0].std - 1.0).abs() < 1e-9); // uncorrected MLE
    }

    #[test]
    fn well_separated_pair_is_recovered() {
        let truth = [
            MixtureComponent {
                weight: 0.5,
                mean: -5.0,
                std: 1.0,
            },
            MixtureComponent {
                weight: 0.5,
                mean: 5.0,
                std: 1.0,
            },
        ];
        let samples = sample_mixture(&truth, 50_000, 3);
        let fit = fit_gaussian_mixture(&samples, 2, 42).unwrap();
        let FitParams::NormalMixture(c) = &fit.params else {
            unreachable!()
        };
        assert!((c[0].weight - 0.5).abs() < 0.02);
        assert!((c[0].mean + 5.0).abs() < 0.1);
        assert!((c[1].mean - 5.0).abs() < 0.1);
        assert!((c[0].std - 1.0).abs() < 0.05);
        assert!((c[1].std - 1.0).abs() < 0.05);
    }

    #[test]
    fn log_likelihood_trace_is_nondecreasing() {
        let truth = [
            MixtureComponent {
                weight: 0.3,
                mean: -1.0,
                std: 0.7,
            },
            MixtureComponent {
                weight: 0.7,
                mean: 2.0,
                std: 1.4,
            },
        ];
        let samples = sample_mixture(&truth, 5_000, 9);
        let (_, trace) = fit_gaussian_mixture_with_trace(&samples, 2, 42).unwrap();
        assert!(trace.len() > 1);
        for w in trace.windows(2) {
            assert!(
                w[1] >= w[0] - 1e-9 * w[0].abs().max(1.0),
                "decrease {} -> {}",
                w[0],
                w[1]
            );
        }
    }

    #[test]
    fn weights_sum_to_one() {
        let samples = sample_mixture(
            &[
                MixtureComponent {
                    weight: 0.6,
                    mean: 0.0,
                    std: 1.0,
                },
                MixtureComponent {
                    weight: 0.4,
                    mean: 4.0,
                    std: 0.5,
                },
            ],
            20_000,
            4,
        );
        for k in 1..=3 {
            let fit = fit_gaussian_mixture(&samples, k, 11).unwrap();
            let FitParams::NormalMixture(c) = &fit.params else {
                unreachable!()
            };
            let total: f64 = c.iter().map(|x| x.weight).sum();
            assert!((total - 1.0).abs() < 1e-10);
            assert!(c.windows(2).all(|w| w[0].mean <= w[1].mean));
            assert!(c.iter().all(|x| x.std > 0.0 && x.weight > 0.0));
        }
    }

    #[test]
    fn constant_data_is_degenerate() {
        assert!(matches!(
            fit_gaussian_mixture(&[1.0; 100], 1, 0),
            Err(StatsError::DegenerateData)
        ));
    }
}
