//! Seeded random VMM trials and Monte-Carlo error populations.
//!
//! Every trial is a pure function of (master_seed, trial_index): matrix and
//! vector entries come from one counter-based substream, programming noise
//! from another. Trials are embarrassingly parallel and the concatenated
//! population is byte-identical for any worker count.

use crate::crossbar::{encode_and_program, ideal_vmm, CrossbarError};
use crate::device::DeviceProfile;
use crate::digest::config_digest;
use crate::matrix::Matrix;
use crate::rng::{derive_key, CounterRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Which device non-idealities participate in a run. Switched-off
/// mechanisms are forced to zero regardless of the profile values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Nonidealities {
    pub nonlinearity: bool,
    pub c2c: bool,
}

impl Nonidealities {
    pub const ON: Nonidealities = Nonidealities {
        nonlinearity: true,
        c2c: true,
    };
    pub const OFF: Nonidealities = Nonidealities {
        nonlinearity: false,
        c2c: false,
    };
}

impl Default for Nonidealities {
    fn default() -> Self {
        Nonidealities::ON
    }
}

/// Profile actually used for programming once toggles are applied.
pub fn effective_profile(profile: &DeviceProfile, toggles: Nonidealities) -> DeviceProfile {
    let mut p = profile.clone();
    if !toggles.nonlinearity {
        p.nl_potentiation = 0.0;
        p.nl_depression = 0.0;
    }
    if !toggles.c2c {
        p.c2c_sigma = 0.0;
    }
    p
}

/// Full description of one error-population run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PopulationConfig {
    pub profile: DeviceProfile,
    pub rows: usize,
    pub cols: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub nonidealities: Nonidealities,
    pub v_read: f64,
    pub compensate_floor: bool,
}

impl PopulationConfig {
    pub fn new(profile: DeviceProfile) -> PopulationConfig {
        PopulationConfig {
            profile,
            rows: 32,
            cols: 32,
            trials: 1000,
            master_seed: 42,
            nonidealities: Nonidealities::ON,
            v_read: 0.1,
            compensate_floor: false,
        }
    }

    pub fn digest(&self) -> String {
        config_digest(self)
    }
}

/// One simulated trial with its exact and decoded products.
#[derive(Clone, Debug)]
pub struct VmmTrial {
    pub trial_index: usize,
    pub a: Matrix,
    pub x: Vec<f64>,
    pub y_exact: Vec<f64>,
    pub y_hat: Vec<f64>,
}

impl VmmTrial {
    /// Elementwise error y_hat - y_exact.
    pub fn errors(&self) -> Vec<f64> {
        self.y_hat
            .iter()
            .zip(&self.y_exact)
            .map(|(h, e)| h - e)
            .collect()
    }
}

/// Concatenated error samples across trials, trial-major and row-minor.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorPopulation {
    pub samples: Vec<f64>,
    pub n_trials: usize,
    pub rows: usize,
    pub config_digest: String,
    pub master_seed: u64,
}

// Substream indices under a trial key.
const STREAM_DATA: u64 = 0;
const STREAM_NOISE: u64 = 1;

fn trial_key(master_seed: u64, trial_index: usize) -> u64 {
    derive_key(master_seed, trial_index as u64)
}

/// The (A, x) inputs of one trial: entries i.i.d. uniform on [-1, 1], fully
/// determined by (master_seed, trial_index).
pub fn generate_trial(
    master_seed: u64,
    trial_index: usize,
    rows: usize,
    cols: usize,
) -> (Matrix, Vec<f64>) {
    let mut data = CounterRng::new(trial_key(master_seed, trial_index)).substream(STREAM_DATA);
    let a = Matrix::from_fn(rows, cols, |_, _| data.next_symmetric());
    let x = (0..cols).map(|_| data.next_symmetric()).collect();
    (a, x)
}

/// Run one trial end to end against a prepared (toggled) profile.
pub fn run_trial(
    cfg: &PopulationConfig,
    programmed: &DeviceProfile,
    trial_index: usize,
) -> Result<VmmTrial, CrossbarError> {
    let (a, x) = generate_trial(cfg.master_seed, trial_index, cfg.rows, cfg.cols);
    let noise = CounterRng::new(trial_key(cfg.master_seed, trial_index)).substream(STREAM_NOISE);
    let cb = encode_and_program(&a, programmed, cfg.v_read, &noise)?;
    let y_hat = if cfg.compensate_floor {
        cb.read_decoded_compensated(&x)?
    } else {
        cb.read_decoded(&x)?
    };
    let y_exact = ideal_vmm(&a, &x)?;
    Ok(VmmTrial {
        trial_index,
        a,
        x,
        y_exact,
        y_hat,
    })
}

/// Generate the full error population for a configuration. Trials run in
/// parallel on the current rayon pool; samples are concatenated by trial
/// index, never by completion order.
pub fn run_population(cfg: &PopulationConfig) -> Result<ErrorPopulation, CrossbarError> {
    let programmed = effective_profile(&cfg.profile, cfg.nonidealities);
    let per_trial: Vec<Vec<f64>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, &programmed, t).map(|trial| trial.errors()))
        .collect::<Result<_, _>>()?;
    let samples: Vec<f64> = per_trial.into_iter().flatten().collect();
    Ok(ErrorPopulation {
        samples,
        n_trials: cfg.trials,
        rows: cfg.rows,
        config_digest: cfg.digest(),
        master_seed: cfg.master_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::{C2cMode, DeviceKind};

    fn ideal_profile(states: u32) -> DeviceProfile {
        DeviceProfile {
            name: "ideal".into(),
            states,
            nl_potentiation: 0.0,
            nl_depression: 0.0,
            r_on: 1e3,
            memory_window: f64::INFINITY,
            c2c_sigma: 0.0,
            c2c_mode: C2cMode::PerWrite,
        }
    }

    #[test]
    fn trials_are_deterministic_and_separated() {
        let (a0, x0) = generate_trial(7, 0, 8, 8);
        let (a0b, x0b) = generate_trial(7, 0, 8, 8);
        assert_eq!(a0, a0b);
        assert_eq!(x0, x0b);
        let (a1, _) = generate_trial(7, 1, 8, 8);
        assert_ne!(a0, a1);
    }

    #[test]
    fn pooled_entries_match_uniform_moments() {
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        let mut n = 0usize;
        for t in 0..960 {
            let (a, x) = generate_trial(3, t, 32, 32);
            for v in a.iter().chain(x.iter().copied()) {
                sum += v;
                sumsq += v * v;
                n += 1;
            }
        }
        assert!(n > 1_000_000);
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.005, "mean {mean}");
        assert!((var - 1.0 / 3.0).abs() < 0.02 / 3.0, "var {var}");
    }

    #[test]
    fn ideal_limit_stays_within_quantization_bound() {
        let mut cfg = PopulationConfig::new(ideal_profile(1 << 20));
        cfg.trials = 10;
        let pop = run_population(&cfg).unwrap();
        let bound = 32.0 / (2.0 * (1u64 << 20) as f64);
        let max = pop.samples.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        assert!(max <= bound, "max |e| = {max} > {bound}");
    }

    #[test]
    fn zero_matrix_gives_zero_error_without_noise() {
        // A = 0 programs both columns to the floor, which cancels in the
        // differential readout.
        let mut cfg = PopulationConfig::new(DeviceProfile::preset(DeviceKind::AgSi));
        cfg.nonidealities = Nonidealities {
            nonlinearity: true,
            c2c: false,
        };
        cfg.rows = 4;
        cfg.cols = 4;
        let programmed = effective_profile(&cfg.profile, cfg.nonidealities);
        let (a, x) = generate_trial(cfg.master_seed, 0, 4, 4);
        drop((a, x));
        let zero = Matrix::zeros(4, 4);
        let noise = CounterRng::new(1).substream(STREAM_NOISE);
        let cb = encode_and_program(&zero, &programmed, cfg.v_read, &noise).unwrap();
        let y = cb.read_decoded(&[0.3, -0.4, 0.9, 0.1]).unwrap();
        assert_eq!(y, vec![0.0; 4]);
    }

    #[test]
    fn population_shape_and_determinism() {
        let mut cfg = PopulationConfig::new(DeviceProfile::preset(DeviceKind::EpiRam));
        cfg.trials = 20;
        let pop1 = run_population(&cfg).unwrap();
        assert_eq!(pop1.samples.len(), 20 * 32);
        let pop2 = run_population(&cfg).unwrap();
        assert_eq!(pop1, pop2);

        cfg.trials = 1;
        let single = run_population(&cfg).unwrap();
        let programmed = effective_profile(&cfg.profile, cfg.nonidealities);
        let direct = run_trial(&cfg, &programmed, 0).unwrap().errors();
        assert_eq!(single.samples, direct);
    }

    #[test]
    fn population_is_identical_across_worker_counts() {
        let mut cfg = PopulationConfig::new(DeviceProfile::preset(DeviceKind::AgSi));
        cfg.trials = 16;
        let run_with = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_population(&cfg).unwrap())
        };
        assert_eq!(run_with(1), run_with(4));
    }

    #[test]
    fn toggles_off_ignore_profile_nonidealities() {
        let mut wild = DeviceProfile::preset(DeviceKind::AgSi);
        wild.nl_potentiation = 4.9;
        wild.c2c_sigma = 0.5;
        let mut cfg_wild = PopulationConfig::new(wild);
        cfg_wild.nonidealities = Nonidealities::OFF;
        cfg_wild.trials = 5;
        let mut cfg_base = PopulationConfig::new(DeviceProfile::preset(DeviceKind::AgSi));
        cfg_base.nonidealities = Nonidealities::OFF;
        cfg_base.trials = 5;
        assert_eq!(
            run_population(&cfg_wild).unwrap().samples,
            run_population(&cfg_base).unwrap().samples
        );
    }

    #[test]
    fn negating_inputs_negates_errors_in_the_noiseless_case() {
        // Negating x alone flips the sign of every error sample; negating
        // both A and x leaves the errors unchanged (the differential encode
        // commutes with the sign swap).
        let profile = effective_profile(
            &DeviceProfile::preset(DeviceKind::AgSi),
            Nonidealities {
                nonlinearity: true,
                c2c: false,
            },
        );
        let (a, x) = generate_trial(99, 0, 8, 8);
        let noise = CounterRng::new(0);
        let cb = encode_and_program(&a, &profile, 0.1, &noise).unwrap();
        let neg_a = a.map(|w| -w);
        let cb_neg = encode_and_program(&neg_a, &profile, 0.1, &noise).unwrap();
        let neg_x: Vec<f64> = x.iter().map(|v| -v).collect();

        let errs = |cb: &crate::crossbar::CrossbarState, a: &Matrix, x: &[f64]| -> Vec<f64> {
            let y = cb.read_decoded(x).unwrap();
            let exact = ideal_vmm(a, x).unwrap();
            y.iter().zip(&exact).map(|(h, e)| h - e).collect()
        };

        let base = errs(&cb, &a, &x);
        let flipped_x = errs(&cb, &a, &neg_x);
        for (b, f) in base.iter().zip(&flipped_x) {
            assert_eq!(*b, -f);
        }
        let both = errs(&cb_neg, &neg_a, &neg_x);
        for (b, f) in base.iter().zip(&both) {
            assert_eq!(b, f);
        }
    }

    #[test]
    fn digest_tracks_config_changes() {
        let cfg = PopulationConfig::new(DeviceProfile::preset(DeviceKind::EpiRam));
        let mut other = cfg.clone();
        other.master_seed = 43;
        assert_ne!(cfg.digest(), other.digest());
    }
}
