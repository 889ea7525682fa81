//! RRAM device physics: conductance-state ladders with weight-update
//! nonlinearity, cycle-to-cycle programming noise, and the four literature
//! device presets.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The four catalogued devices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DeviceKind {
    AgSi,
    TaOxHfOx,
    AlOxHfO2,
    EpiRam,
}

impl DeviceKind {
    pub const ALL: [DeviceKind; 4] = [
        DeviceKind::AgSi,
        DeviceKind::TaOxHfOx,
        DeviceKind::AlOxHfO2,
        DeviceKind::EpiRam,
    ];

    /// Canonical preset name used in configuration files.
    pub fn name(self) -> &'static str {
        match self {
            DeviceKind::AgSi => "Ag:a-Si",
            DeviceKind::TaOxHfOx => "TaOx/HfOx",
            DeviceKind::AlOxHfO2 => "AlOx/HfO2",
            DeviceKind::EpiRam => "EpiRAM",
        }
    }

    pub fn from_name(name: &str) -> Option<DeviceKind> {
        DeviceKind::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// When cycle-to-cycle noise is injected during programming.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum C2cMode {
    /// One draw per programming event (default).
    #[default]
    PerWrite,
    /// Per-pulse contributions accumulated over the pulse train; the
    /// effective std grows as sqrt(pulse count).
    PerPulse,
}

/// Physical device parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceProfile {
    pub name: String,
    /// Number of programmable conductance states (>= 2).
    pub states: u32,
    /// Weight-update nonlinearity for potentiation.
    pub nl_potentiation: f64,
    /// Weight-update nonlinearity for depression.
    pub nl_depression: f64,
    /// On-state resistance in ohms; g_max = 1 / r_on.
    pub r_on: f64,
    /// Ratio g_max / g_min (> 1; may be infinite for an ideal floor).
    pub memory_window: f64,
    /// Cycle-to-cycle std as a fraction of the conductance range.
    pub c2c_sigma: f64,
    #[serde(default)]
    pub c2c_mode: C2cMode,
}

#[derive(Debug, Error, PartialEq)]
pub enum DeviceError {
    #[error("states must be >= 2, got {0}")]
    TooFewStates(u32),
    #[error("memory_window must be > 1, got {0}")]
    BadMemoryWindow(f64),
    #[error("r_on must be > 0, got {0}")]
    BadOnResistance(f64),
    #[error("c2c_sigma must lie in [0, 1], got {0}")]
    BadC2cSigma(f64),
}

impl DeviceProfile {
    /// Tabulated profile for one of the four catalogued devices.
    pub fn preset(kind: DeviceKind) -> DeviceProfile {
        let (states, nl_p, nl_d, r_on, mw, c2c) = match kind {
            DeviceKind::AgSi => (97, 2.4, -4.88, 26e6, 12.5, 0.035),
            DeviceKind::TaOxHfOx => (128, 0.04, -0.63, 100e3, 10.0, 0.037),
            DeviceKind::AlOxHfO2 => (40, 1.94, -0.61, 16.9e3, 4.43, 0.05),
            DeviceKind::EpiRam => (64, 0.5, -0.5, 81e3, 50.2, 0.02),
        };
        DeviceProfile {
            name: kind.name().to_string(),
            states,
            nl_potentiation: nl_p,
            nl_depression: nl_d,
            r_on,
            memory_window: mw,
            c2c_sigma: c2c,
            c2c_mode: C2cMode::PerWrite,
        }
    }

    pub fn validate(&self) -> Result<(), DeviceError> {
        if self.states < 2 {
            return Err(DeviceError::TooFewStates(self.states));
        }
        if !(self.memory_window > 1.0) {
            return Err(DeviceError::BadMemoryWindow(self.memory_window));
        }
        if !(self.r_on > 0.0) || !self.r_on.is_finite() {
            return Err(DeviceError::BadOnResistance(self.r_on));
        }
        if !(0.0..=1.0).contains(&self.c2c_sigma) {
            return Err(DeviceError::BadC2cSigma(self.c2c_sigma));
        }
        Ok(())
    }

    /// Maximum conductance in siemens.
    pub fn g_max(&self) -> f64 {
        1.0 / self.r_on
    }

    /// Minimum conductance in siemens (zero when the window is infinite).
    pub fn g_min(&self) -> f64 {
        self.g_max() / self.memory_window
    }

    /// Number of programming steps N = states - 1.
    pub fn n_steps(&self) -> u32 {
        self.states - 1
    }

    /// Ladder for programming upward from full reset.
    pub fn potentiation_ladder(&self) -> ConductanceLadder {
        ConductanceLadder {
            n_steps: self.n_steps(),
            g_min: self.g_min(),
            g_max: self.g_max(),
            nu: self.nl_potentiation,
        }
    }

    /// Ladder for programming downward (used only in bidirectional mode).
    pub fn depression_ladder(&self) -> ConductanceLadder {
        ConductanceLadder {
            n_steps: self.n_steps(),
            g_min: self.g_min(),
            g_max: self.g_max(),
            nu: self.nl_depression,
        }
    }
}

/// Discrete conductance ladder for one programming direction.
#[derive(Clone, Copy, Debug)]
pub struct ConductanceLadder {
    pub n_steps: u32,
    pub g_min: f64,
    pub g_max: f64,
    pub nu: f64,
}

impl ConductanceLadder {
    /// Conductance at step `n` of the normalized exponential ladder:
    /// g_min + (1 - exp(-nu n/N)) / (1 - exp(-nu)) * (g_max - g_min),
    /// degenerating to the linear ladder at nu = 0.
    ///
    /// Panics if `n` exceeds the step count; out-of-range indices are a
    /// contract violation, not a recoverable state.
    pub fn conductance(&self, n: u32) -> f64 {
        assert!(
            n <= self.n_steps,
            "step index {n} out of range 0..={}",
            self.n_steps
        );
        let t = f64::from(n) / f64::from(self.n_steps);
        let frac = if self.nu == 0.0 {
            t
        } else {
            // expm1 keeps the ratio accurate for |nu| down to ~1e-300.
            f64::exp_m1(-self.nu * t) / f64::exp_m1(-self.nu)
        };
        self.g_min + frac * (self.g_max - self.g_min)
    }
}

/// Step index targeting a normalized weight magnitude under the linear
/// programming-pulse assumption: round(u * N), ties away from zero.
///
/// Panics if `u` is outside [0, 1].
pub fn target_state_for_weight(u: f64, n_steps: u32) -> u32 {
    assert!(
        (0.0..=1.0).contains(&u),
        "normalized weight {u} outside [0, 1]"
    );
    (u * f64::from(n_steps)).round() as u32
}

/// One cycle-to-cycle programming perturbation: the realized conductance is
/// clipped back into the physical range, so truncation bias near the rails
/// is part of the contract.
pub fn apply_c2c_noise(g: f64, profile: &DeviceProfile, noise_draw: f64) -> f64 {
    apply_c2c_noise_scaled(g, profile, noise_draw, 1.0)
}

/// As `apply_c2c_noise` with the std multiplied by `scale`; the per-pulse
/// mode passes sqrt(pulse count).
pub(crate) fn apply_c2c_noise_scaled(
    g: f64,
    profile: &DeviceProfile,
    noise_draw: f64,
    scale: f64,
) -> f64 {
    let range = profile.g_max() - profile.g_min();
    let perturbed = g + noise_draw * profile.c2c_sigma * scale * range;
    perturbed.clamp(profile.g_min(), profile.g_max())
}
