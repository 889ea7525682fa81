//! Crossbar mapping and analog readout: a real matrix is encoded onto
//! differential conductance pairs, programmed through the device model, read
//! out as bit-line currents, and decoded back to numbers.

use crate::device::{apply_c2c_noise_scaled, target_state_for_weight, C2cMode, DeviceProfile};
use crate::matrix::Matrix;
use crate::rng::CounterRng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CrossbarError {
    #[error("dimension mismatch: matrix is {rows}x{cols}, vector has length {len}")]
    DimensionMismatch { rows: usize, cols: usize, len: usize },
    #[error("matrix entry ({row}, {col}) = {value} outside [-1, 1]")]
    WeightOutOfRange { row: usize, col: usize, value: f64 },
}

/// A programmed crossbar: one differential conductance pair per logical
/// weight. Immutable after programming; readouts may run concurrently.
#[derive(Clone, Debug)]
pub struct CrossbarState {
    rows: usize,
    cols: usize,
    g_plus: Matrix,
    g_minus: Matrix,
    v_read: f64,
    profile: DeviceProfile,
}

impl CrossbarState {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn v_read(&self) -> f64 {
        self.v_read
    }

    pub fn profile(&self) -> &DeviceProfile {
        &self.profile
    }

    pub fn g_plus(&self) -> &Matrix {
        &self.g_plus
    }

    pub fn g_minus(&self) -> &Matrix {
        &self.g_minus
    }

    /// Decoded readout with the read voltage cancelled symbolically, so the
    /// result is bit-identical for every `v_read`. This is the path the
    /// workload pipeline uses; `analog_vmm` + `decode_output` is the same
    /// computation expressed in physical units (equal to within one ulp).
    pub fn read_decoded(&self, x: &[f64]) -> Result<Vec<f64>, CrossbarError> {
        self.check_input(x)?;
        let g_max = self.profile.g_max();
        Ok((0..self.rows)
            .map(|r| {
                let gp = self.g_plus.row(r);
                let gm = self.g_minus.row(r);
                let s: f64 = x
                    .iter()
                    .zip(gp.iter().zip(gm))
                    .map(|(&xi, (&p, &m))| xi * (p - m))
                    .sum();
                s / g_max
            })
            .collect())
    }

    /// As `read_decoded`, subtracting the nominal `sum(x_i) * g_min` floor
    /// baseline (reference-column compensation, for sensitivity studies).
    pub fn read_decoded_compensated(&self, x: &[f64]) -> Result<Vec<f64>, CrossbarError> {
        self.check_input(x)?;
        let g_max = self.profile.g_max();
        let g_min = self.profile.g_min();
        let baseline: f64 = x.iter().map(|&xi| xi * g_min).sum();
        Ok((0..self.rows)
            .map(|r| {
                let gp = self.g_plus.row(r);
                let gm = self.g_minus.row(r);
                let s: f64 = x
                    .iter()
                    .zip(gp.iter().zip(gm))
                    .map(|(&xi, (&p, &m))| xi * (p - m))
                    .sum();
                (s - baseline) / g_max
            })
            .collect())
    }

    fn check_input(&self, x: &[f64]) -> Result<(), CrossbarError> {
        if x.len() != self.cols {
            return Err(CrossbarError::DimensionMismatch {
                rows: self.rows,
                cols: self.cols,
                len: x.len(),
            });
        }
        Ok(())
    }
}

/// Exact floating-point product A*x: the reference the analog path is
/// compared against.
pub fn ideal_vmm(a: &Matrix, x: &[f64]) -> Result<Vec<f64>, CrossbarError> {
    if x.len() != a.cols() {
        return Err(CrossbarError::DimensionMismatch {
            rows: a.rows(),
            cols: a.cols(),
            len: x.len(),
        });
    }
    Ok((0..a.rows())
        .map(|r| a.row(r).iter().zip(x).map(|(&w, &xi)| w * xi).sum())
        .collect())
}

/// Program a matrix with entries in [-1, 1] onto a crossbar.
///
/// Each weight w splits into u+ = max(w, 0) and u- = max(-w, 0); each half
/// targets the conductance clip(u * g_max, g_min, g_max), converted to a step
/// index through the linear inverse map, realized on the potentiation ladder
/// (every trial programs upward from full reset), then perturbed by one
/// cycle-to-cycle draw. Noise draws are keyed by cell index, so programming
/// order never changes the outcome.
pub fn encode_and_program(
    a: &Matrix,
    profile: &DeviceProfile,
    v_read: f64,
    rng: &CounterRng,
) -> Result<CrossbarState, CrossbarError> {
    let rows = a.rows();
    let cols = a.cols();
    let g_max = profile.g_max();
    let g_min = profile.g_min();
    let range = g_max - g_min;
    let n_steps = profile.n_steps();
    let ladder = profile.potentiation_ladder();
    let noisy = profile.c2c_sigma > 0.0;

    let mut g_plus = Matrix::zeros(rows, cols);
    let mut g_minus = Matrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            let w = a.get(r, c);
            if !(-1.0..=1.0).contains(&w) {
                return Err(CrossbarError::WeightOutOfRange {
                    row: r,
                    col: c,
                    value: w,
                });
            }
            // Substream 2k for the plus device, 2k+1 for the minus device.
            let cell = (r * cols + c) as u64;
            for (polarity, u) in [(0u64, w.max(0.0)), (1u64, (-w).max(0.0))] {
                let target = (u * g_max).clamp(g_min, g_max);
                let u_lin = if range > 0.0 { (target - g_min) / range } else { 0.0 };
                let n_star = target_state_for_weight(u_lin, n_steps);
                let mut g = ladder.conductance(n_star);
                if noisy {
                    let mut cell_rng = rng.substream(2 * cell + polarity);
                    let scale = match profile.c2c_mode {
                        C2cMode::PerWrite => 1.0,
                        C2cMode::PerPulse => f64::from(n_star).sqrt(),
                    };
                    g = apply_c2c_noise_scaled(g, profile, cell_rng.next_normal(), scale);
                }
                let dest = if polarity == 0 { &mut g_plus } else { &mut g_minus };
                dest.set(r, c, g);
            }
        }
    }

    Ok(CrossbarState {
        rows,
        cols,
        g_plus,
        g_minus,
        v_read,
        profile: profile.clone(),
    })
}

/// Analog readout: bit-line currents I_j = sum_i (x_i v_read)(g+_ji - g-_ji)
/// in amperes.
pub fn analog_vmm(cb: &CrossbarState, x: &[f64]) -> Result<Vec<f64>, CrossbarError> {
    cb.check_input(x)?;
    Ok((0..cb.rows)
        .map(|r| {
            let gp = cb.g_plus.row(r);
            let gm = cb.g_minus.row(r);
            let s: f64 = x
                .iter()
                .zip(gp.iter().zip(gm))
                .map(|(&xi, (&p, &m))| xi * (p - m))
                .sum();
            cb.v_read * s
        })
        .collect())
}

/// Decode currents back to numbers: y_j = I_j / (v_read * g_max).
///
/// Normalizing by g_max (not by the conductance range) leaves the g_min
/// floor in the result as a residual error of order 1/MW; that residual is
/// the memory-window mechanism the harness measures.
pub fn decode_output(currents: &[f64], cb: &CrossbarState) -> Vec<f64> {
    let denom = cb.v_read * cb.profile.g_max();
    currents.iter().map(|&i| i / denom).collect()
}
