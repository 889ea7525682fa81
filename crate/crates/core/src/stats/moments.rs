//! Central-moment statistics of error populations.

use super::{MomentSummary, StatsError};

/// Neumaier-compensated sum: accumulated rounding stays at a few ulps of the
/// result even for long, poorly conditioned sums.
pub(crate) fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() {
            (sum - t) + v
        } else {
            (v - t) + sum
        };
        sum = t;
    }
    sum + comp
}

/// Uncorrected central-moment summary: mean, m2, m3/m2^1.5, m4/m2^2 - 3.
///
/// Skewness and kurtosis are undefined markers (`None`) when the variance is
/// zero. Fails on fewer than two samples.
pub fn moments(samples: &[f64]) -> Result<MomentSummary, StatsError> {
    let n = samples.len();
    if n < 2 {
        return Err(StatsError::InsufficientData { needed: 2, got: n });
    }
    let nf = n as f64;
    let mean = compensated_sum(samples.iter().copied()) / nf;

    // One compensated pass over the centered powers.
    let (mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0);
    let (mut c2, mut c3, mut c4) = (0.0, 0.0, 0.0);
    let add = |sum: &mut f64, comp: &mut f64, v: f64| {
        let t = *sum + v;
        *comp += if sum.abs() >= v.abs() {
            (*sum - t) + v
        } else {
            (v - t) + *sum
        };
        *sum = t;
    };
    for &x in samples {
        let d = x - mean;
        let d2 = d * d;
        add(&mut s2, &mut c2, d2);
        add(&mut s3, &mut c3, d2 * d);
        add(&mut s4, &mut c4, d2 * d2);
    }
    let m2 = (s2 + c2) / nf;
    let m3 = (s3 + c3) / nf;
    let m4 = (s4 + c4) / nf;

    let (skewness, excess_kurtosis) = if m2 > 0.0 {
        (Some(m3 / m2.powf(1.5)), Some(m4 / (m2 * m2) - 3.0))
    } else {
        (None, None)
    };
    Ok(MomentSummary {
        mean,
        variance: m2,
        skewness,
        excess_kurtosis,
        n,
    })
}
