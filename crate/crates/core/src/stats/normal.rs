//! Normal-density helpers shared by the fitters.

pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// log N(x; mean, std).
#[inline]
pub fn log_pdf(x: f64, mean: f64, std: f64) -> f64 {
    let z = (x - mean) / std;
    -LN_SQRT_2PI - std.ln() - 0.5 * z * z
}

/// Standard normal CDF.
#[inline]
pub fn cdf_std(z: f64) -> f64 {
    0.5 * libm::erfc(-z * std::f64::consts::FRAC_1_SQRT_2)
}

/// log(sum(exp(v))) over a small slice, stable for very negative terms.
#[inline]
pub fn logsumexp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = values.iter().map(|&v| (v - max).exp()).sum();
    max + sum.ln()
}
