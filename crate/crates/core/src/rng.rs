//! Deterministic counter-based random streams.
//!
//! Every random quantity in a simulation is drawn from a stream keyed by a
//! 64-bit value derived from the master seed plus structural indices (trial,
//! cell, ...). The n-th word of a stream is a pure function of (key, n), so
//! output is bit-identical across platforms and worker counts, and any
//! substream can be opened without consuming state from its parent.

/// Golden-ratio increment used by the SplitMix64 sequence.
const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: a full-avalanche bijection on u64.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// n-th word of the stream with the given key (SplitMix64 at offset n).
#[inline]
fn word_at(key: u64, n: u64) -> u64 {
    mix64(key.wrapping_add(n.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// Derive a child key by absorbing one more index into a parent key.
#[inline]
pub fn derive_key(parent: u64, index: u64) -> u64 {
    mix64(parent ^ word_at(index, 0))
}

/// A seeded stream with sequential draw semantics.
#[derive(Clone, Debug)]
pub struct CounterRng {
    key: u64,
    counter: u64,
    /// Second Box-Muller deviate held for the next `next_normal` call.
    cached_normal: Option<f64>,
}

impl CounterRng {
    pub fn new(key: u64) -> Self {
        Self {
            key,
            counter: 0,
            cached_normal: None,
        }
    }

    /// Open an independent substream; does not advance this stream.
    pub fn substream(&self, index: u64) -> CounterRng {
        CounterRng::new(derive_key(self.key, index))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let w = word_at(self.key, self.counter);
        self.counter += 1;
        w
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [-1, 1].
    #[inline]
    pub fn next_symmetric(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }

    /// Standard normal deviate via Box-Muller on two uniform words.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.cached_normal.take() {
            return z;
        }
        // u1 in (0, 1] so the log is finite.
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.cached_normal = Some(r * theta.sin());
        r * theta.cos()
    }
}
