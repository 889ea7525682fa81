//! Stable configuration digests for output provenance.

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Hex digest (first 16 chars of SHA-256) of the canonical JSON form of a
/// configuration value. Field order follows struct declaration order, so the
/// digest is stable across runs and platforms.
pub fn config_digest<T: Serialize>(value: &T) -> String {
    let canonical = serde_json::to_vec(value).expect("config serialization cannot fail");
    let hash = Sha256::digest(&canonical);
    let mut out = String::with_capacity(16);
    for byte in &hash[..8] {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Probe {
        a: u32,
        b: f64,
    }

    #[test]
    fn digest_is_stable_and_sensitive() {
        let d1 = config_digest(&Probe { a: 1, b: 0.5 });
        let d2 = config_digest(&Probe { a: 1, b: 0.5 });
        let d3 = config_digest(&Probe { a: 2, b: 0.5 });
        assert_eq!(d1, d2);
        assert_ne!(d1, d3);
        assert_eq!(d1.len(), 16);
    }
}
