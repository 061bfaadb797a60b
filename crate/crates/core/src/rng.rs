//! Deterministic stream-derived randomness.
//!
//! Every randomized operation takes an explicit RNG handle. Experiments fan
//! trials out across threads, so reproducibility cannot rely on a single
//! shared generator: instead each logical stream is derived independently as
//!
//! ```text
//! stream(seed, label, index) = ChaCha20(key = SHA-256(seed_le || label || index_le))
//! ```
//!
//! Identical `(seed, label, index)` always yields the identical stream,
//! regardless of thread scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

/// The generator handed to every randomized operation.
pub type Rng = ChaCha20Rng;

/// Derive the RNG for stream `index` of the named substream of `seed`.
pub fn derive(seed: u64, label: &str, index: u64) -> Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    h.update(index.to_le_bytes());
    let digest = h.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha20Rng::from_seed(key)
}

/// Draw a uniform f64 in [0, 1) with 53 bits of precision.
pub fn uniform_f64(rng: &mut Rng) -> f64 {
    use rand::RngCore;
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draw a uniform value in [0, bound) by rejection, bias-free.
pub fn uniform_u64(rng: &mut Rng, bound: u64) -> u64 {
    use rand::RngCore;
    assert!(bound > 0);
    let zone = u64::MAX - (u64::MAX % bound);
    loop {
        let v = rng.next_u64();
        if v < zone {
            return v % bound;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn streams_are_reproducible() {
        let mut a = derive(7, "test", 3);
        let mut b = derive(7, "test", 3);
        for _ in 0..16 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn streams_differ_by_label_and_index() {
        let mut a = derive(7, "test", 0);
        let mut b = derive(7, "test", 1);
        let mut c = derive(7, "other", 0);
        let x = a.next_u64();
        assert_ne!(x, b.next_u64());
        assert_ne!(x, c.next_u64());
    }

    #[test]
    fn uniform_u64_respects_bound() {
        let mut rng = derive(1, "bound", 0);
        for _ in 0..1000 {
            assert!(uniform_u64(&mut rng, 7) < 7);
        }
    }
}
