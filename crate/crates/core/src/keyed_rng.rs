//! Counter-style random streams keyed by (purpose, seed, item id).
//!
//! Each draw site derives its own ChaCha stream from a SHA-256 of its key, so
//! per-utterance draws do not depend on processing order and are identical on
//! every platform. Index draws go through `u32` ranges for the same reason.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub fn keyed_rng(domain: &str, seed: u64, key: &str) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(domain.as_bytes());
    hasher.update([0u8]);
    hasher.update(seed.to_le_bytes());
    hasher.update(key.as_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 32];
    bytes.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(bytes)
}

/// Uniform index in `0..len`. `len` must be non-zero and fit in `u32`.
pub fn index<R: Rng>(rng: &mut R, len: usize) -> usize {
    let bound = u32::try_from(len).expect("index range fits in u32");
    rng.random_range(0..bound) as usize
}

/// Fisher–Yates shuffle using [`index`].
pub fn shuffle<R: Rng, T>(rng: &mut R, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = index(rng, i + 1);
        items.swap(i, j);
    }
}
