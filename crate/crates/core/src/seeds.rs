//! Seed derivation shared by every randomized component.
//!
//! All randomness in the crate flows from explicit `u64` seeds. Sub-seeds are
//! derived with a splitmix64 finalizer over `(parent, domain, index)` so that a
//! trial's seed depends only on the master seed and the trial index, never on
//! scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from a parent seed, a domain tag and an index.
pub fn derive(parent: u64, domain: &str, index: u64) -> u64 {
    let mut h = splitmix64(parent);
    for b in domain.bytes() {
        h = splitmix64(h ^ u64::from(b));
    }
    splitmix64(h ^ splitmix64(index))
}

pub fn rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rng_for(parent: u64, domain: &str, index: u64) -> SimRng {
    rng(derive(parent, domain, index))
}
