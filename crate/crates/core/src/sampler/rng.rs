//! Seed-split random streams: one ChaCha stream per (seed, scale).

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Recorded in run manifests so samples can be regenerated.
pub const RNG_SCHEME: &str = "ChaCha12; key = seed_from_u64(seed); stream = scale index";

pub fn layer_rng(seed: u64, h: usize) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(h as u64);
    rng
}

/// Stream for auxiliary experiments (Monte Carlo estimators), disjoint from layer streams.
pub fn aux_rng(seed: u64, tag: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream((1u64 << 63) | tag);
    rng
}
