//! Seeded random streams.
//!
//! Every stochastic operation takes an integer seed and draws from a fresh [`ChaCha8Rng`].
//! Independent trials use `base_seed + trial_index` (wrapping), so a trial can be replayed alone.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use rand_chacha::ChaCha8Rng as TrialRng;

/// Identifier recorded alongside every seeded result.
pub const RNG_ALGORITHM: &str = "chacha8";

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn trial_seed(base_seed: u64, trial: u64) -> u64 {
    base_seed.wrapping_add(trial)
}
