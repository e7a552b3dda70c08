//! Seed derivation for reproducible, parallelism-invariant sampling.
//!
//! Every random quantity is drawn from a ChaCha8 stream whose 64-bit seed is
//! derived from a master seed and a sequence of indices with [`substream`].
//! Work items therefore never share generator state, and results do not
//! depend on how trials are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// The SplitMix64 finalizer.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the seed of substream `index` of `master`:
/// `splitmix64(master ^ splitmix64(index))`.
#[inline]
pub fn substream(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// A generator positioned at the start of substream `index` of `master`.
pub fn trial_rng(master: u64, index: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(substream(master, index))
}

/// A generator seeded directly from `seed`.
pub fn seeded_rng(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One Bernoulli(p) draw. Always consumes exactly one `f64` from the stream so
/// the draw layout does not depend on `p`.
#[inline]
pub fn bernoulli<R: Rng + ?Sized>(rng: &mut R, p: f64) -> bool {
    rng.random::<f64>() < p
}
