//! Deterministic random streams.
//!
//! Every randomized routine in this crate takes a `u64` seed and derives a
//! ChaCha8 generator from it. ChaCha8 is counter-based: a single seed yields
//! 2^64 independent streams, so trial `i` of an experiment can draw from
//! stream `i` and produce the same numbers no matter how many threads run or
//! in which order trials finish.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream index reserved for direction-net construction so that nets never
/// share a stream with numbered trials.
pub const NET_STREAM: u64 = u64::MAX;

/// Stream index reserved for net covering verification probes.
pub const VERIFY_STREAM: u64 = u64::MAX - 1;

/// Stream index reserved for one-shot sampling helpers.
pub const DEFAULT_STREAM: u64 = 0;

/// Generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
