//! Seeded, splittable random streams.
//!
//! Every sample index gets its own ChaCha8 stream derived from
//! `(seed, index)`, so results do not depend on how samples are split
//! across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Number of consecutive sample indices handed to one worker.
pub const BLOCK_SIZE: usize = 256;

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Contiguous index blocks `[start, end)` covering `0..n`.
pub fn blocks(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n.div_ceil(BLOCK_SIZE)).map(move |b| (b * BLOCK_SIZE, ((b + 1) * BLOCK_SIZE).min(n)))
}
