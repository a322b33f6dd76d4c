//! Reproducible random streams for the Monte-Carlo routines.
//!
//! Samples are drawn in fixed-size shards. Shard `k` of a run with seed `s`
//! uses ChaCha8 keyed by `s` (via `seed_from_u64`) on stream `k`, so the
//! result does not depend on how shards are scheduled and is identical on
//! every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Number of samples per shard.
pub const SHARD_SIZE: usize = 1 << 16;

/// Generator for one shard.
pub fn shard_rng(seed: u64, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

/// Run `body(rng, count)` once per shard and sum the returned counts.
pub fn count_sharded<F>(samples: usize, seed: u64, mut body: F) -> u64
where
    F: FnMut(&mut ChaCha8Rng, usize) -> u64,
{
    let mut total = 0;
    let mut remaining = samples;
    let mut shard = 0u64;
    while remaining > 0 {
        let count = remaining.min(SHARD_SIZE);
        let mut rng = shard_rng(seed, shard);
        total += body(&mut rng, count);
        remaining -= count;
        shard += 1;
    }
    total
}
