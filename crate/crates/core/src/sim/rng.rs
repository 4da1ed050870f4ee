//! Independent random streams per replication.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator for replication `replication` of an experiment seeded
/// with `seed`. Streams for different replications never overlap, so
/// adding replications leaves earlier ones unchanged.
pub fn stream(seed: u64, replication: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication);
    rng
}
