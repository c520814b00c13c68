//! Seeded, splittable random streams.
//!
//! Monte Carlo runs must be reproducible from a single master seed and
//! insensitive to execution order, so every unit of work (a trial, a grid
//! point, a matrix draw) gets its own ChaCha stream derived from
//! `(master_seed, stream id)`. Streams with distinct ids never overlap.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used throughout the crate.
pub type Stream = ChaCha8Rng;

/// Derive the substream identified by `id` from a master seed.
///
/// ChaCha natively supports 2^64 independent streams per seed; `id` selects
/// one. The same `(seed, id)` pair always yields the same sequence.
pub fn substream(master_seed: u64, id: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(id);
    rng
}

/// Stream id for trial `trial` of grid point `point` in a sweep.
///
/// Grid points own the high 32 bits and trials the low 32, so any sweep with
/// fewer than 2^32 trials per point gets non-overlapping streams.
pub fn sweep_stream_id(point: usize, trial: u64) -> u64 {
    ((point as u64) << 32) | (trial & 0xffff_ffff)
}

/// Reserved trial slot used when a sweep draws one matrix per grid point
/// instead of one per trial.
pub const MATRIX_STREAM_SLOT: u64 = 0xffff_ffff;
