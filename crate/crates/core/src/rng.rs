//! Deterministic random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 generator. A run is
//! identified by a 64-bit seed; work is split into chunks and chunk `i`
//! draws from ChaCha stream `i` of the key derived from that seed:
//!
//! ```text
//! seed ──seed_from_u64──▶ key ──set_stream(chunk index)──▶ substream
//! ```
//!
//! Results are reduced in chunk order, so they depend on the seed and the
//! chunk size only, never on how many threads ran the chunks.
//!
//! Independent sub-tasks (sweep cells, the two objectives of a cell) get
//! their own seeds from [`derive_seed`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Default number of samples per chunk.
pub const DEFAULT_CHUNK_SIZE: u64 = 1 << 16;

/// Generator for chunk `chunk` of the run identified by `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Sequential generator for single-threaded consumers such as the chain
/// simulator.
pub fn sequential_rng(seed: u64) -> Rng {
    chunk_rng(seed, 0)
}

/// Mixes `labels` into `seed` to give an independent child seed.
pub fn derive_seed(seed: u64, labels: &[u64]) -> u64 {
    labels
        .iter()
        .fold(splitmix64(seed), |acc, &label| splitmix64(acc ^ splitmix64(label.wrapping_add(0x9E37_79B9_7F4A_7C15))))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Splits `samples` into `(chunk index, chunk length)` pairs.
pub(crate) fn chunk_plan(samples: u64, chunk_size: u64) -> impl Iterator<Item = (u64, u64)> + Clone {
    let chunk_size = chunk_size.max(1);
    let chunks = samples.div_ceil(chunk_size);
    (0..chunks).map(move |i| (i, chunk_size.min(samples - i * chunk_size)))
}
