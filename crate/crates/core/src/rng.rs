//! Deterministic random streams.
//!
//! Every independent unit of work (a sent symbol, a frame, a sweep point)
//! draws from its own ChaCha stream derived from the root seed, so results do
//! not depend on scheduling order or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Returns the random stream `stream` of the generator rooted at `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
