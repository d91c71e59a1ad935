use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Counter-based generator for task `stream` under `master_seed`.
///
/// Every task (draw, chain, path) owns a ChaCha8 stream selected by its task
/// index, so results do not depend on how tasks are spread over workers.
pub fn stream_rng(master_seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}
