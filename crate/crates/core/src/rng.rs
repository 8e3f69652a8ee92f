use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 20_240_601;

/// Points drawn per independent stream. Work is always cut into streams of a
/// fixed length so results do not depend on the thread count.
pub const STREAM_LEN: usize = 1 << 16;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `(stream index, length)` chunks of at most `chunk` items covering `count`.
pub fn streams_of(count: usize, chunk: usize) -> Vec<(u64, usize)> {
    (0..count.div_ceil(chunk))
        .map(|k| (k as u64, chunk.min(count - k * chunk)))
        .collect()
}

pub fn streams(count: usize) -> Vec<(u64, usize)> {
    streams_of(count, STREAM_LEN)
}
