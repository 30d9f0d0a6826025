use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seeded random stream with deterministic child derivation.
///
/// Backed by ChaCha12. `derive(i)` keeps the parent's key material and
/// selects ChaCha stream `i` under a key mixed from the parent's key and
/// stream, so siblings never overlap and nested derivations stay distinct.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    key: u64,
    stream: u64,
    rng: ChaCha12Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_key(seed, seed, 0)
    }

    fn with_key(seed: u64, key: u64, stream: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(key);
        rng.set_stream(stream);
        Self { seed, key, stream, rng }
    }

    /// Master seed this stream descends from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Child stream `index`; independent of the parent's position.
    pub fn derive(&self, index: u64) -> Self {
        let key = splitmix64(self.key ^ splitmix64(self.stream.wrapping_add(GOLDEN)));
        Self::with_key(self.seed, key, index)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
