//! Seedable, splittable random streams.
//!
//! Every sampling routine takes an explicit [`RngStream`]. Child streams are
//! derived from the parent's seed and an index only, never from its current
//! state, so a worker pool can hand out streams in any order and still
//! reproduce a serial run bit for bit.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha20Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Seed of the `index`-th child of a stream seeded with `seed`.
    pub fn derive_seed(seed: u64, index: u64) -> u64 {
        splitmix64(splitmix64(seed) ^ splitmix64(index.wrapping_add(0x5DEE_CE66_D1CE_4E5B)))
    }

    /// Independent child stream; depends only on this stream's seed and `index`.
    pub fn split(&self, index: u64) -> RngStream {
        RngStream::new(Self::derive_seed(self.seed, index))
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
