//! Counter-based random streams.
//!
//! Every random draw is addressed by `(seed, domain, index)`: the seed and
//! domain form the ChaCha key, the index selects the ChaCha stream. A member
//! or restart therefore sees the same numbers no matter which worker
//! evaluates it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Domain tags keep unrelated consumers of one seed apart.
pub mod domain {
    pub const BEABLE: u64 = 0x6265_6162_6c65;
    pub const MEASUREMENT: u64 = 0x006d_6561_7375_7265;
    pub const WITNESS: u64 = 0x0077_6974_6e65_7373;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub domain: u64,
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl StreamKey {
    pub fn new(seed: u64, domain: u64) -> Self {
        StreamKey { seed, domain }
    }

    /// Independent key for a sub-task identified by `tag`.
    pub fn child(self, tag: u64) -> Self {
        StreamKey { seed: self.seed, domain: mix(self.domain ^ mix(tag)) }
    }

    /// Generator for item `index` of this key.
    pub fn rng(self, index: u64) -> StreamRng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.domain.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(index);
        rng
    }
}

/// Derives a per-task seed from a base seed; used where a whole sub-run
/// (e.g. one scenario step) needs its own seed.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    mix(seed ^ mix(tag))
}
