//! Counter-based seeding.
//!
//! Every random draw in the crate comes from `SeedStream::rng(index)`, a
//! ChaCha8 generator keyed by the stream's seed and positioned on the
//! stream numbered `index`. Sample `i` therefore sees the same bits no
//! matter which worker evaluates it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SampleRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStream {
    seed: u64,
}

impl SeedStream {
    pub fn new(master: u64) -> Self {
        SeedStream { seed: master }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// An independent stream for a named purpose.
    pub fn substream(&self, tag: u64) -> SeedStream {
        SeedStream {
            seed: splitmix64(self.seed ^ splitmix64(tag.wrapping_add(0x5851_F42D_4C95_7F2D))),
        }
    }

    pub fn rng(&self, index: u64) -> SampleRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
