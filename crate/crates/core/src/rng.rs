//! Reproducible random streams.
//!
//! A stream is a ChaCha8 generator keyed by `root_seed` with the ChaCha
//! stream counter set to `stream_id`, so each `(root_seed, stream_id)` pair
//! yields the same sequence on every platform and under any thread schedule.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub type StreamRng = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub root_seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(root_seed: u64, stream_id: u64) -> Self {
        RngStream { root_seed, stream_id }
    }

    /// Same root seed, different stream.
    pub fn with_stream(&self, stream_id: u64) -> Self {
        RngStream { root_seed: self.root_seed, stream_id }
    }

    /// A new root seed derived from this one and a label. Used to give each
    /// experiment its own family of replicate streams.
    pub fn derive(&self, label: &str) -> Self {
        let mut h = self.root_seed ^ 0x9e37_79b9_7f4a_7c15;
        for b in label.bytes() {
            h = splitmix(h ^ u64::from(b));
        }
        RngStream { root_seed: splitmix(h ^ self.stream_id), stream_id: 0 }
    }

    pub fn rng(&self) -> StreamRng {
        let mut r = ChaCha8Rng::seed_from_u64(self.root_seed);
        r.set_stream(self.stream_id);
        r
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform on (0, 1], safe to feed into `ln`.
pub fn open_unit<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}
