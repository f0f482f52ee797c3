//! Hierarchically derived, seeded random streams.
//!
//! A stream is identified by a root seed plus a path of indices, e.g.
//! `(replica, schedule step, sample)`. The path is hashed into a ChaCha8 key,
//! so sibling streams are independent and any stream can be rebuilt from its
//! identifier alone, regardless of which thread consumes it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator handed out by [`RngStream::generator`].
pub type StreamRng = ChaCha8Rng;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    seed: u64,
    path: Vec<u64>,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream {
            seed,
            path: Vec::new(),
        }
    }

    /// Derives the child stream `self / index`.
    pub fn child(&self, index: u64) -> Self {
        let mut path = Vec::with_capacity(self.path.len() + 1);
        path.extend_from_slice(&self.path);
        path.push(index);
        RngStream {
            seed: self.seed,
            path,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> &[u64] {
        &self.path
    }

    fn key(&self) -> [u8; 32] {
        // Absorb seed, depth and each path element; the depth term keeps
        // (s) and (s, 0) apart.
        let mut state = splitmix64(self.seed ^ 0x5851_F42D_4C95_7F2D);
        state = splitmix64(state ^ self.path.len() as u64);
        for &p in &self.path {
            state = splitmix64(state ^ splitmix64(p.wrapping_add(0x2545_F491_4F6C_DD1D)));
        }
        let mut key = [0u8; 32];
        for (i, chunk) in key.chunks_exact_mut(8).enumerate() {
            state = splitmix64(state.wrapping_add(i as u64));
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        key
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn generator(&self) -> StreamRng {
        ChaCha8Rng::from_seed(self.key())
    }
}
