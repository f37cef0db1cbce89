use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Seeded random stream with cheap, collision-resistant substream derivation.
///
/// Every public sampler in this crate takes an explicit `RngStream`, so any simulation
/// is bit-reproducible from a single master seed. Parallel work derives one substream
/// per unit (replicate, bootstrap block, engine) by index; results are then merged in
/// index order, which makes reports independent of worker count and scheduling.
pub struct RngStream {
    rng: ChaCha12Rng,
    seed: u64,
}

/// SplitMix64 finalizer; decorrelates consecutive seeds before they reach ChaCha.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        // Expand the u64 seed into a 256-bit key by iterating the finalizer.
        let mut z = seed;
        for chunk in key.chunks_mut(8) {
            z = splitmix64(z);
            chunk.copy_from_slice(&z.to_le_bytes());
        }
        RngStream {
            rng: ChaCha12Rng::from_seed(key),
            seed,
        }
    }

    /// The seed this stream was created from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent stream for work unit `index`; derivation is pure in (seed, index).
    pub fn substream(&self, index: u64) -> RngStream {
        RngStream::new(splitmix64(
            self.seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15),
        ))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on the open interval (0,1): 53-bit mantissa, offset half a step from 0.
    /// Never returns 0 or 1, so inverse-CDF transforms stay finite.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
    }

    /// Uniform integer in `0..m` by rejection (no modulo bias).
    pub fn below(&mut self, m: u64) -> u64 {
        assert!(m > 0);
        let zone = u64::MAX - (u64::MAX - m + 1) % m;
        loop {
            let v = self.rng.next_u64();
            if v <= zone {
                return v % m;
            }
        }
    }
}
