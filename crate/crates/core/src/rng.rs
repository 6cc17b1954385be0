//! Deterministic random number generation.
//!
//! Every random draw in this crate goes through [`DetRng`], a ChaCha8 stream
//! with hand-written scalar draw rules. Dataset bytes and training runs must
//! be reproducible from recorded seeds alone, so the draw rules are fixed
//! here instead of borrowed from a distribution library whose internals may
//! change between releases.

use rand_core::{RngCore, SeedableRng};

/// Stable seed mixer (splitmix64 finalizer). Not cryptographic.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent child seed from a master seed and an index.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Seeded ChaCha8 generator with fixed scalar draw conventions.
pub struct DetRng(rand_chacha::ChaCha8Rng);

impl DetRng {
    pub fn seed(seed: u64) -> Self {
        DetRng(rand_chacha::ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal via Box-Muller; consumes two uniforms per draw.
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Uniform index in `[0, n)`. `n` must be nonzero.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "index range must be nonzero");
        (((self.next_u64() as u128) * (n as u128)) >> 64) as usize
    }
}
