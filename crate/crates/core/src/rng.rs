//! Counter-based random numbers for shot sampling.
//!
//! Every value is a pure function of `(seed, shot, stream, draw)`:
//!
//! ```text
//! key    = mix(mix(seed ^ mix(shot + G)) ^ (stream + 1) * G)
//! word_d = mix(key + (d + 1) * G)
//! ```
//!
//! where `G = 0x9E37_79B9_7F4A_7C15` and `mix` is the SplitMix64 finalizer
//! (`z ^= z >> 30; z *= 0xBF58_476D_1CE4_E5B9; z ^= z >> 27;
//! z *= 0x94D0_49BB_1331_11EB; z ^= z >> 31`), all arithmetic wrapping
//! modulo 2^64. Uniform reals take the top 53 bits: `(word >> 11) · 2^-53`.
//!
//! Because a shot's randomness never depends on other shots, shots may be
//! run in any order or in parallel with identical results.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent sub-streams within one shot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    /// Basis outcome of the final measurement.
    Outcome = 0,
    /// Depolarizing Pauli insertions.
    GateNoise = 1,
    /// Classical readout flips.
    Readout = 2,
}

/// Generator for one `(seed, shot, stream)` triple.
#[derive(Debug, Clone)]
pub struct ShotRng {
    key: u64,
    draw: u64,
}

impl ShotRng {
    pub fn new(seed: u64, shot: u64, stream: Stream) -> Self {
        let shot_key = mix64(seed ^ mix64(shot.wrapping_add(GOLDEN)));
        let key = mix64(shot_key ^ (stream as u64 + 1).wrapping_mul(GOLDEN));
        Self { key, draw: 0 }
    }

    /// Word at an absolute draw index, without advancing.
    pub fn word_at(&self, draw: u64) -> u64 {
        mix64(self.key.wrapping_add(draw.wrapping_add(1).wrapping_mul(GOLDEN)))
    }

    pub fn next_u64(&mut self) -> u64 {
        let w = self.word_at(self.draw);
        self.draw += 1;
        w
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli trial with success probability `p`.
    pub fn chance(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Uniform integer in `0..n` for small `n`.
    pub fn below(&mut self, n: u64) -> u64 {
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }
}

/// Derives a child seed, e.g. one per point of a parameter sweep.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix64(seed.wrapping_add(mix64(index ^ 0xD1B5_4A32_D192_ED03)))
}
