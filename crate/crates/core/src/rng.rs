//! Portable seeded PRNG used for every random choice in the generator.
//!
//! The algorithm is fixed so that a seed means the same building in any
//! language that reimplements it:
//!
//! 1. The 64-bit user seed is mixed once with SplitMix64 (increment
//!    `0x9E3779B97F4A7C15`, multipliers `0xBF58476D1CE4E5B9` and
//!    `0x94D049BB133111EB`, shifts 30/27/31). A zero result is replaced by
//!    `0x9E3779B97F4A7C15`.
//! 2. Each draw advances an xorshift64* state: `x ^= x >> 12; x ^= x << 25;
//!    x ^= x >> 27;` and returns `x * 0x2545F4914F6CDD1D` (wrapping).
//! 3. `below(n)` is the high word of the 128-bit product `draw * n`.
//! 4. `unit()` is `(draw >> 11) * 2^-53`, a double in `[0, 1)`.
//!
//! Test vectors live in the unit tests below.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Debug)]
pub struct Rng {
    state: u64,
}

fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        let state = match splitmix64(seed) {
            0 => GOLDEN,
            s => s,
        };
        Rng { state }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform integer in `0..n`. `n` must be nonzero.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    /// Uniform double in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Index drawn proportionally to `weights`. Weights must be finite,
    /// non-negative and not all zero.
    pub fn weighted(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        assert!(total > 0.0, "weighted choice over zero total");
        let mut target = self.unit() * total;
        for (i, w) in weights.iter().enumerate() {
            if target < *w {
                return i;
            }
            target -= w;
        }
        // rounding residue: last positive weight
        weights.iter().rposition(|w| *w > 0.0).unwrap()
    }
}
