//! Reproducible random rational points.

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::jet::CoordId;
use crate::poly::{Point, Rational};

/// Source of small random rationals `p/q`, `p ∈ [−20, 20] \ {0}`,
/// `q ∈ [1, 10]`. Sample `k` of seed `s` uses ChaCha stream `k`, so draws
/// do not depend on scheduling.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Sampler { rng }
    }

    pub fn rational(&mut self) -> Rational {
        let mut p: i64 = self.rng.gen_range(-20..=19);
        if p >= 0 {
            p += 1;
        }
        let q: i64 = self.rng.gen_range(1..=10);
        Rational::new(BigInt::from(p), BigInt::from(q))
    }

    pub fn point(&mut self, coords: impl IntoIterator<Item = CoordId>) -> Point {
        coords.into_iter().map(|c| (c, self.rational())).collect()
    }
}

/// Stable 64-bit digest of a point, independent of map iteration order.
pub fn point_hash(p: &Point) -> u64 {
    let mut keys: Vec<_> = p.keys().copied().collect();
    keys.sort();
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for c in keys {
        for b in format!("{c}={};", p[&c]).bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}
