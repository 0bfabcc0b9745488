//! Counter-based reproducible random streams.
//!
//! A stream is a pure function of `(seed, label path, counter)`, so parallel
//! replicates can each derive an independent substream and produce the same
//! draws regardless of scheduling order.

use crate::error::{Error, Result};
use core::convert::Infallible;
use rand::rand_core::TryRng;
use rand_distr::{Distribution, StandardNormal, StudentT, Uniform};

/// Deterministic random stream keyed by a 64-bit seed and a label path.
///
/// Identical `(seed, labels)` yield identical draw sequences; distinct labels
/// behave as statistically independent streams.
#[derive(Debug, Clone)]
pub struct RngStream {
    key: u64,
    counter: u64,
}

/// Distribution selector for [`RngStream::draw`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dist {
    StandardNormal,
    StudentT { df: f64 },
    Uniform { a: f64, b: f64 },
}

impl RngStream {
    pub fn new(seed: u64, label: &str) -> Self {
        let key = mix64(mix64(seed ^ 0x9E3779B97F4A7C15) ^ fnv1a64(label.as_bytes()));
        Self { key, counter: 0 }
    }

    /// Derive an independent child stream identified by `label`.
    pub fn substream(&self, label: &str) -> Self {
        let key = mix64(self.key ^ mix64(fnv1a64(label.as_bytes()) ^ 0xD1342543DE82EF95));
        Self { key, counter: 0 }
    }

    /// Derive an independent child stream identified by an index, typically a
    /// replicate or split number.
    pub fn substream_index(&self, index: u64) -> Self {
        let key = mix64(self.key ^ mix64(index.wrapping_mul(0xBF58476D1CE4E5B9) ^ 0x94D049BB133111EB));
        Self { key, counter: 0 }
    }

    /// Draw `count` values from the given distribution.
    pub fn draw(&mut self, dist: Dist, count: usize) -> Result<Vec<f64>> {
        match dist {
            Dist::StandardNormal => {
                Ok((0..count).map(|_| StandardNormal.sample(self)).collect())
            }
            Dist::StudentT { df } => {
                if !(df > 0.0) {
                    return Err(Error::Domain(format!("student-t needs df > 0, got {df}")));
                }
                let t = StudentT::new(df)
                    .map_err(|e| Error::Domain(format!("student-t: {e}")))?;
                Ok((0..count).map(|_| t.sample(self)).collect())
            }
            Dist::Uniform { a, b } => {
                if !(a < b) {
                    return Err(Error::Domain(format!("uniform needs a < b, got [{a}, {b})")));
                }
                let u = Uniform::new(a, b)
                    .map_err(|e| Error::Domain(format!("uniform: {e}")))?;
                Ok((0..count).map(|_| u.sample(self)).collect())
            }
        }
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(self)
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform integer in [0, bound) without modulo bias.
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let v = self.next_u64();
            if v >= threshold {
                return v % bound;
            }
        }
    }
}

impl RngStream {
    /// Core generator: output word at the current counter position.
    pub fn next_u64(&mut self) -> u64 {
        let c = self.counter;
        self.counter = self.counter.wrapping_add(1);
        mix64(mix64(c.wrapping_mul(0x9E3779B97F4A7C15) ^ self.key) ^ self.key.rotate_left(32))
    }
}

// Infallible TryRng gives the blanket `rand::Rng` implementation, so the
// stream plugs into rand_distr samplers.
impl TryRng for RngStream {
    type Error = Infallible;

    fn try_next_u32(&mut self) -> core::result::Result<u32, Infallible> {
        Ok((self.next_u64() >> 32) as u32)
    }

    fn try_next_u64(&mut self) -> core::result::Result<u64, Infallible> {
        Ok(self.next_u64())
    }

    fn try_fill_bytes(&mut self, dst: &mut [u8]) -> core::result::Result<(), Infallible> {
        for chunk in dst.chunks_mut(8) {
            let v = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&v[..chunk.len()]);
        }
        Ok(())
    }
}

/// splitmix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xCBF29CE484222325u64;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x100000001B3);
    }
    hash
}
