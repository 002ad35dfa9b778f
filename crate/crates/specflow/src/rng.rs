//! Counter-based deterministic random numbers for experiment sampling.
//!
//! The generator is pure: draw k of stream s under seed `seed` is
//! `splitmix64(seed + GAMMA * (s * 2^32 + k))`, so results are
//! reproducible across platforms and parallel schedules. The algorithm
//! identifier below is echoed into every run report.

/// Identifier recorded in reports.
pub const ALGORITHM: &str = "splitmix64-counter-v1";

const GAMMA: u64 = 0x9E3779B97F4A7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// A stateless stream view: (seed, stream) address a sequence of draws.
#[derive(Clone, Copy, Debug)]
pub struct CounterRng {
    seed: u64,
    stream: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64, stream: u64) -> CounterRng {
        CounterRng {
            seed,
            stream,
            counter: 0,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let idx = self.stream.wrapping_shl(32).wrapping_add(self.counter);
        self.counter += 1;
        splitmix64(self.seed.wrapping_add(GAMMA.wrapping_mul(idx)))
    }

    /// Uniform in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform 128-bit circle position.
    pub fn next_circle_u128(&mut self) -> u128 {
        ((self.next_u64() as u128) << 64) | self.next_u64() as u128
    }
}
