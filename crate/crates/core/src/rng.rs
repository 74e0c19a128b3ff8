//! Reproducible random streams.
//!
//! A [`Seed`] names one ChaCha8 keystream: the master value keys the cipher
//! and the stream index selects an independent 2^64-block sub-stream. Any two
//! distinct `(master, stream)` pairs give independent generators, which is
//! what lets campaign trials run on any number of workers and still produce
//! identical output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Key of a counter-based random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    pub master: u64,
    pub stream: u64,
}

impl Seed {
    pub const fn new(master: u64, stream: u64) -> Self {
        Self { master, stream }
    }

    /// Seed for trial `trial` of grid point `point` in a campaign keyed by `master`.
    pub const fn for_trial(master: u64, point: usize, trial: u64) -> Self {
        Self {
            master,
            stream: ((point as u64) << 40) | (trial & ((1 << 40) - 1)),
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.stream);
        rng
    }
}

impl From<u64> for Seed {
    fn from(master: u64) -> Self {
        Self { master, stream: 0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_key_same_stream() {
        let a: Vec<u64> = Seed::new(7, 3).rng().random_iter().take(16).collect();
        let b: Vec<u64> = Seed::new(7, 3).rng().random_iter().take(16).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn streams_differ() {
        let a: u64 = Seed::new(7, 3).rng().random();
        let b: u64 = Seed::new(7, 4).rng().random();
        let c: u64 = Seed::new(8, 3).rng().random();
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn trial_seeds_are_distinct_across_points() {
        assert_ne!(Seed::for_trial(1, 0, 5), Seed::for_trial(1, 1, 5));
        assert_ne!(Seed::for_trial(1, 2, 0), Seed::for_trial(1, 2, 1));
    }
}
