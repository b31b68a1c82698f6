//! Counter-based noise source for the stochastic first-order oracle.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::Scalar;

/// Per-run noise stream.
///
/// Draw number `n` is a pure function of `(seed, n)`: the ChaCha stream index
/// is set to the call counter before every draw, so results never depend on
/// how runs are scheduled across threads.
#[derive(Debug, Clone)]
pub struct OracleStream {
    seed: u64,
    counter: u64,
    rng: ChaCha8Rng,
}

impl OracleStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            counter: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Stream for run `run_id` of a batch whose base seed is `base`.
    pub fn for_run(base: u64, run_id: u64) -> Self {
        Self::new(mix_seed(base, run_id))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of oracle calls served so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Fills `out` with isotropic Gaussian noise of total variance `sigma²`
    /// and advances the counter. With `sigma = 0` only the counter moves.
    pub fn draw<S: Scalar>(&mut self, sigma: S, out: &mut [S]) {
        if sigma > S::zero() {
            self.rng.set_stream(self.counter);
            self.rng.set_word_pos(0);
            let scale = sigma.as_f64() / (out.len() as f64).sqrt();
            for o in out.iter_mut() {
                let n: f64 = StandardNormal.sample(&mut self.rng);
                *o = S::of(scale * n);
            }
        } else {
            out.iter_mut().for_each(|o| *o = S::zero());
        }
        self.counter += 1;
    }

    /// Counts an oracle call that needs no noise.
    pub(crate) fn tick(&mut self) {
        self.counter += 1;
    }
}

/// SplitMix64 finalizer over the pair, used to derive per-run seeds.
pub fn mix_seed(base: u64, run_id: u64) -> u64 {
    let mut z = base ^ run_id.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_and_counter_same_draw() {
        let mut a = OracleStream::new(11);
        let mut b = OracleStream::new(11);
        let mut va = [0.0f64; 4];
        let mut vb = [0.0f64; 4];
        for _ in 0..5 {
            a.draw(1.0, &mut va);
            b.draw(1.0, &mut vb);
            assert_eq!(va, vb);
        }
        assert_eq!(a.counter(), 5);
    }

    #[test]
    fn draws_depend_only_on_counter() {
        // a zero-noise call in between must not shift later draws
        let mut a = OracleStream::new(3);
        let mut b = OracleStream::new(3);
        let mut v = [0.0f64; 3];
        let mut w = [0.0f64; 3];
        a.draw(0.0, &mut v);
        a.draw(2.0, &mut v);
        b.tick();
        b.draw(2.0, &mut w);
        assert_eq!(v, w);
    }

    #[test]
    fn successive_draws_differ() {
        let mut a = OracleStream::new(5);
        let mut v = [0.0f64; 3];
        let mut w = [0.0f64; 3];
        a.draw(1.0, &mut v);
        a.draw(1.0, &mut w);
        assert_ne!(v, w);
    }

    #[test]
    fn run_seeds_are_distinct() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|r| mix_seed(42, r)).collect();
        assert_eq!(seeds.len(), 1000);
    }
}
