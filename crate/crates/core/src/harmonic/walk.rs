//! Weighted random walks on a finite window.
//!
//! From `x` the walk moves to neighbor `w` with probability proportional to
//! `η_xw`. A walk that reaches a vertex with a missing incident weight has
//! left the region where the weights are known and is censored.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::EdgeWeights;
use crate::lattice::{neighbors, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialOutcome {
    Returned,
    NotReturned,
    Censored,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkOutcome {
    pub trials: u64,
    pub returned: u64,
    pub censored: u64,
    pub seed: u64,
}

impl WalkOutcome {
    /// Returned trials over uncensored trials; 0 if every trial was censored.
    pub fn frequency(&self) -> f64 {
        let kept = self.trials - self.censored;
        if kept == 0 {
            0.0
        } else {
            self.returned as f64 / kept as f64
        }
    }

    /// Counts one trial.
    pub fn record(&mut self, outcome: TrialOutcome) {
        self.trials += 1;
        match outcome {
            TrialOutcome::Returned => self.returned += 1,
            TrialOutcome::Censored => self.censored += 1,
            TrialOutcome::NotReturned => {}
        }
    }

    pub fn new(seed: u64) -> Self {
        Self {
            trials: 0,
            returned: 0,
            censored: 0,
            seed,
        }
    }
}

#[inline]
fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// One walk of at most `steps` steps. Trial `trial` draws from ChaCha8
/// stream `trial` under key `seed`, so trials are independent of each other
/// and of how they are scheduled.
pub fn walk_trial(weights: &EdgeWeights, start: VertexId, steps: u64, seed: u64, trial: u64) -> TrialOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let mut x = start;
    for _ in 0..steps {
        let nb = neighbors(x);
        let mut w = [0.0; 6];
        for (slot, &y) in w.iter_mut().zip(&nb) {
            match weights.get(x, y) {
                Some(eta) => *slot = eta,
                None => return TrialOutcome::Censored,
            }
        }
        let total: f64 = w.iter().sum();
        let mut r = unit_f64(&mut rng) * total;
        let mut pick = 5;
        for (k, &eta) in w.iter().enumerate() {
            if r < eta {
                pick = k;
                break;
            }
            r -= eta;
        }
        x = nb[pick];
        if x == start {
            return TrialOutcome::Returned;
        }
    }
    TrialOutcome::NotReturned
}

/// Runs `trials` walks from `start` and counts returns within `steps`.
pub fn random_walk_return(weights: &EdgeWeights, start: VertexId, steps: u64, trials: u64, seed: u64) -> WalkOutcome {
    let mut out = WalkOutcome::new(seed);
    for t in 0..trials {
        out.record(walk_trial(weights, start, steps, seed, t));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Window;

    fn uniform(half: i32) -> EdgeWeights {
        EdgeWeights::uniform(Window::centered(half), 1.0 / libm::sqrt(3.0)).unwrap()
    }

    #[test]
    fn one_step_never_returns() {
        let out = random_walk_return(&uniform(4), VertexId::new(0, 0), 1, 2000, 11);
        assert_eq!(out.returned, 0);
        assert_eq!(out.frequency(), 0.0);
    }

    #[test]
    fn two_step_return_probability() {
        let trials = 100_000;
        let out = random_walk_return(&uniform(4), VertexId::new(0, 0), 2, trials, 2024);
        assert_eq!(out.censored, 0);
        let p = 1.0 / 6.0;
        let sigma = libm::sqrt(p * (1.0 - p) / trials as f64);
        assert!((out.frequency() - p).abs() < 3.0 * sigma, "{}", out.frequency());
    }

    #[test]
    fn deterministic_given_seed() {
        let w = uniform(6);
        let a = random_walk_return(&w, VertexId::new(0, 0), 30, 500, 99);
        let b = random_walk_return(&w, VertexId::new(0, 0), 30, 500, 99);
        assert_eq!(a, b);
    }

    #[test]
    fn frequency_grows_with_steps() {
        let w = uniform(8);
        let mut prev = 0.0;
        for steps in [2, 4, 8, 16, 32] {
            let f = random_walk_return(&w, VertexId::new(0, 0), steps, 3000, 5).frequency();
            assert!(f >= prev, "{steps}: {f} < {prev}");
            prev = f;
        }
    }

    #[test]
    fn walks_leaving_the_window_are_censored() {
        let out = random_walk_return(&uniform(1), VertexId::new(0, 0), 50, 200, 3);
        assert!(out.censored > 0);
        assert_eq!(out.trials, 200);
    }
}
