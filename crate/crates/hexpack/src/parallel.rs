//! Scoped-thread executors. Work is split into contiguous chunks, one per
//! worker, and every result lands where a sequential run would put it, so
//! output does not depend on the thread count.

use std::num::NonZeroUsize;
use std::thread;

use hexpack_core::harmonic::{walk_trial, WalkOutcome};
use hexpack_core::solver::SweepExecutor;
use hexpack_core::{EdgeWeights, VertexId};

/// Jacobi sweep executor over at most `threads` workers.
#[derive(Debug, Clone, Copy)]
pub struct Threaded {
    threads: NonZeroUsize,
}

impl Threaded {
    pub fn new(threads: NonZeroUsize) -> Self {
        Self { threads }
    }

    pub fn threads(&self) -> usize {
        self.threads.get()
    }
}

fn chunk_len(total: usize, threads: usize) -> usize {
    total.div_ceil(threads).max(1)
}

impl SweepExecutor for Threaded {
    fn run(&self, out: &mut [f64], update: &(dyn Fn(usize) -> f64 + Sync)) {
        let threads = self.threads();
        if threads == 1 || out.len() < 2 {
            for (i, o) in out.iter_mut().enumerate() {
                *o = update(i);
            }
            return;
        }
        let len = chunk_len(out.len(), threads);
        thread::scope(|s| {
            for (c, chunk) in out.chunks_mut(len).enumerate() {
                s.spawn(move || {
                    for (j, o) in chunk.iter_mut().enumerate() {
                        *o = update(c * len + j);
                    }
                });
            }
        });
    }
}

/// Same counts as `hexpack_core::harmonic::random_walk_return` for any
/// thread count: trial `t` always uses random stream `t`.
pub fn random_walk_return(
    weights: &EdgeWeights,
    start: VertexId,
    steps: u64,
    trials: u64,
    seed: u64,
    threads: NonZeroUsize,
) -> WalkOutcome {
    let threads = threads.get() as u64;
    let len = trials.div_ceil(threads).max(1);
    let batches: Vec<WalkOutcome> = thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|c| {
                let lo = (c * len).min(trials);
                let hi = ((c + 1) * len).min(trials);
                s.spawn(move || {
                    let mut out = WalkOutcome::new(seed);
                    for t in lo..hi {
                        out.record(walk_trial(weights, start, steps, seed, t));
                    }
                    out
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("walk worker panicked")).collect()
    });
    let mut total = WalkOutcome::new(seed);
    for b in batches {
        total.trials += b.trials;
        total.returned += b.returned;
        total.censored += b.censored;
    }
    total
}
