//! Reproducible Monte-Carlo plumbing.
//!
//! Every trial owns a ChaCha8 stream selected by its trial index under the
//! master seed, and results are reduced in trial order. Outputs therefore
//! depend only on `(seed, trials)`, never on how many workers ran them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Scalar Monte-Carlo result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub trials: usize,
}

impl Estimate {
    /// Sample mean with standard error `s / sqrt(n)`.
    pub fn mean_of(samples: &[f64]) -> Estimate {
        let n = samples.len().max(1);
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = if samples.len() > 1 {
            samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Estimate {
            value: mean,
            std_error: (var / n as f64).sqrt(),
            trials: samples.len(),
        }
    }

    /// A value with no sampling error attached.
    pub fn exact(value: f64, trials: usize) -> Estimate {
        Estimate {
            value,
            std_error: 0.0,
            trials,
        }
    }

    /// `|self - other| <= k` combined standard errors.
    pub fn agrees_with(&self, other: f64, k: f64) -> bool {
        (self.value - other).abs() <= k * self.std_error
    }
}

/// Trial count, master seed and worker count of one estimator run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarlo {
    pub trials: usize,
    pub seed: u64,
    /// `None` uses the ambient rayon pool.
    pub workers: Option<usize>,
}

impl MonteCarlo {
    pub fn new(trials: usize, seed: u64) -> Self {
        MonteCarlo {
            trials,
            seed,
            workers: None,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    /// Same trial budget under an independent seed.
    pub fn reseeded(self, salt: u64) -> Self {
        MonteCarlo {
            seed: self
                .seed
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add(salt.wrapping_mul(0xD1B5_4A32_D192_ED03) | 1),
            ..self
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("at least one trial is required"));
        }
        if self.workers == Some(0) {
            return Err(Error::invalid("worker count must be positive"));
        }
        Ok(())
    }

    /// RNG stream of trial `index`.
    pub fn trial_rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }

    /// Runs `f` once per trial and returns the outputs in trial order.
    pub fn run<T, F>(&self, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize, &mut ChaCha8Rng) -> Result<T> + Sync,
    {
        self.fold(Vec::with_capacity(self.trials), f, |acc, t| acc.push(t))
    }

    /// Runs `f` once per trial and feeds the outputs to `merge` in trial
    /// order, holding at most one block of outputs at a time.
    pub fn fold<T, A, F, G>(&self, init: A, f: F, mut merge: G) -> Result<A>
    where
        T: Send,
        F: Fn(usize, &mut ChaCha8Rng) -> Result<T> + Sync,
        G: FnMut(&mut A, T) + Send,
        A: Send,
    {
        self.check()?;
        let body = || {
            let mut acc = init;
            let mut start = 0;
            while start < self.trials {
                let end = (start + BLOCK).min(self.trials);
                let block = (start..end)
                    .into_par_iter()
                    .map(|i| f(i, &mut self.trial_rng(i)))
                    .collect::<Result<Vec<T>>>()?;
                block.into_iter().for_each(|t| merge(&mut acc, t));
                start = end;
            }
            Ok(acc)
        };
        match self.workers {
            None => body(),
            Some(w) => rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::invalid(format!("cannot build worker pool: {e}")))?
                .install(body),
        }
    }
}

/// Trials evaluated per parallel block in [`MonteCarlo::fold`].
const BLOCK: usize = 1 << 14;

/// Streaming mean and variance (Welford), reduced in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accumulator {
    count: usize,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn estimate(&self) -> Estimate {
        let var = if self.count > 1 {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        } else {
            0.0
        };
        Estimate {
            value: self.mean,
            std_error: (var / self.count.max(1) as f64).sqrt(),
            trials: self.count,
        }
    }
}
