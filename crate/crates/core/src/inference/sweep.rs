//! Monte-Carlo trial engine.
//!
//! One trial draws a seed, a plaintext and channel noise from the model,
//! then folds the ciphertext into the exact key posterior one symbol at a
//! time. Posterior statistics are recorded at every requested length, so a
//! single pass serves a whole `n` sweep. Draws happen in the order key,
//! then `(x_i, r_i)` per symbol, so a prefix of a longer trial is exactly
//! the trial a shorter run would have drawn.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::keyspace::{Cipher, Ciphertext, KeySpace, Observed, SymbolFactors};
use super::posterior::accumulate;
use crate::channel::{heterodyne_sample, signal_point, CiphertextSeq, PlaintextSource};
use crate::error::{Error, Result};
use crate::montecarlo::{Accumulator, Estimate, MonteCarlo};

/// Cipher plus the plaintext law the attacker assumes (and the model uses).
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub cipher: Cipher,
    pub source: PlaintextSource,
}

impl Scenario {
    pub fn new(cipher: Cipher, source: PlaintextSource) -> Self {
        Scenario { cipher, source }
    }

    pub fn key_count(&self) -> usize {
        self.cipher.key_count() as usize
    }
}

/// One model draw.
#[derive(Debug, Clone)]
pub struct Trial {
    pub key_index: usize,
    pub plaintext: Vec<u8>,
    pub ciphertext: Ciphertext,
    /// `ln p(y_i | x_i, k)` of each symbol under the true key and plaintext.
    pub true_log_lik: Vec<f64>,
}

impl Trial {
    pub fn seed(&self) -> u64 {
        self.key_index as u64 + 1
    }
}

pub fn sample_trial(scenario: &Scenario, keys: &KeySpace, n: usize, rng: &mut ChaCha8Rng) -> Result<Trial> {
    scenario.source.check_len(n)?;
    if keys.symbols() < n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: keys.symbols(),
        });
    }
    let key_index = rng.random_range(0..keys.key_count());
    let mut plaintext = Vec::with_capacity(n);
    let mut true_log_lik = Vec::with_capacity(n);
    let ciphertext = match &scenario.cipher {
        Cipher::AlphaEta(p) => {
            let noise = p.noise();
            let mut ys = Vec::with_capacity(n);
            for i in 0..n {
                let x = scenario.source.sample_symbol(i, rng);
                let s = signal_point(x, keys.segment(key_index, i) as u32, p.m);
                let y = heterodyne_sample(s, &noise, rng);
                plaintext.push(x);
                true_log_lik.push(noise.log_density(y - s as f64));
                ys.push(y);
            }
            Ciphertext::Phases(CiphertextSeq::new(ys, p.m)?)
        }
        Cipher::Asc(_) => {
            let mut ys = Vec::with_capacity(n);
            for i in 0..n {
                let x = scenario.source.sample_symbol(i, rng);
                plaintext.push(x);
                true_log_lik.push(0.0);
                ys.push(x ^ keys.segment(key_index, i) as u8);
            }
            Ciphertext::Bits(ys)
        }
    };
    Ok(Trial {
        key_index,
        plaintext,
        ciphertext,
        true_log_lik,
    })
}

/// Posterior statistics of one trial at one length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub n: usize,
    pub true_key: usize,
    /// `|K_y|`.
    pub support: usize,
    /// `H(K | y)` in bits.
    pub entropy: f64,
    /// MAP key index (ties to the smallest index).
    pub map_key: usize,
    pub map_prob: f64,
    /// `log2 p(y | x, k) - log2 p(y)`, one sample of `I(X^n K; Y^n)`.
    pub info: f64,
}

impl TrialOutcome {
    pub fn spurious(&self) -> usize {
        self.support - 1
    }

    pub fn map_correct(&self) -> bool {
        self.map_key == self.true_key
    }

    fn from_log_weights(lw: &[f64], n: usize, true_key: usize, true_ll: f64) -> Result<Self> {
        let mut top = f64::NEG_INFINITY;
        let mut map_key = 0;
        let mut support = 0;
        for (j, &w) in lw.iter().enumerate() {
            if w > top {
                top = w;
                map_key = j;
            }
            if w.is_finite() {
                support += 1;
            }
        }
        if support == 0 {
            return Err(Error::EmptySupport);
        }
        let mut total = 0.0;
        for &w in lw {
            total += (w - top).exp();
        }
        let lse = top + total.ln();
        let mut weighted = 0.0;
        for &w in lw {
            if w.is_finite() {
                weighted += (w - lse).exp() * w;
            }
        }
        let ln2 = std::f64::consts::LN_2;
        // log p(y|x,k) - log p(y), grouped so that a point-mass posterior on
        // the true key yields exactly ln |K|.
        let info = (true_ll - top) - total.ln() + (lw.len() as f64).ln();
        Ok(TrialOutcome {
            n,
            true_key,
            support,
            entropy: ((lse - weighted) / ln2).max(0.0),
            map_key,
            map_prob: (top - lse).exp(),
            info: info / ln2,
        })
    }
}

/// Folds one trial into the posterior and records outcomes at each length
/// in `ns` (sorted ascending).
pub fn evaluate_trial(scenario: &Scenario, keys: &KeySpace, trial: &Trial, ns: &[usize]) -> Result<Vec<TrialOutcome>> {
    let noise = scenario.cipher.noise();
    let mut scratch = SymbolFactors::new();
    let mut factors = vec![0.0; scenario.cipher.bases()];
    let mut lw = vec![0.0; keys.key_count()];
    let mut true_ll = 0.0;
    let mut out = Vec::with_capacity(ns.len());
    let mut next = ns.iter().peekable();
    let mut done = 0;
    loop {
        while next.peek().is_some_and(|&&n| n == done) {
            out.push(TrialOutcome::from_log_weights(&lw, done, trial.key_index, true_ll)?);
            next.next();
        }
        if next.peek().is_none() {
            break;
        }
        let observed: Observed = trial.ciphertext.observed(done);
        scratch.fill(
            &scenario.cipher,
            noise.as_ref(),
            observed,
            scenario.source.prob_one(done),
            &mut factors,
        );
        accumulate(&mut lw, keys.column(done), &factors);
        true_ll += trial.true_log_lik[done];
        done += 1;
    }
    Ok(out)
}

fn sorted_lengths(ns: &[usize]) -> Result<Vec<usize>> {
    if ns.is_empty() {
        return Err(Error::invalid("empty length sweep"));
    }
    let mut sorted = ns.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    Ok(sorted)
}

/// Raw outcomes, indexed `[trial][length]`, lengths sorted ascending.
pub fn sweep_outcomes(
    scenario: &Scenario,
    ns: &[usize],
    mc: &MonteCarlo,
) -> Result<(Vec<usize>, Vec<Vec<TrialOutcome>>)> {
    let ns = sorted_lengths(ns)?;
    let n_max = *ns.last().unwrap();
    scenario.source.check_len(n_max)?;
    let keys = KeySpace::build(&scenario.cipher, n_max)?;
    let outcomes = mc.run(|_, rng| {
        let trial = sample_trial(scenario, &keys, n_max, rng)?;
        evaluate_trial(scenario, &keys, &trial, &ns)
    })?;
    Ok((ns, outcomes))
}

/// Estimates at one length, all from the same trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub n: usize,
    /// Average number of spurious keys.
    pub spurious: Estimate,
    /// Key equivocation `H(K | Y^n)` in bits.
    pub equivocation: Estimate,
    /// Largest MAP probability seen; a sampled lower estimate of `Pi(n)`.
    pub pi: Estimate,
    pub map_success: Estimate,
    /// Fraction of trials whose support is the true key alone.
    pub determined: Estimate,
    /// `I(X^n K; Y^n)` in bits.
    pub information: Estimate,
}

/// Per-length running sums over trials.
#[derive(Debug, Clone, Default)]
struct PointAccumulator {
    spurious: Accumulator,
    equivocation: Accumulator,
    pi: f64,
    map_success: Accumulator,
    determined: Accumulator,
    information: Accumulator,
}

impl PointAccumulator {
    fn push(&mut self, o: &TrialOutcome) {
        self.spurious.push(o.spurious() as f64);
        self.equivocation.push(o.entropy);
        self.pi = self.pi.max(o.map_prob);
        self.map_success.push(o.map_correct() as u8 as f64);
        self.determined.push((o.support == 1) as u8 as f64);
        self.information.push(o.info);
    }

    fn finish(&self, n: usize) -> SweepPoint {
        SweepPoint {
            n,
            spurious: self.spurious.estimate(),
            equivocation: self.equivocation.estimate(),
            pi: Estimate::exact(self.pi, self.spurious.estimate().trials),
            map_success: self.map_success.estimate(),
            determined: self.determined.estimate(),
            information: self.information.estimate(),
        }
    }
}

pub fn summarize(ns: &[usize], outcomes: &[Vec<TrialOutcome>]) -> Vec<SweepPoint> {
    let mut acc = vec![PointAccumulator::default(); ns.len()];
    for row in outcomes {
        acc.iter_mut().zip(row).for_each(|(a, o)| a.push(o));
    }
    ns.iter().zip(&acc).map(|(&n, a)| a.finish(n)).collect()
}

/// Runs `mc.trials` trials and summarizes them at every length in `ns`.
/// Memory does not grow with the trial count.
pub fn sweep(scenario: &Scenario, ns: &[usize], mc: &MonteCarlo) -> Result<Vec<SweepPoint>> {
    let ns = sorted_lengths(ns)?;
    let n_max = *ns.last().unwrap();
    scenario.source.check_len(n_max)?;
    let keys = KeySpace::build(&scenario.cipher, n_max)?;
    let acc = mc.fold(
        vec![PointAccumulator::default(); ns.len()],
        |_, rng| {
            let trial = sample_trial(scenario, &keys, n_max, rng)?;
            evaluate_trial(scenario, &keys, &trial, &ns)
        },
        |acc, row| acc.iter_mut().zip(&row).for_each(|(a, o)| a.push(o)),
    )?;
    Ok(ns.iter().zip(&acc).map(|(&n, a)| a.finish(n)).collect())
}

pub(crate) fn single(scenario: &Scenario, n: usize, mc: &MonteCarlo) -> Result<SweepPoint> {
    Ok(sweep(scenario, &[n], mc)?.remove(0))
}
