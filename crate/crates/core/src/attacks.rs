//! Key-recovery attacks: MAP recovery, empirical unicity distance and the
//! majority vote over repeated register periods.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::channel::{heterodyne_sample, signal_point, PlaintextSource, SystemParams};
use crate::error::{Error, Result};
use crate::inference::{
    accumulate, summarize, sweep_outcomes, Cipher, KeySpace, Observed, Scenario, SymbolFactors, TrialOutcome,
};
use crate::montecarlo::{Estimate, MonteCarlo};

/// Success record of an attack over Monte-Carlo trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttackResult {
    /// Symbols observed.
    pub n: usize,
    pub success: Estimate,
    /// Whether the recovered seed was the true one, per trial.
    #[serde(skip)]
    pub correct: Vec<bool>,
}

impl AttackResult {
    fn from_flags(n: usize, correct: Vec<bool>) -> Self {
        let samples: Vec<f64> = correct.iter().map(|&c| c as u8 as f64).collect();
        AttackResult {
            n,
            success: Estimate::mean_of(&samples),
            correct,
        }
    }

    fn from_outcomes(n: usize, outcomes: &[&TrialOutcome]) -> Self {
        Self::from_flags(n, outcomes.iter().map(|o| o.map_correct()).collect())
    }
}

/// MAP key recovery success at each length in `ns`, from shared trials.
pub fn map_attack_sweep(scenario: &Scenario, ns: &[usize], mc: &MonteCarlo) -> Result<Vec<AttackResult>> {
    let (ns, outcomes) = sweep_outcomes(scenario, ns, mc)?;
    Ok(ns
        .iter()
        .enumerate()
        .map(|(c, &n)| {
            let col: Vec<&TrialOutcome> = outcomes.iter().map(|t| &t[c]).collect();
            AttackResult::from_outcomes(n, &col)
        })
        .collect())
}

/// Probability that the MAP seed (ties to the smallest) is the true seed.
pub fn map_attack_success(scenario: &Scenario, n: usize, mc: &MonteCarlo) -> Result<AttackResult> {
    Ok(map_attack_sweep(scenario, &[n], mc)?.remove(0))
}

/// Result of an empirical unicity-distance search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum UnicityOutcome {
    Reached { n: usize, success: Estimate },
    NotReached { n_max: usize, success_at_n_max: Estimate },
}

impl UnicityOutcome {
    pub fn length(&self) -> Option<usize> {
        match self {
            UnicityOutcome::Reached { n, .. } => Some(*n),
            UnicityOutcome::NotReached { .. } => None,
        }
    }
}

/// Smallest `n <= n_max` at which the key is determined with probability at
/// least `target`, judged by `success - 2 se >= target`.
///
/// For `target < 1` success means the MAP seed is the true seed. For
/// `target = 1` it means certainty: the support is the true seed alone, so
/// a merely lucky MAP guess does not count.
///
/// Lengths are probed by doubling, then bisection. Trials are prefix
/// consistent across lengths, so every probe sees the same key and noise.
pub fn unicity_distance(scenario: &Scenario, target: f64, n_max: usize, mc: &MonteCarlo) -> Result<UnicityOutcome> {
    if !(target > 0.0 && target <= 1.0) {
        return Err(Error::invalid(format!("target probability {target} outside (0, 1]")));
    }
    scenario.source.check_len(n_max)?;
    let certain = target >= 1.0;
    let probe = |n: usize| -> Result<Estimate> {
        let (ns, outcomes) = sweep_outcomes(scenario, &[n], mc)?;
        let pt = summarize(&ns, &outcomes).remove(0);
        Ok(if certain { pt.determined } else { pt.map_success })
    };
    let passes = |e: &Estimate| e.value - 2.0 * e.std_error >= target;

    let mut lo: Option<usize> = None;
    let mut n = 0;
    let (mut hi, mut hi_est) = loop {
        let est = probe(n)?;
        if passes(&est) {
            break (n, est);
        }
        if n >= n_max {
            return Ok(UnicityOutcome::NotReached {
                n_max,
                success_at_n_max: est,
            });
        }
        lo = Some(n);
        n = if n == 0 { 1 } else { (2 * n).min(n_max) };
    };
    if let Some(mut lo) = lo {
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            let est = probe(mid)?;
            if passes(&est) {
                hi = mid;
                hi_est = est;
            } else {
                lo = mid;
            }
        }
    }
    Ok(UnicityOutcome::Reached { n: hi, success: hi_est })
}

/// Majority-vote attack at one number of periods.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoteResult {
    pub periods: usize,
    pub symbols_per_period: usize,
    /// Plurality of per-period MAP seeds (ties to the smallest).
    pub vote: AttackResult,
    /// MAP over the joint posterior of all observed symbols.
    pub joint: AttackResult,
}

/// Symbols covering one register period, `ceil((2^L - 1) / seg_bits)`.
pub fn symbols_per_period(params: &SystemParams) -> usize {
    let bits = params.lfsr.key_count() as usize;
    bits.div_ceil(params.seg_bits() as usize)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Ciphertext-only majority vote at every period count in `periods`, from
/// shared trials: the first `T` periods of a trial form the `T`-period
/// attack.
pub fn majority_vote_sweep(params: &SystemParams, periods: &[usize], mc: &MonteCarlo) -> Result<Vec<VoteResult>> {
    if periods.is_empty() || periods.contains(&0) {
        return Err(Error::invalid("period counts must be at least 1"));
    }
    let mut periods = periods.to_vec();
    periods.sort_unstable();
    periods.dedup();
    let t_max = *periods.last().unwrap();
    let per = symbols_per_period(params);
    let cipher = Cipher::AlphaEta(params.clone());
    let source = PlaintextSource::Uniform;

    // The segment sequence of every seed repeats after this many symbols.
    let reg_period = params.lfsr.period().length;
    let repeat = (reg_period / gcd(params.seg_bits() as u64, reg_period)) as usize;
    let keys = KeySpace::build(&cipher, repeat.min(per * t_max))?;
    let cols = keys.symbols();
    let noise = params.noise();
    let m = params.m;

    let rows = mc.run(|_, rng| {
        let key_index = rng.random_range(0..keys.key_count());
        let mut scratch = SymbolFactors::new();
        let mut factors = vec![0.0; cipher.bases()];
        let mut period_lw = vec![0.0; keys.key_count()];
        let mut joint_lw = vec![0.0; keys.key_count()];
        let mut tally: BTreeMap<usize, usize> = BTreeMap::new();
        let mut out = Vec::with_capacity(periods.len());
        let mut next = periods.iter().peekable();
        for t in 1..=t_max {
            period_lw.iter_mut().for_each(|w| *w = 0.0);
            for i in (t - 1) * per..t * per {
                let col = i % cols;
                let x = source.sample_symbol(i, rng);
                let s = signal_point(x, keys.segment(key_index, col) as u32, m);
                let y = heterodyne_sample(s, &noise, rng);
                scratch.fill(&cipher, Some(&noise), Observed::Phase(y), 0.5, &mut factors);
                accumulate(&mut period_lw, keys.column(col), &factors);
            }
            *tally.entry(argmax(&period_lw)).or_default() += 1;
            joint_lw.iter_mut().zip(&period_lw).for_each(|(j, p)| *j += p);
            if next.peek() == Some(&&t) {
                next.next();
                let (&winner, _) = tally
                    .iter()
                    .rev()
                    .max_by_key(|(_, &votes)| votes)
                    .expect("at least one period");
                out.push((winner == key_index, argmax(&joint_lw) == key_index));
            }
        }
        Ok(out)
    })?;

    Ok(periods
        .iter()
        .enumerate()
        .map(|(c, &t)| VoteResult {
            periods: t,
            symbols_per_period: per,
            vote: AttackResult::from_flags(t * per, rows.iter().map(|r| r[c].0).collect()),
            joint: AttackResult::from_flags(t * per, rows.iter().map(|r| r[c].1).collect()),
        })
        .collect())
}

pub fn majority_vote_attack(params: &SystemParams, periods: usize, mc: &MonteCarlo) -> Result<VoteResult> {
    Ok(majority_vote_sweep(params, &[periods], mc)?.remove(0))
}

/// First index of the largest weight.
fn argmax(w: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in w.iter().enumerate() {
        if v > w[best] {
            best = j;
        }
    }
    best
}
