//! Exact key posteriors and Monte-Carlo estimators of the information
//! quantities built on them.

mod exact;
mod info;
mod keyspace;
mod posterior;
mod sweep;

pub use exact::{expected_spurious, MAX_PAIR_WORK};
pub use info::{per_symbol_info, per_symbol_info_for};
pub use keyspace::{AttackKind, Cipher, Ciphertext, KeySpace, MAX_TABLE_ENTRIES};
pub use posterior::{key_posterior, key_posterior_with, spurious_count, support_set, KeyPosterior};
pub use sweep::{
    evaluate_trial, sample_trial, summarize, sweep, sweep_outcomes, Scenario, SweepPoint, Trial, TrialOutcome,
};

pub(crate) use keyspace::{Observed, SymbolFactors};
pub(crate) use posterior::accumulate;

use serde::Serialize;

use crate::channel::{signal_point, PlaintextSource, SystemParams};
use crate::error::{Error, Result};
use crate::montecarlo::{Estimate, MonteCarlo};

/// Largest `L + n * seg_bits` for which the joint signal law is enumerated.
pub const MAX_JOINT_BITS: u32 = 32;

fn alpha_eta(params: &SystemParams, source: &PlaintextSource) -> Scenario {
    Scenario::new(Cipher::AlphaEta(params.clone()), source.clone())
}

/// Average number of spurious keys `N_k`.
pub fn avg_spurious(scenario: &Scenario, n: usize, mc: &MonteCarlo) -> Result<Estimate> {
    Ok(sweep::single(scenario, n, mc)?.spurious)
}

/// Key equivocation `H(K | Y^n)` in bits.
pub fn key_equivocation(scenario: &Scenario, n: usize, mc: &MonteCarlo) -> Result<Estimate> {
    Ok(sweep::single(scenario, n, mc)?.equivocation)
}

/// Sampled lower estimate of `Pi(n)`: the largest MAP probability seen.
pub fn pi_function(scenario: &Scenario, n: usize, mc: &MonteCarlo) -> Result<Estimate> {
    Ok(sweep::single(scenario, n, mc)?.pi)
}

/// Checks the joint-enumeration budget for `n` symbols.
pub fn check_joint_budget(params: &SystemParams, n: usize) -> Result<()> {
    let bits = params.lfsr.length() as u64 + n as u64 * params.seg_bits() as u64;
    if bits > MAX_JOINT_BITS as u64 {
        let max_n = MAX_JOINT_BITS.saturating_sub(params.lfsr.length()) / params.seg_bits();
        return Err(Error::cap(
            format!("joint signal enumeration L + n*seg_bits (n <= {max_n} fits)"),
            bits,
            MAX_JOINT_BITS as u64,
        ));
    }
    Ok(())
}

/// `I(S^n; Y^n)` in bits.
///
/// `S^n` is a function of `(X^n, K)` and determines `Y^n`'s law, so the
/// per-trial sample `log2 p(y | s) - log2 p(y)` equals the one for
/// `I(X^n K; Y^n)`; `p(y)` is the exact mixture over keys with the plaintext
/// summed out per symbol.
pub fn sequence_info(params: &SystemParams, source: &PlaintextSource, n: usize, mc: &MonteCarlo) -> Result<Estimate> {
    check_joint_budget(params, n)?;
    Ok(sweep::single(&alpha_eta(params, source), n, mc)?.information)
}

/// `I(S^n; Y^n)` at several lengths from shared trials.
pub fn sequence_info_sweep(
    params: &SystemParams,
    source: &PlaintextSource,
    ns: &[usize],
    mc: &MonteCarlo,
) -> Result<Vec<(usize, Estimate)>> {
    if let Some(&n) = ns.iter().max() {
        check_joint_budget(params, n)?;
    }
    Ok(sweep(&alpha_eta(params, source), ns, mc)?
        .into_iter()
        .map(|p| (p.n, p.information))
        .collect())
}

/// Exact law of the signal sequence `S^n` as `(signal indices, probability)`
/// pairs with nonzero probability, by enumeration over keys and plaintexts.
pub fn signal_law(params: &SystemParams, source: &PlaintextSource, n: usize) -> Result<Vec<(Vec<u32>, f64)>> {
    check_joint_budget(params, n)?;
    source.check_len(n)?;
    let cipher = Cipher::AlphaEta(params.clone());
    let keys = KeySpace::build(&cipher, n)?;
    let key_p = 1.0 / keys.key_count() as f64;
    let mut law = std::collections::BTreeMap::<Vec<u32>, f64>::new();
    for k in 0..keys.key_count() {
        for xs in 0u64..(1 << n) {
            let mut p = key_p;
            let mut s = Vec::with_capacity(n);
            for i in 0..n {
                let x = ((xs >> i) & 1) as u8;
                let q = source.prob_one(i);
                p *= if x == 1 { q } else { 1.0 - q };
                s.push(signal_point(x, keys.segment(k, i) as u32, params.m));
            }
            if p > 0.0 {
                *law.entry(s).or_default() += p;
            }
        }
    }
    Ok(law.into_iter().collect())
}

/// Both sides of `H(K | Y^n) = H(X^n) + H(K) - I(X^n K; Y^n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub lhs: Estimate,
    pub rhs: Estimate,
    pub gap: f64,
}

/// Estimates the two sides from independent trial sets.
pub fn equivocation_identity_check(scenario: &Scenario, n: usize, mc: &MonteCarlo) -> Result<IdentityCheck> {
    let lhs = key_equivocation(scenario, n, mc)?;
    let info = sweep::single(scenario, n, &mc.reseeded(1))?.information;
    let constant = scenario.source.block_entropy(n) + scenario.cipher.key_entropy();
    let rhs = Estimate {
        value: constant - info.value,
        ..info
    };
    Ok(IdentityCheck {
        lhs,
        rhs,
        gap: lhs.value - rhs.value,
    })
}
