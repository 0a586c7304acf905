//! Exact average spurious-key count by pairwise key enumeration.
//!
//! Given the true key `k` and plaintext, the noise draws are independent
//! across symbols, so another key `k'` stays in the support with probability
//! `prod_i q_i(k_i, k'_i)`, where `q_i` is the chance that `y_i` lands where
//! `k'` can explain it. Summing over ordered pairs gives `E[N_k]` without
//! sampling, which resolves values far below `1 / trials`.

use statrs::function::erf::erf;

use super::keyspace::{Cipher, KeySpace};
use crate::channel::{signal_point, NoiseKind, NoiseModel, PlaintextSource};
use crate::error::{Error, Result};

/// Largest `keys^2 x symbols` evaluated.
pub const MAX_PAIR_WORK: u64 = 1 << 34;

/// Per-symbol survival probabilities, `table[k * bases + k']`.
fn survival_table(cipher: &Cipher, noise: Option<&NoiseModel>, x: Option<u8>) -> Vec<f64> {
    let bases = cipher.bases();
    let mut table = vec![1.0; bases * bases];
    // With both plaintext bits possible, every outcome is explained by every
    // basis (the two antipodal arcs cover the circle up to two points).
    let Some(x) = x else { return table };
    match cipher {
        Cipher::Asc(_) => {
            for k in 0..bases {
                for k2 in 0..bases {
                    table[k * bases + k2] = (k == k2) as u8 as f64;
                }
            }
        }
        Cipher::AlphaEta(p) => {
            let noise = noise.expect("alpha-eta carries a noise model");
            if noise.kind() == NoiseKind::FullGaussian {
                return table;
            }
            let h = noise.half_width();
            let scale = noise.sigma() * std::f64::consts::SQRT_2;
            let mass = |a: f64, b: f64| (erf(b / scale) - erf(a / scale)) / (2.0 * erf(h / scale));
            let m = p.m as f64;
            for k in 0..bases {
                let s = signal_point(x, k as u32, p.m) as f64;
                for k2 in 0..bases {
                    let s2 = signal_point(x, k2 as u32, p.m) as f64;
                    let mut d = (s2 - s).rem_euclid(m);
                    if d >= m / 2.0 {
                        d -= m;
                    }
                    // r in (-h, h) and |r - d| < h; no wrap since |d| <= 2h.
                    let (a, b) = ((d - h).max(-h), (d + h).min(h));
                    table[k * bases + k2] = if b > a { mass(a, b) } else { 0.0 };
                }
            }
        }
    }
    table
}

/// The plaintext bit of symbol `i` when the source fixes it.
fn fixed_bit(source: &PlaintextSource, i: usize) -> Option<u8> {
    let q = source.prob_one(i);
    if q == 0.0 {
        Some(0)
    } else if q == 1.0 {
        Some(1)
    } else {
        None
    }
}

/// Exact `E[N_k]` at each length in `ns`.
pub fn expected_spurious(cipher: &Cipher, source: &PlaintextSource, ns: &[usize]) -> Result<Vec<(usize, f64)>> {
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let Some(&n_max) = ns.last() else {
        return Err(Error::invalid("empty length sweep"));
    };
    source.check_len(n_max)?;
    let keys_n = cipher.key_count();
    let work = keys_n.saturating_mul(keys_n).saturating_mul(n_max.max(1) as u64);
    if work > MAX_PAIR_WORK {
        return Err(Error::cap(
            "pairwise spurious-key enumeration (keys^2 x symbols)",
            work,
            MAX_PAIR_WORK,
        ));
    }
    let keys = KeySpace::build(cipher, n_max)?;
    let noise = cipher.noise();
    let bases = cipher.bases();
    let tables: Vec<Vec<f64>> = (0..n_max)
        .map(|i| survival_table(cipher, noise.as_ref(), fixed_bit(source, i)))
        .collect();

    let count = keys.key_count();
    let mut sums = vec![0.0; ns.len()];
    let mut prod = vec![0.0; count];
    for k in 0..count {
        prod.iter_mut().for_each(|p| *p = 1.0);
        prod[k] = 0.0;
        let mut c = 0;
        for i in 0..=n_max {
            while c < ns.len() && ns[c] == i {
                sums[c] += prod.iter().sum::<f64>();
                c += 1;
            }
            let Some(table) = tables.get(i) else { break };
            let col = keys.column(i);
            let row = &table[col[k] as usize * bases..][..bases];
            for (p, &seg) in prod.iter_mut().zip(col) {
                *p *= row[seg as usize];
            }
        }
    }
    Ok(ns.into_iter().zip(sums).map(|(n, s)| (n, s / count as f64)).collect())
}
