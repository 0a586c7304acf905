use serde::{Deserialize, Serialize};

use crate::channel::{signal_point, CiphertextSeq, NoiseModel, PlaintextSource, SystemParams};
use crate::error::{Error, Result};
use crate::keystream::{chunk_segments, LfsrSpec};

/// Largest `keys x symbols` running-key table built in memory.
pub const MAX_TABLE_ENTRIES: u64 = 1 << 27;

/// Cipher under attack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "cipher", rename_all = "snake_case")]
pub enum Cipher {
    /// The quantum-noise cipher observed through heterodyne measurement.
    AlphaEta(SystemParams),
    /// Additive stream cipher `y = x XOR k` on raw keystream bits.
    Asc(LfsrSpec),
}

impl Cipher {
    pub fn lfsr(&self) -> &LfsrSpec {
        match self {
            Cipher::AlphaEta(p) => &p.lfsr,
            Cipher::Asc(l) => l,
        }
    }

    /// Running-key bits consumed per symbol.
    pub fn seg_bits(&self) -> u32 {
        match self {
            Cipher::AlphaEta(p) => p.seg_bits(),
            Cipher::Asc(_) => 1,
        }
    }

    /// Number of distinct running-key segment values.
    pub fn bases(&self) -> usize {
        1 << self.seg_bits()
    }

    pub fn key_count(&self) -> u64 {
        self.lfsr().key_count()
    }

    /// `H(K) = log2(2^L - 1)`; the all-zero seed is excluded.
    pub fn key_entropy(&self) -> f64 {
        (self.key_count() as f64).log2()
    }

    pub(crate) fn noise(&self) -> Option<NoiseModel> {
        match self {
            Cipher::AlphaEta(p) => Some(p.noise()),
            Cipher::Asc(_) => None,
        }
    }
}

/// Observed ciphertext of either cipher.
#[derive(Debug, Clone, PartialEq)]
pub enum Ciphertext {
    Phases(CiphertextSeq),
    Bits(Vec<u8>),
}

impl Ciphertext {
    pub fn len(&self) -> usize {
        match self {
            Ciphertext::Phases(c) => c.len(),
            Ciphertext::Bits(b) => b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Attack context recorded alongside a posterior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    CiphertextOnly,
    KnownPlaintext,
    Statistical,
}

impl AttackKind {
    pub fn of(source: &PlaintextSource) -> Self {
        match source {
            PlaintextSource::Known { .. } => AttackKind::KnownPlaintext,
            PlaintextSource::Uniform => AttackKind::CiphertextOnly,
            PlaintextSource::Bernoulli { .. } => AttackKind::Statistical,
        }
    }
}

/// Running-key segments of every admissible seed, stored per symbol so that
/// a symbol's column is contiguous over keys. Key index `j` is seed `j + 1`.
#[derive(Debug, Clone)]
pub struct KeySpace {
    key_count: usize,
    columns: Vec<Vec<u16>>,
}

impl KeySpace {
    pub fn build(cipher: &Cipher, symbols: usize) -> Result<Self> {
        let lfsr = cipher.lfsr();
        let key_count = lfsr.key_count();
        let entries = key_count.saturating_mul(symbols.max(1) as u64);
        if entries > MAX_TABLE_ENTRIES {
            return Err(Error::cap(
                "running-key table (keys x symbols)",
                entries,
                MAX_TABLE_ENTRIES,
            ));
        }
        let seg_bits = cipher.seg_bits();
        let mut columns = vec![Vec::with_capacity(key_count as usize); symbols];
        for seed in 1..=key_count {
            let segs = chunk_segments(lfsr.start(seed)?, seg_bits, symbols);
            for (col, s) in columns.iter_mut().zip(segs) {
                col.push(s);
            }
        }
        Ok(KeySpace {
            key_count: key_count as usize,
            columns,
        })
    }

    pub fn key_count(&self) -> usize {
        self.key_count
    }

    pub fn symbols(&self) -> usize {
        self.columns.len()
    }

    #[inline]
    pub fn segment(&self, key_index: usize, symbol: usize) -> u16 {
        self.columns[symbol][key_index]
    }

    #[inline]
    pub(crate) fn column(&self, symbol: usize) -> &[u16] {
        &self.columns[symbol]
    }
}

#[inline]
pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let hi = a.max(b);
    hi + (-(a - b).abs()).exp().ln_1p()
}

/// Prior-weighted log-likelihood of one symbol, `ln sum_x Pr[x] p(y | x, k)`,
/// for every segment value `k`.
#[derive(Debug, Clone)]
pub(crate) struct SymbolFactors {
    /// Per-signal-point log-likelihoods (alpha-eta only).
    point_ll: Vec<f64>,
}

impl SymbolFactors {
    pub(crate) fn new() -> Self {
        SymbolFactors { point_ll: Vec::new() }
    }

    /// Fills `out[k]` for `k` in `0..bases`.
    pub(crate) fn fill(
        &mut self,
        cipher: &Cipher,
        noise: Option<&NoiseModel>,
        observed: Observed,
        prob_one: f64,
        out: &mut [f64],
    ) {
        let (w0, w1) = ((1.0 - prob_one).ln(), prob_one.ln());
        let mix = |ll0: f64, ll1: f64| {
            if prob_one == 0.0 {
                ll0
            } else if prob_one == 1.0 {
                ll1
            } else {
                log_add_exp(w0 + ll0, w1 + ll1)
            }
        };
        match (cipher, observed) {
            (Cipher::AlphaEta(p), Observed::Phase(y)) => {
                let noise = noise.expect("alpha-eta carries a noise model");
                let m = p.m;
                self.point_ll.clear();
                self.point_ll.extend((0..m).map(|s| noise.log_density(y - s as f64)));
                for (k, o) in out.iter_mut().enumerate() {
                    let k = k as u32;
                    *o = mix(
                        self.point_ll[signal_point(0, k, m) as usize],
                        self.point_ll[signal_point(1, k, m) as usize],
                    );
                }
            }
            (Cipher::Asc(_), Observed::Bit(y)) => {
                for (k, o) in out.iter_mut().enumerate() {
                    let ll = |x: u8| {
                        if x ^ k as u8 == y {
                            0.0
                        } else {
                            f64::NEG_INFINITY
                        }
                    };
                    *o = mix(ll(0), ll(1));
                }
            }
            _ => unreachable!("ciphertext kind checked against the cipher"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Observed {
    Phase(f64),
    Bit(u8),
}

impl Ciphertext {
    pub(crate) fn observed(&self, i: usize) -> Observed {
        match self {
            Ciphertext::Phases(c) => Observed::Phase(c.values()[i]),
            Ciphertext::Bits(b) => Observed::Bit(b[i]),
        }
    }

    pub(crate) fn matches(&self, cipher: &Cipher) -> Result<()> {
        match (cipher, self) {
            (Cipher::AlphaEta(p), Ciphertext::Phases(c)) if c.m() == p.m => Ok(()),
            (Cipher::Asc(_), Ciphertext::Bits(b)) if b.iter().all(|&v| v <= 1) => Ok(()),
            _ => Err(Error::invalid("ciphertext does not match the cipher")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::NoiseKind;
    use crate::keystream::running_key;

    #[test]
    fn table_matches_running_key() {
        let lfsr = LfsrSpec::primitive(5).unwrap();
        let params = SystemParams::with_sigma(lfsr.clone(), 8, 1.0, NoiseKind::FullGaussian).unwrap();
        let ks = KeySpace::build(&Cipher::AlphaEta(params), 7).unwrap();
        assert_eq!(ks.key_count(), 31);
        for seed in 1..=31u64 {
            let rk = running_key(&lfsr, seed, 8, 7).unwrap();
            for i in 0..7 {
                assert_eq!(ks.segment(seed as usize - 1, i), rk.segments[i]);
            }
        }
    }

    #[test]
    fn oversized_table_is_rejected() {
        let lfsr = LfsrSpec::primitive(24).unwrap();
        assert!(matches!(
            KeySpace::build(&Cipher::Asc(lfsr), 100),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn log_add_exp_handles_infinities() {
        assert_eq!(log_add_exp(f64::NEG_INFINITY, f64::NEG_INFINITY), f64::NEG_INFINITY);
        assert_eq!(log_add_exp(f64::NEG_INFINITY, -2.0), -2.0);
        assert!((log_add_exp(0.0, 0.0) - 2f64.ln()).abs() < 1e-15);
    }
}
