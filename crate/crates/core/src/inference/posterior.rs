use serde::Serialize;

use super::keyspace::{AttackKind, Cipher, Ciphertext, KeySpace, SymbolFactors};
use crate::channel::PlaintextSource;
use crate::error::{Error, Result};

/// Exact posterior over the admissible seeds `1 ..= 2^L - 1`.
#[derive(Debug, Clone, Serialize)]
pub struct KeyPosterior {
    /// `probs[j]` is the posterior of seed `j + 1`.
    pub probs: Vec<f64>,
    pub context: AttackKind,
    /// Whether each key lies in the exact support of the channel law.
    #[serde(skip)]
    in_support: Vec<bool>,
}

impl KeyPosterior {
    /// Normalizes unnormalized log weights. Keys with weight `-inf` are
    /// outside the support.
    pub fn from_log_weights(log_weights: &[f64], context: AttackKind) -> Result<Self> {
        let top = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return Err(Error::EmptySupport);
        }
        let mut probs: Vec<f64> = log_weights.iter().map(|&w| (w - top).exp()).collect();
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(KeyPosterior {
            probs,
            context,
            in_support: log_weights.iter().map(|w| w.is_finite()).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob_of_seed(&self, seed: u64) -> f64 {
        self.probs[seed as usize - 1]
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        -self
            .probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|p| p * p.log2())
            .sum::<f64>()
    }

    /// Seeds of the support set `K_y`.
    pub fn support(&self) -> Vec<u64> {
        self.in_support
            .iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(j, _)| j as u64 + 1)
            .collect()
    }

    /// Most probable seed; ties go to the smallest seed.
    pub fn map_seed(&self) -> u64 {
        let mut best = 0;
        for (j, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = j;
            }
        }
        best as u64 + 1
    }

    pub fn max_prob(&self) -> f64 {
        self.probs.iter().copied().fold(0.0, f64::max)
    }
}

/// Adds one symbol's prior-weighted log-likelihood to every key.
#[inline]
pub(crate) fn accumulate(log_weights: &mut [f64], column: &[u16], factors: &[f64]) {
    for (w, &seg) in log_weights.iter_mut().zip(column) {
        *w += factors[seg as usize];
    }
}

/// Unnormalized log posterior `ln Pr[y | k]` for every key, given a table
/// covering at least `y.len()` symbols.
pub(crate) fn log_likelihoods(
    cipher: &Cipher,
    keys: &KeySpace,
    y: &Ciphertext,
    source: &PlaintextSource,
) -> Result<Vec<f64>> {
    y.matches(cipher)?;
    source.check_len(y.len())?;
    if keys.symbols() < y.len() {
        return Err(Error::LengthMismatch {
            expected: y.len(),
            actual: keys.symbols(),
        });
    }
    let noise = cipher.noise();
    let mut scratch = SymbolFactors::new();
    let mut factors = vec![0.0; cipher.bases()];
    let mut lw = vec![0.0; keys.key_count()];
    for i in 0..y.len() {
        scratch.fill(cipher, noise.as_ref(), y.observed(i), source.prob_one(i), &mut factors);
        accumulate(&mut lw, keys.column(i), &factors);
    }
    Ok(lw)
}

/// `Pr[k | y]` by enumeration of every admissible seed.
///
/// The plaintext is marginalized symbol by symbol, which equals the sum over
/// all plaintext sequences because the source is memoryless.
pub fn key_posterior(cipher: &Cipher, y: &Ciphertext, source: &PlaintextSource) -> Result<KeyPosterior> {
    let keys = KeySpace::build(cipher, y.len())?;
    key_posterior_with(cipher, &keys, y, source)
}

/// [`key_posterior`] with a prebuilt running-key table.
pub fn key_posterior_with(
    cipher: &Cipher,
    keys: &KeySpace,
    y: &Ciphertext,
    source: &PlaintextSource,
) -> Result<KeyPosterior> {
    let lw = log_likelihoods(cipher, keys, y, source)?;
    KeyPosterior::from_log_weights(&lw, AttackKind::of(source))
}

/// Support set `K_y` as seeds.
pub fn support_set(cipher: &Cipher, y: &Ciphertext, source: &PlaintextSource) -> Result<Vec<u64>> {
    Ok(key_posterior(cipher, y, source)?.support())
}

/// Number of spurious keys `N_k(y) = |K_y| - 1`.
pub fn spurious_count(cipher: &Cipher, y: &Ciphertext, source: &PlaintextSource) -> Result<usize> {
    Ok(support_set(cipher, y, source)?.len() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{circular_distance, encrypt_seq, encrypt_symbol, CiphertextSeq, NoiseKind, SystemParams};
    use crate::keystream::{running_key, LfsrSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn l4(kind: NoiseKind, sigma: f64) -> (LfsrSpec, SystemParams) {
        let lfsr = LfsrSpec::new(4, [4, 1]).unwrap();
        let p = SystemParams::with_sigma(lfsr.clone(), 8, sigma, kind).unwrap();
        (lfsr, p)
    }

    #[test]
    fn no_data_gives_uniform_posterior() {
        let (_, p) = l4(NoiseKind::Truncated, 2.0);
        let y = Ciphertext::Phases(CiphertextSeq::new(vec![], 8).unwrap());
        let post = key_posterior(&Cipher::AlphaEta(p), &y, &PlaintextSource::Uniform).unwrap();
        assert_eq!(post.len(), 15);
        assert!(post.probs.iter().all(|&q| (q - 1.0 / 15.0).abs() < 1e-15));
        assert_eq!(post.support().len(), 15);
    }

    #[test]
    fn full_gaussian_posterior_is_strictly_positive() {
        let (_, p) = l4(NoiseKind::FullGaussian, 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = vec![0, 1, 1, 0, 1, 0, 0, 1];
        let (_, y) = encrypt_seq(&p, 7, &x, &mut rng).unwrap();
        let cipher = Cipher::AlphaEta(p);
        let y = Ciphertext::Phases(y);
        let src = PlaintextSource::known(x).unwrap();
        let post = key_posterior(&cipher, &y, &src).unwrap();
        // Exact support is all keys even where the probability underflows.
        assert_eq!(post.support().len(), 15);
        assert_eq!(spurious_count(&cipher, &y, &src).unwrap(), 14);
        let sum: f64 = post.probs.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn truncated_known_plaintext_support_matches_brute_force() {
        let (lfsr, p) = l4(NoiseKind::Truncated, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for trial in 0..50 {
            let seed = 1 + trial % 15;
            let n = 1 + (trial as usize % 4);
            let x: Vec<u8> = (0..n).map(|i| ((trial >> i) & 1) as u8).collect();
            let (_, y) = encrypt_seq(&p, seed, &x, &mut rng).unwrap();
            let expected: Vec<u64> = (1..=15u64)
                .filter(|&k| {
                    let rk = running_key(&lfsr, k, 8, n).unwrap();
                    (0..n).all(|i| {
                        let s = encrypt_symbol(x[i], rk.segments[i] as u32, 8).unwrap();
                        circular_distance(y.values()[i], s as f64, 8) < 2.0
                    })
                })
                .collect();
            let cipher = Cipher::AlphaEta(p.clone());
            let src = PlaintextSource::known(x.clone()).unwrap();
            let got = support_set(&cipher, &Ciphertext::Phases(y), &src).unwrap();
            assert_eq!(got, expected);
            assert!(got.contains(&seed));
        }
    }

    #[test]
    fn inconsistent_known_plaintext_is_an_empty_support() {
        let (_, p) = l4(NoiseKind::Truncated, 1.0);
        let cipher = Cipher::AlphaEta(p);
        // Bit 0 sits at {0, 5, 2, 7} for bases 0..4, so y = 4 forces basis 1 and
        // y = 3 forces basis 2; no L=4 running key follows the forced pattern.
        let y = CiphertextSeq::new(vec![4.0, 1.0, 6.0, 3.0, 4.0, 1.0, 6.0, 3.0], 8).unwrap();
        let src = PlaintextSource::known(vec![0; 8]).unwrap();
        let r = key_posterior(&cipher, &Ciphertext::Phases(y), &src);
        assert!(matches!(r, Err(Error::EmptySupport)));
    }

    #[test]
    fn asc_known_plaintext_pins_the_seed_at_l_symbols() {
        let lfsr = LfsrSpec::primitive(8).unwrap();
        let cipher = Cipher::Asc(lfsr.clone());
        let x: Vec<u8> = (0..8).map(|i| (i % 3 == 0) as u8).collect();
        for seed in [1u64, 77, 255] {
            let ks = crate::keystream::keystream_bits(&lfsr, seed, 8).unwrap();
            let y = crate::channel::asc_encrypt(&ks, &x).unwrap();
            let post = key_posterior(
                &cipher,
                &Ciphertext::Bits(y),
                &PlaintextSource::known(x.clone()).unwrap(),
            )
            .unwrap();
            assert_eq!(post.support(), vec![seed]);
            assert_eq!(post.prob_of_seed(seed), 1.0);
            assert_eq!(post.map_seed(), seed);
        }
    }

    #[test]
    fn map_ties_go_to_smallest_seed() {
        let post =
            KeyPosterior::from_log_weights(&[0.0, 1.0, 1.0, f64::NEG_INFINITY], AttackKind::KnownPlaintext).unwrap();
        assert_eq!(post.map_seed(), 2);
        assert_eq!(post.support(), vec![1, 2, 3]);
    }
}
