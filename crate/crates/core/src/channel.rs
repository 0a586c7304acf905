//! Signal mapping, heterodyne channel and the reference additive cipher.
//!
//! The coherent-state circle is parameterized in signal-index units: the
//! `M` signal points sit at `0, 1, .., M-1` and an outcome is a real in
//! `[0, M)`. Noise strength is quoted as `sigma = M / (2 sqrt(N))` for mean
//! photon number `N`; that figure is the phase standard deviation in radians
//! multiplied by `M`, so one index unit equals `2 pi` of it. [`NoiseModel`]
//! always carries the index-unit standard deviation.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::keystream::{running_key, segment_bits, LfsrSpec};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// Gaussian phase noise wrapped onto the circle.
    FullGaussian,
    /// Gaussian conditioned on lying strictly within 90 degrees of the signal.
    Truncated,
}

/// Phase-noise law of one heterodyne outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    kind: NoiseKind,
    sigma: f64,
    m: u32,
    log_norm: f64,
    wraps: i64,
}

impl NoiseModel {
    /// `sigma` is in signal-index units.
    pub fn new(kind: NoiseKind, sigma: f64, m: u32) -> Result<Self> {
        segment_bits(m)?;
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::invalid(format!(
                "noise standard deviation must be positive, got {sigma}"
            )));
        }
        let half_width = m as f64 / 4.0;
        let log_norm = match kind {
            NoiseKind::FullGaussian => -sigma.ln() - LN_SQRT_2PI,
            NoiseKind::Truncated => -sigma.ln() - LN_SQRT_2PI - erf(half_width / (sigma * SQRT_2)).ln(),
        };
        let wraps = (6.0 * sigma / m as f64).ceil() as i64 + 1;
        Ok(NoiseModel {
            kind,
            sigma,
            m,
            log_norm,
            wraps,
        })
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    /// Standard deviation in signal-index units.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Half-width of the truncated support, `M/4` (90 degrees).
    pub fn half_width(&self) -> f64 {
        self.m as f64 / 4.0
    }

    /// Log density of the noise value `r` (any real; reduced mod `M`).
    pub fn log_density(&self, r: f64) -> f64 {
        let m = self.m as f64;
        let d = centered(r, m);
        match self.kind {
            NoiseKind::Truncated => {
                if d.abs() < self.half_width() {
                    self.log_norm - d * d / (2.0 * self.sigma * self.sigma)
                } else {
                    f64::NEG_INFINITY
                }
            }
            NoiseKind::FullGaussian => {
                // The j = 0 term dominates once d is centred, so factor it out.
                let two_var = 2.0 * self.sigma * self.sigma;
                let lead = d * d / two_var;
                let mut rest = 0.0;
                for j in 1..=self.wraps {
                    let jm = j as f64 * m;
                    rest += (-((d + jm).powi(2) / two_var - lead)).exp();
                    rest += (-((d - jm).powi(2) / two_var - lead)).exp();
                }
                self.log_norm - lead + rest.ln_1p()
            }
        }
    }

    /// Draws one noise value.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            NoiseKind::FullGaussian => {
                let z: f64 = rng.sample(StandardNormal);
                self.sigma * z
            }
            NoiseKind::Truncated => {
                let a = self.half_width();
                if a >= self.sigma {
                    loop {
                        let z: f64 = rng.sample(StandardNormal);
                        let r = self.sigma * z;
                        if r.abs() < a {
                            return r;
                        }
                    }
                }
                let std = Normal::standard();
                let hi = std.cdf(a / self.sigma);
                let lo = 1.0 - hi;
                loop {
                    let u: f64 = rng.random_range(lo..hi);
                    let r = self.sigma * std.inverse_cdf(u);
                    if r.abs() < a {
                        return r;
                    }
                }
            }
        }
    }
}

/// Representative of `x mod m` in `[-m/2, m/2)`.
#[inline]
fn centered(x: f64, m: f64) -> f64 {
    let r = x.rem_euclid(m);
    if r >= m / 2.0 {
        r - m
    } else {
        r
    }
}

/// Shortest arc length between two circle positions, in `[0, M/2]`.
pub fn circular_distance(a: f64, b: f64, m: u32) -> f64 {
    centered(a - b, m as f64).abs()
}

/// Cipher and channel configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub lfsr: LfsrSpec,
    pub m: u32,
    pub photon_n: f64,
    pub noise_kind: NoiseKind,
}

impl SystemParams {
    pub fn new(lfsr: LfsrSpec, m: u32, photon_n: f64, noise_kind: NoiseKind) -> Result<Self> {
        segment_bits(m)?;
        if !(photon_n.is_finite() && photon_n > 0.0) {
            return Err(Error::invalid(format!(
                "mean photon number must be positive, got {photon_n}"
            )));
        }
        Ok(SystemParams {
            lfsr,
            m,
            photon_n,
            noise_kind,
        })
    }

    /// Parameters whose `sigma = M / (2 sqrt(N))` equals the given value.
    pub fn with_sigma(lfsr: LfsrSpec, m: u32, sigma: f64, noise_kind: NoiseKind) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
        }
        let root_n = m as f64 / (2.0 * sigma);
        SystemParams::new(lfsr, m, root_n * root_n, noise_kind)
    }

    /// `M / (2 sqrt(N))`.
    pub fn sigma(&self) -> f64 {
        self.m as f64 / (2.0 * self.photon_n.sqrt())
    }

    /// Noise standard deviation in signal-index units, `sigma / (2 pi)`.
    pub fn sigma_index(&self) -> f64 {
        self.sigma() / (2.0 * PI)
    }

    pub fn seg_bits(&self) -> u32 {
        segment_bits(self.m).expect("validated on construction")
    }

    pub fn noise(&self) -> NoiseModel {
        NoiseModel::new(self.noise_kind, self.sigma_index(), self.m).expect("validated on construction")
    }
}

/// Circle-valued heterodyne outcomes in `[0, M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CiphertextSeq {
    values: Vec<f64>,
    m: u32,
}

impl CiphertextSeq {
    pub fn new(values: Vec<f64>, m: u32) -> Result<Self> {
        segment_bits(m)?;
        if let Some(v) = values.iter().find(|v| !(0.0..m as f64).contains(*v)) {
            return Err(Error::invalid(format!("outcome {v} outside [0, {m})")));
        }
        Ok(CiphertextSeq { values, m })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Unchecked signal map; see [`encrypt_symbol`].
#[inline]
pub(crate) fn signal_point(x: u8, kseg: u32, m: u32) -> u32 {
    let v = (x as u32 ^ (kseg & 1)) & 1;
    (kseg + (m / 2) * v) % m
}

/// Signal index for data bit `x` under basis `kseg`.
///
/// The transmitted polarity is `x XOR (kseg mod 2)`, so neighbouring bases
/// disagree on which half of the antipodal pair carries a zero.
pub fn encrypt_symbol(x: u8, kseg: u32, m: u32) -> Result<u32> {
    segment_bits(m)?;
    if x > 1 {
        return Err(Error::invalid(format!("plaintext symbol must be a bit, got {x}")));
    }
    if kseg >= m / 2 {
        return Err(Error::invalid(format!("basis index {kseg} outside [0, {})", m / 2)));
    }
    Ok(signal_point(x, kseg, m))
}

/// One heterodyne outcome for signal `s`.
pub fn heterodyne_sample<R: Rng + ?Sized>(s: u32, noise: &NoiseModel, rng: &mut R) -> f64 {
    let m = noise.m() as f64;
    let y = (s as f64 + noise.sample(rng)).rem_euclid(m);
    // rem_euclid can round up to m for tiny negative arguments.
    if y >= m {
        0.0
    } else {
        y
    }
}

/// Density of outcome `y` given signal `s`.
pub fn likelihood(y: f64, s: u32, noise: &NoiseModel) -> f64 {
    log_likelihood(y, s, noise).exp()
}

pub fn log_likelihood(y: f64, s: u32, noise: &NoiseModel) -> f64 {
    noise.log_density(y - s as f64)
}

/// Bit whose signal point under `kseg` is circularly nearer to `y`.
/// An exact tie goes to the bit with the smaller signal index.
pub fn decrypt_symbol(y: f64, kseg: u32, m: u32) -> u8 {
    let s0 = signal_point(0, kseg, m);
    let s1 = signal_point(1, kseg, m);
    let d0 = circular_distance(y, s0 as f64, m);
    let d1 = circular_distance(y, s1 as f64, m);
    if d0 < d1 || (d0 == d1 && s0 < s1) {
        0
    } else {
        1
    }
}

/// Encrypts `x_bits` under `seed` and passes the signals through the channel.
/// Returns the latent signal indices alongside the outcomes.
pub fn encrypt_seq<R: Rng + ?Sized>(
    params: &SystemParams,
    seed: u64,
    x_bits: &[u8],
    rng: &mut R,
) -> Result<(Vec<u32>, CiphertextSeq)> {
    let rk = running_key(&params.lfsr, seed, params.m, x_bits.len())?;
    let noise = params.noise();
    let mut signals = Vec::with_capacity(x_bits.len());
    for (&x, &k) in x_bits.iter().zip(&rk.segments) {
        signals.push(encrypt_symbol(x, k as u32, params.m)?);
    }
    let values = signals.iter().map(|&s| heterodyne_sample(s, &noise, rng)).collect();
    Ok((signals, CiphertextSeq::new(values, params.m)?))
}

/// Decrypts a whole sequence with Bob's knowledge of the seed.
pub fn decrypt_seq(params: &SystemParams, seed: u64, y: &CiphertextSeq) -> Result<Vec<u8>> {
    let rk = running_key(&params.lfsr, seed, params.m, y.len())?;
    Ok(y.values()
        .iter()
        .zip(&rk.segments)
        .map(|(&v, &k)| decrypt_symbol(v, k as u32, params.m))
        .collect())
}

/// Additive stream cipher `y_i = x_i XOR k_i`.
pub fn asc_encrypt(keystream: &[u8], x_bits: &[u8]) -> Result<Vec<u8>> {
    if keystream.len() != x_bits.len() {
        return Err(Error::LengthMismatch {
            expected: x_bits.len(),
            actual: keystream.len(),
        });
    }
    Ok(keystream.iter().zip(x_bits).map(|(k, x)| (k ^ x) & 1).collect())
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

/// Distribution of the plaintext bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlaintextSource {
    /// Fixed bits known to the attacker.
    Known { bits: Vec<u8> },
    /// Independent fair bits.
    Uniform,
    /// Independent bits equal to 1 with probability `p`.
    Bernoulli { p: f64 },
}

impl PlaintextSource {
    pub fn known(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::invalid("known plaintext must consist of bits"));
        }
        Ok(PlaintextSource::Known { bits })
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("Bernoulli parameter {p} outside [0, 1]")));
        }
        Ok(PlaintextSource::Bernoulli { p })
    }

    /// Entropy per symbol in bits.
    pub fn entropy_rate(&self) -> f64 {
        match self {
            PlaintextSource::Known { .. } => 0.0,
            PlaintextSource::Uniform => 1.0,
            PlaintextSource::Bernoulli { p } => binary_entropy(*p),
        }
    }

    /// `H(X^n)` in bits.
    pub fn block_entropy(&self, n: usize) -> f64 {
        n as f64 * self.entropy_rate()
    }

    /// Redundancy `D = log2|X| - H(X^n)/n` for the binary alphabet.
    pub fn redundancy(&self) -> f64 {
        1.0 - self.entropy_rate()
    }

    pub fn is_known(&self) -> bool {
        matches!(self, PlaintextSource::Known { .. })
    }

    /// Fails if a known source holds fewer than `n` bits.
    pub fn check_len(&self, n: usize) -> Result<()> {
        match self {
            PlaintextSource::Known { bits } if bits.len() < n => Err(Error::LengthMismatch {
                expected: n,
                actual: bits.len(),
            }),
            _ => Ok(()),
        }
    }

    /// Probability that symbol `i` equals 1.
    #[inline]
    pub(crate) fn prob_one(&self, i: usize) -> f64 {
        match self {
            PlaintextSource::Known { bits } => bits[i] as f64,
            PlaintextSource::Uniform => 0.5,
            PlaintextSource::Bernoulli { p } => *p,
        }
    }

    #[inline]
    pub(crate) fn sample_symbol<R: Rng + ?Sized>(&self, i: usize, rng: &mut R) -> u8 {
        match self {
            PlaintextSource::Known { bits } => bits[i],
            PlaintextSource::Uniform => rng.random::<bool>() as u8,
            PlaintextSource::Bernoulli { p } => rng.random_bool(*p) as u8,
        }
    }
}

pub fn sample_plaintext<R: Rng + ?Sized>(source: &PlaintextSource, n: usize, rng: &mut R) -> Result<Vec<u8>> {
    source.check_len(n)?;
    Ok((0..n).map(|i| source.sample_symbol(i, rng)).collect())
}

pub fn redundancy(source: &PlaintextSource) -> f64 {
    source.redundancy()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    #[test]
    fn signal_map_examples() {
        assert_eq!(encrypt_symbol(0, 0, 8).unwrap(), 0);
        assert_eq!(encrypt_symbol(1, 0, 8).unwrap(), 4);
        assert_eq!(encrypt_symbol(0, 1, 8).unwrap(), 5);
        assert_eq!(encrypt_symbol(1, 1, 8).unwrap(), 1);
        assert!(encrypt_symbol(0, 4, 8).is_err());
        assert!(encrypt_symbol(2, 0, 8).is_err());
    }

    #[test]
    fn antipodal_pairs() {
        for m in [4u32, 8, 16, 64] {
            for k in 0..m / 2 {
                let s0 = encrypt_symbol(0, k, m).unwrap() as f64;
                let s1 = encrypt_symbol(1, k, m).unwrap() as f64;
                assert_eq!(circular_distance(s0, s1, m), m as f64 / 2.0);
            }
        }
    }

    #[test]
    fn noiseless_round_trip() {
        for k in 0..4 {
            for x in 0..2 {
                let s = encrypt_symbol(x, k, 8).unwrap();
                assert_eq!(decrypt_symbol(s as f64, k, 8), x);
            }
        }
    }

    #[test]
    fn decrypt_tie_goes_to_smaller_signal() {
        // kseg = 1 at M = 8: x=1 -> 1, x=0 -> 5; y = 3 is M/4 from both.
        assert_eq!(decrypt_symbol(3.0, 1, 8), 1);
        assert_eq!(decrypt_symbol(7.0, 1, 8), 1);
        // kseg = 0: x=0 -> 0, x=1 -> 4.
        assert_eq!(decrypt_symbol(2.0, 0, 8), 0);
    }

    #[test]
    fn vanishing_noise_returns_the_signal() {
        let noise = NoiseModel::new(NoiseKind::FullGaussian, 1e-12, 8).unwrap();
        let mut rng = rng();
        for s in 0..8 {
            let y = heterodyne_sample(s, &noise, &mut rng);
            assert!(circular_distance(y, s as f64, 8) < 1e-9);
        }
    }

    #[test]
    fn truncated_samples_stay_inside_support() {
        let mut rng = rng();
        for sigma in [0.3, 2.0, 50.0] {
            let noise = NoiseModel::new(NoiseKind::Truncated, sigma, 8).unwrap();
            for i in 0..20_000 {
                let s = (i % 8) as u32;
                let y = heterodyne_sample(s, &noise, &mut rng);
                assert!((0.0..8.0).contains(&y));
                assert!(circular_distance(y, s as f64, 8) < 2.0);
            }
        }
    }

    #[test]
    fn truncated_likelihood_vanishes_outside_support() {
        let noise = NoiseModel::new(NoiseKind::Truncated, 1.0, 16).unwrap();
        let m = 16;
        assert_eq!(likelihood((3.0 + m as f64 / 3.0) % 16.0, 3, &noise), 0.0);
        assert_eq!(likelihood(7.0, 3, &noise), 0.0);
        assert!(likelihood(6.999, 3, &noise) > 0.0);
    }

    /// Composite Simpson rule; `n` must be even.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for i in 1..n {
            acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * h / 3.0
    }

    #[test]
    fn likelihoods_integrate_to_one() {
        for (m, sigma) in [(8u32, 0.3), (8, 1.5), (16, 6.0), (4, 3.0)] {
            let g = NoiseModel::new(NoiseKind::FullGaussian, sigma, m).unwrap();
            let total = simpson(|y| likelihood(y, 1, &g), 0.0, m as f64, 20_000);
            assert!((total - 1.0).abs() < 1e-9, "full m={m} sigma={sigma}: {total}");

            let t = NoiseModel::new(NoiseKind::Truncated, sigma, m).unwrap();
            let a = m as f64 / 4.0;
            // Integrate across the support with the jumps at the interval ends.
            let total = simpson(
                |y| likelihood(y.rem_euclid(m as f64), 1, &t),
                1.0 - a + 1e-12,
                1.0 + a - 1e-12,
                20_000,
            );
            assert!((total - 1.0).abs() < 1e-9, "truncated m={m} sigma={sigma}: {total}");
        }
    }

    #[test]
    fn full_gaussian_peaks_at_the_signal() {
        let m = 8;
        for sigma in [0.5, 1.0, 2.5] {
            let g = NoiseModel::new(NoiseKind::FullGaussian, sigma, m).unwrap();
            let at_s = likelihood(3.0, 3, &g);
            for i in 0..8000 {
                let y = i as f64 * 1e-3;
                assert!(likelihood(y, 3, &g) <= at_s + 1e-15);
            }
        }
    }

    #[test]
    fn full_gaussian_samples_match_wrapped_cdf() {
        let m = 8u32;
        let sigma = 4.0;
        let s = 3u32;
        let noise = NoiseModel::new(NoiseKind::FullGaussian, sigma, m).unwrap();
        let mut rng = rng();
        let mut ys: Vec<f64> = (0..1_000_000).map(|_| heterodyne_sample(s, &noise, &mut rng)).collect();
        ys.sort_by(f64::total_cmp);
        // Oracle: CDF of the wrapped Gaussian on [0, M).
        let std = Normal::new(0.0, sigma).unwrap();
        let cdf = |y: f64| -> f64 {
            (-40..=40)
                .map(|j| {
                    let shift = s as f64 - j as f64 * m as f64;
                    std.cdf(y - shift) - std.cdf(-shift)
                })
                .sum()
        };
        let n = ys.len() as f64;
        let ks = ys
            .iter()
            .enumerate()
            .step_by(97)
            .map(|(i, &y)| {
                let f = cdf(y);
                (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.002, "KS statistic {ks}");
    }

    #[test]
    fn bob_never_errs_under_truncated_noise() {
        let lfsr = LfsrSpec::primitive(6).unwrap();
        let params = SystemParams::with_sigma(lfsr.clone(), 8, 4.0, NoiseKind::Truncated).unwrap();
        let mut rng = rng();
        for seed in 1..=lfsr.key_count() {
            for pattern in 0..256u32 {
                let x: Vec<u8> = (0..8).map(|i| ((pattern >> i) & 1) as u8).collect();
                let (_, y) = encrypt_seq(&params, seed, &x, &mut rng).unwrap();
                assert_eq!(decrypt_seq(&params, seed, &y).unwrap(), x);
            }
        }
    }

    #[test]
    fn every_basis_admits_some_bit_under_truncated_noise() {
        for m in [4u32, 8, 16] {
            let noise = NoiseModel::new(NoiseKind::Truncated, 0.7, m).unwrap();
            for i in 0..(m * 1000) {
                let y = i as f64 / 1000.0 + 1.3e-4;
                for k in 0..m / 2 {
                    let ok = (0..2).any(|x| likelihood(y, signal_point(x, k, m), &noise) > 0.0);
                    assert!(ok, "m={m} y={y} k={k}");
                }
            }
        }
    }

    #[test]
    fn encrypt_seq_composes_symbol_map() {
        let lfsr = LfsrSpec::new(4, [4, 1]).unwrap();
        let params = SystemParams::with_sigma(lfsr.clone(), 8, 1.0, NoiseKind::FullGaussian).unwrap();
        let x = [1u8, 0, 1];
        let (signals, y) = encrypt_seq(&params, 0b1011, &x, &mut rng()).unwrap();
        let rk = running_key(&lfsr, 0b1011, 8, 3).unwrap();
        let expected: Vec<u32> = (0..3)
            .map(|i| encrypt_symbol(x[i], rk.segments[i] as u32, 8).unwrap())
            .collect();
        assert_eq!(signals, expected);
        assert_eq!(y.len(), 3);
    }

    #[test]
    fn asc_examples() {
        let k = [1u8, 0, 1, 1, 0];
        assert_eq!(asc_encrypt(&k, &[0; 5]).unwrap(), k.to_vec());
        let x = [0u8, 1, 1, 0, 1];
        let y = asc_encrypt(&k, &x).unwrap();
        assert_eq!(asc_encrypt(&k, &y).unwrap(), x.to_vec());
        assert!(asc_encrypt(&k, &x[..4]).is_err());
    }

    #[test]
    fn source_redundancy() {
        assert_eq!(PlaintextSource::Uniform.redundancy(), 0.0);
        assert_eq!(PlaintextSource::known(vec![1, 0]).unwrap().redundancy(), 1.0);
        let b = PlaintextSource::bernoulli(0.11).unwrap();
        // h2(0.11) evaluated independently.
        let h = -(0.11f64 * 0.11f64.ln() + 0.89f64 * 0.89f64.ln()) / 2f64.ln();
        assert_abs_diff_eq!(b.redundancy(), 1.0 - h, epsilon = 1e-15);
        assert_abs_diff_eq!(b.redundancy(), 0.5, epsilon = 0.001);
        assert!(PlaintextSource::bernoulli(1.5).is_err());
    }

    #[test]
    fn known_source_needs_enough_bits() {
        let src = PlaintextSource::known(vec![1, 0, 1]).unwrap();
        assert!(sample_plaintext(&src, 4, &mut rng()).is_err());
        assert_eq!(sample_plaintext(&src, 2, &mut rng()).unwrap(), vec![1, 0]);
        let u = sample_plaintext(&PlaintextSource::Uniform, 10_000, &mut rng()).unwrap();
        let ones = u.iter().filter(|&&b| b == 1).count();
        assert!((4800..5200).contains(&ones));
    }

    #[test]
    fn sigma_conventions() {
        let lfsr = LfsrSpec::primitive(8).unwrap();
        let p = SystemParams::with_sigma(lfsr.clone(), 8, 2.0, NoiseKind::Truncated).unwrap();
        assert_abs_diff_eq!(p.photon_n, 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.sigma_index(), 1.0 / PI, epsilon = 1e-12);
        let p = SystemParams::new(lfsr, 1024, 64.0, NoiseKind::FullGaussian).unwrap();
        assert_abs_diff_eq!(p.sigma(), 64.0, epsilon = 1e-12);
    }
}
