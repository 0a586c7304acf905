//! Linear feedback shift register running-key generation.
//!
//! Registers use the Fibonacci configuration: the state shifts left, the
//! output bit is the bit leaving the register (the MSB) and the new LSB is
//! the XOR of the tapped bits. A tap at position `t` reads state bit `t - 1`,
//! so the output sequence obeys `a[j + L] = XOR_t a[j + L - t]`. The seed is
//! loaded verbatim as the initial state, which makes the first `L` output
//! bits equal to the seed read MSB-first.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register length handled by the laboratory.
pub const MAX_REGISTER_LENGTH: u32 = 24;

/// Tap sets of primitive feedback polynomials, indexed by register length.
const PRIMITIVE_TAPS: [&[u32]; 23] = [
    &[2, 1],
    &[3, 2],
    &[4, 3],
    &[5, 3],
    &[6, 5],
    &[7, 6],
    &[8, 6, 5, 4],
    &[9, 5],
    &[10, 7],
    &[11, 9],
    &[12, 6, 4, 1],
    &[13, 4, 3, 1],
    &[14, 5, 3, 1],
    &[15, 14],
    &[16, 15, 13, 4],
    &[17, 14],
    &[18, 11],
    &[19, 6, 2, 1],
    &[20, 17],
    &[21, 19],
    &[22, 21],
    &[23, 18],
    &[24, 23, 22, 17],
];

/// Register length and feedback taps.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LfsrSpec {
    length: u32,
    taps: Vec<u32>,
}

impl LfsrSpec {
    pub fn new(length: u32, taps: impl Into<Vec<u32>>) -> Result<Self> {
        let mut taps = taps.into();
        taps.sort_unstable_by(|a, b| b.cmp(a));
        taps.dedup();
        if length == 0 || length > MAX_REGISTER_LENGTH {
            return Err(Error::cap(
                "register length L",
                length,
                format!("1..={MAX_REGISTER_LENGTH}"),
            ));
        }
        if taps.is_empty() {
            return Err(Error::invalid("tap set must not be empty"));
        }
        if taps[0] != length {
            return Err(Error::invalid(format!(
                "largest tap must equal the register length {length}, got {}",
                taps[0]
            )));
        }
        if taps.contains(&0) {
            return Err(Error::invalid("tap positions start at 1"));
        }
        Ok(LfsrSpec { length, taps })
    }

    /// Maximal-length register from the built-in primitive polynomial table.
    pub fn primitive(length: u32) -> Result<Self> {
        if !(2..=MAX_REGISTER_LENGTH).contains(&length) {
            return Err(Error::cap(
                "register length L with a tabulated primitive polynomial",
                length,
                format!("2..={MAX_REGISTER_LENGTH}"),
            ));
        }
        LfsrSpec::new(length, PRIMITIVE_TAPS[(length - 2) as usize])
    }

    pub fn length(&self) -> u32 {
        self.length
    }

    /// Tap positions, largest first.
    pub fn taps(&self) -> &[u32] {
        &self.taps
    }

    /// Number of admissible (nonzero) seeds, `2^L - 1`.
    pub fn key_count(&self) -> u64 {
        (1u64 << self.length) - 1
    }

    fn feedback_mask(&self) -> u64 {
        self.taps.iter().fold(0, |m, &t| m | 1 << (t - 1))
    }

    fn state_mask(&self) -> u64 {
        (1u64 << self.length) - 1
    }

    pub fn check_seed(&self, seed: u64) -> Result<()> {
        if seed == 0 || seed > self.state_mask() {
            return Err(Error::InvalidSeed {
                seed,
                length: self.length,
            });
        }
        Ok(())
    }

    /// Bit generator started from `seed`.
    pub fn start(&self, seed: u64) -> Result<Lfsr> {
        self.check_seed(seed)?;
        Ok(Lfsr {
            state: seed,
            feedback: self.feedback_mask(),
            mask: self.state_mask(),
            top: self.length - 1,
        })
    }

    /// Cycle structure of the state map.
    ///
    /// A single walk from seed 1 settles the maximal case; otherwise every
    /// cycle of the state map is walked and the period is the LCM of the
    /// cycle lengths.
    pub fn period(&self) -> Period {
        let full = self.key_count();
        let unit = cycle_length(self, 1);
        if unit == full {
            return Period {
                length: full,
                maximal: true,
            };
        }
        let mut seen = vec![false; 1usize << self.length];
        seen[0] = true;
        let mut lcm = 1u64;
        for start in 1..=self.state_mask() {
            if seen[start as usize] {
                continue;
            }
            let mut lfsr = Lfsr {
                state: start,
                feedback: self.feedback_mask(),
                mask: self.state_mask(),
                top: self.length - 1,
            };
            let mut len = 0u64;
            loop {
                seen[lfsr.state as usize] = true;
                lfsr.step();
                len += 1;
                if lfsr.state == start {
                    break;
                }
            }
            lcm = lcm / gcd(lcm, len) * len;
        }
        Period {
            length: lcm,
            maximal: false,
        }
    }
}

fn cycle_length(spec: &LfsrSpec, seed: u64) -> u64 {
    let mut lfsr = spec.start(seed).expect("seed 1 is always admissible");
    let mut len = 0u64;
    loop {
        lfsr.step();
        len += 1;
        if lfsr.state == seed || len > spec.key_count() {
            return len;
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Result of [`LfsrSpec::period`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Period {
    /// Smallest `p` with `state[t + p] = state[t]` for every nonzero seed.
    pub length: u64,
    /// True when the state map is a single cycle of length `2^L - 1`.
    pub maximal: bool,
}

/// Running Fibonacci register.
#[derive(Debug, Clone)]
pub struct Lfsr {
    state: u64,
    feedback: u64,
    mask: u64,
    top: u32,
}

impl Lfsr {
    pub fn state(&self) -> u64 {
        self.state
    }

    /// Emits the bit leaving the register and shifts in the feedback bit.
    #[inline]
    pub fn step(&mut self) -> u8 {
        let out = (self.state >> self.top) & 1;
        let fb = (self.state & self.feedback).count_ones() as u64 & 1;
        self.state = ((self.state << 1) | fb) & self.mask;
        out as u8
    }
}

impl Iterator for Lfsr {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        Some(self.step())
    }
}

/// First `count` output bits of the register seeded with `seed`.
pub fn keystream_bits(spec: &LfsrSpec, seed: u64, count: usize) -> Result<Vec<u8>> {
    Ok(spec.start(seed)?.take(count).collect())
}

/// Bits per running-key segment, `log2(M/2)`, for an `M`-point circle.
pub fn segment_bits(m: u32) -> Result<u32> {
    if m < 4 || !m.is_power_of_two() {
        return Err(Error::invalid(format!(
            "M must be a power of two no smaller than 4, got {m}"
        )));
    }
    Ok(m.trailing_zeros() - 1)
}

/// Running-key segments `K'_1 .. K'_n`, each selecting one of `M/2` bases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunningKeySeq {
    pub segments: Vec<u16>,
    pub seg_bits: u32,
}

impl RunningKeySeq {
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Debug dump of the segments as a hex bit string, MSB-first.
    pub fn to_hex(&self) -> String {
        let bits: Vec<u8> = self
            .segments
            .iter()
            .flat_map(|&s| (0..self.seg_bits).rev().map(move |b| ((s >> b) & 1) as u8))
            .collect();
        bits_to_hex(&bits)
    }
}

/// Consecutive non-overlapping `seg_bits`-bit chunks of `bits`, MSB-first.
pub(crate) fn chunk_segments(bits: impl Iterator<Item = u8>, seg_bits: u32, n: usize) -> Vec<u16> {
    let mut out = Vec::with_capacity(n);
    let mut bits = bits;
    for _ in 0..n {
        let mut seg = 0u16;
        for _ in 0..seg_bits {
            seg = (seg << 1) | bits.next().expect("register output is infinite") as u16;
        }
        out.push(seg);
    }
    out
}

pub fn running_key(spec: &LfsrSpec, seed: u64, m: u32, n_symbols: usize) -> Result<RunningKeySeq> {
    let seg_bits = segment_bits(m)?;
    let lfsr = spec.start(seed)?;
    Ok(RunningKeySeq {
        segments: chunk_segments(lfsr, seg_bits, n_symbols),
        seg_bits,
    })
}

/// Dependency distance `L / log2(M/2)` of an LFSR-driven running key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DependencyDistance {
    /// Reduced numerator of the exact rational.
    pub numerator: u32,
    /// Reduced denominator of the exact rational.
    pub denominator: u32,
    /// Last symbol index up to which the segments are guaranteed independent.
    pub floor: u32,
}

impl DependencyDistance {
    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

pub fn dependency_distance(length: u32, m: u32) -> Result<DependencyDistance> {
    let seg_bits = segment_bits(m)?;
    let g = gcd(length as u64, seg_bits as u64) as u32;
    Ok(DependencyDistance {
        numerator: length / g,
        denominator: seg_bits / g,
        floor: length / seg_bits,
    })
}

/// Hex rendering of a bit string, MSB-first, zero-padded to a nibble.
pub fn bits_to_hex(bits: &[u8]) -> String {
    bits.chunks(4)
        .map(|c| {
            let mut v = 0u8;
            for i in 0..4 {
                v = (v << 1) | c.get(i).copied().unwrap_or(0);
            }
            char::from_digit(v as u32, 16).unwrap()
        })
        .collect()
}

/// Inverse of [`bits_to_hex`]; `len` bits are taken from the front.
pub fn hex_to_bits(hex: &str, len: Option<usize>) -> Result<Vec<u8>> {
    let mut bits = Vec::with_capacity(hex.len() * 4);
    for c in hex.chars().filter(|c| !c.is_whitespace() && *c != '_') {
        let v = c
            .to_digit(16)
            .ok_or_else(|| Error::invalid(format!("not a hex digit: {c:?}")))?;
        bits.extend((0..4).rev().map(|b| ((v >> b) & 1) as u8));
    }
    if let Some(len) = len {
        if len > bits.len() {
            return Err(Error::LengthMismatch {
                expected: len,
                actual: bits.len(),
            });
        }
        bits.truncate(len);
    }
    Ok(bits)
}
