//! Closed-form spurious-key bounds and the approximations they are compared
//! against. Entropies in bits; `H(K) = log2(2^L - 1)` throughout.

use serde::Serialize;

/// Default factor standing in for "much greater than" in [`ab_break_condition`].
pub const DEFAULT_BREAK_FACTOR: f64 = 10.0;

/// Inputs shared by the bound formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundInputs {
    /// `H(K)` in bits.
    pub key_entropy: f64,
    /// Symbols observed.
    pub n: f64,
    /// `log2 |X|`; 1 for binary plaintext.
    pub log2_alphabet: f64,
    /// Plaintext redundancy per symbol.
    pub redundancy: f64,
    /// `I(X^n K; Y^n)` in bits, measured or capped.
    pub info: f64,
    /// Per-symbol information `U`.
    pub per_symbol_info: f64,
    /// Register length `L`.
    pub key_bits: f64,
}

/// Average spurious keys of the random cipher and its unicity point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RandomCipher {
    pub spurious: f64,
    /// `H(K)/D`; infinite when `D = 0`.
    pub unicity: f64,
}

/// `(2^H - 1) 2^{-nD}` and `n0 = H/D`.
pub fn shannon_random_cipher_nk(key_entropy: f64, n: f64, redundancy: f64) -> RandomCipher {
    RandomCipher {
        spurious: (key_entropy.exp2() - 1.0) * (-n * redundancy).exp2(),
        unicity: if redundancy > 0.0 {
            key_entropy / redundancy
        } else {
            f64::INFINITY
        },
    }
}

/// `2^{H - nD} - 1`, valid for nonrandom endomorphic ciphers.
pub fn hbb_lower_bound(key_entropy: f64, n: f64, redundancy: f64) -> f64 {
    (key_entropy - n * redundancy).exp2() - 1.0
}

/// `2^{H + n(log2|X| - D) - I} - 1`, valid for random or nonrandom ciphers.
pub fn theorem2_lower_bound(inputs: &BoundInputs) -> f64 {
    (inputs.key_entropy + inputs.n * (inputs.log2_alphabet - inputs.redundancy) - inputs.info).exp2() - 1.0
}

/// Ciphertext-only bound with the information capped at `nU`, and the
/// length where it reaches zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CtaBound {
    pub bound: f64,
    /// `H/(U - 1)`; infinite when `U <= 1`. Marks only where the lower bound
    /// stops excluding `N_k = 0`, a necessary condition for a break.
    pub unicity: f64,
}

/// `2^{H + n(1 - U)} - 1` and `H/(U - 1)`.
pub fn cta_bound_and_unicity(key_entropy: f64, n: f64, per_symbol_info: f64) -> CtaBound {
    CtaBound {
        bound: (key_entropy + n * (1.0 - per_symbol_info)).exp2() - 1.0,
        unicity: if per_symbol_info > 1.0 {
            key_entropy / (per_symbol_info - 1.0)
        } else {
            f64::INFINITY
        },
    }
}

/// `max(L - QU, 0)`: the linear equivocation approximation, for overlay only.
pub fn ab_equivocation_approx(key_bits: f64, q: f64, per_symbol_info: f64) -> f64 {
    (key_bits - q * per_symbol_info).max(0.0)
}

/// `Q(U + 1) > c (L + H_E)`, with `c` standing in for "much greater than".
/// The factor is arbitrary; conclusions should be checked across values.
pub fn ab_break_condition(q: f64, per_symbol_info: f64, key_bits: f64, eq: f64, factor: f64) -> bool {
    q * (per_symbol_info + 1.0) > factor * (key_bits + eq)
}

/// Necessary (not sufficient) conditions for `N_k = 0` to be permitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NecessaryConditions {
    /// `n - H(X^n) >= L`.
    pub asc_zero_possible: bool,
    /// `nU - H(X^n) >= L`.
    pub alphaeta_zero_possible: bool,
}

pub fn necessary_conditions(n: f64, block_entropy: f64, key_bits: f64, per_symbol_info: f64) -> NecessaryConditions {
    NecessaryConditions {
        asc_zero_possible: n > 0.0 && n - block_entropy >= key_bits,
        alphaeta_zero_possible: n > 0.0 && n * per_symbol_info - block_entropy >= key_bits,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn inputs(n: f64, d: f64, info: f64) -> BoundInputs {
        BoundInputs {
            key_entropy: 13.0,
            n,
            log2_alphabet: 1.0,
            redundancy: d,
            info,
            per_symbol_info: 4.6,
            key_bits: 13.0,
        }
    }

    #[test]
    fn random_cipher() {
        assert_eq!(shannon_random_cipher_nk(13.0, 0.0, 1.0).spurious, 8191.0);
        let r = shannon_random_cipher_nk(13.0, 13.0, 1.0);
        assert_abs_diff_eq!(r.spurious, 8191.0 / 8192.0, epsilon = 1e-12);
        assert_eq!(r.unicity, 13.0);
        let flat = shannon_random_cipher_nk(13.0, 50.0, 0.0);
        assert_eq!(flat.spurious, 8191.0);
        assert!(flat.unicity.is_infinite());
    }

    #[test]
    fn no_data_bounds() {
        assert_eq!(hbb_lower_bound(13.0, 0.0, 0.7), 8191.0);
        assert_eq!(theorem2_lower_bound(&inputs(0.0, 0.7, 0.0)), 8191.0);
    }

    #[test]
    fn theorem2_reduces_to_hbb() {
        let b = inputs(10.0, 0.5, 10.0);
        assert_eq!(theorem2_lower_bound(&b), hbb_lower_bound(13.0, 10.0, 0.5));
    }

    #[test]
    fn cta_examples() {
        let flat = cta_bound_and_unicity(13.0, 7.0, 1.0);
        assert_eq!(flat.bound, 8191.0);
        assert!(flat.unicity.is_infinite());
        let c = cta_bound_and_unicity(13.0, 0.0, 4.6);
        assert_abs_diff_eq!(c.unicity, 13.0 / 3.6, epsilon = 1e-12);
        assert_abs_diff_eq!(cta_bound_and_unicity(13.0, c.unicity, 4.6).bound, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn ab_examples() {
        assert_eq!(ab_equivocation_approx(13.0, 0.0, 4.6), 13.0);
        assert_abs_diff_eq!(ab_equivocation_approx(13.0, 2.0, 4.6), 3.8, epsilon = 1e-12);
        assert_eq!(ab_equivocation_approx(13.0, 3.0, 4.6), 0.0);
        assert!(ab_break_condition(1000.0, 4.6, 13.0, 0.0, DEFAULT_BREAK_FACTOR));
        assert!(!ab_break_condition(3.0, 4.6, 13.0, 0.0, DEFAULT_BREAK_FACTOR));
    }

    #[test]
    fn necessary_condition_examples() {
        let at_l = necessary_conditions(8.0, 0.0, 8.0, 2.0);
        assert!(at_l.asc_zero_possible);
        assert!(!necessary_conditions(7.0, 0.0, 8.0, 2.0).asc_zero_possible);
        let none = necessary_conditions(0.0, 0.0, 0.0, 5.0);
        assert!(!none.asc_zero_possible && !none.alphaeta_zero_possible);
        // Uniform plaintext: nU - n >= L.
        for n in 1..40 {
            let n = n as f64;
            let c = necessary_conditions(n, n, 13.0, 1.5);
            assert_eq!(c.alphaeta_zero_possible, n * 1.5 >= n + 13.0);
            assert!(!c.asc_zero_possible);
        }
    }

    #[test]
    fn shannon_point_is_near_one() {
        for h in [4.0, 8.0, 13.0] {
            for d in [0.25, 0.5, 1.0] {
                let r = shannon_random_cipher_nk(h, h / d, d);
                let v = shannon_random_cipher_nk(h, r.unicity, d).spurious;
                assert!(v >= 1.0 - (-h).exp2() - 1e-12 && v <= 1.0);
            }
        }
    }

    #[test]
    fn cta_decreases_in_n() {
        let mut last = f64::INFINITY;
        for n in 0..20 {
            let b = cta_bound_and_unicity(13.0, n as f64, 2.5).bound;
            assert!(b < last);
            last = b;
        }
    }
}
