//! Cryptanalysis laboratory for the alpha-eta quantum-noise stream cipher.
//!
//! Exact Bayesian key posteriors over every LFSR seed, Monte-Carlo estimates
//! of spurious keys, equivocation and mutual information, closed-form
//! security bounds, and the attacks that give them operational meaning.

pub mod attacks;
pub mod bounds;
pub mod channel;
pub mod error;
pub mod experiment;
pub mod inference;
pub mod keystream;
pub mod montecarlo;

pub use error::{Error, Result};
