//! Exact and asymptotic convergence rates for riffle shuffles with biased cuts.
//!
//! A θ-shuffle cuts an `n`-card deck into packets of multinomial sizes and
//! riffles them together by proportional drops. This crate computes the law of
//! such shuffles and of their convolution powers, the separation, ℓ∞ and
//! total-variation distances to uniform (by enumeration, by closed-form
//! cycle-type sums, and by Monte Carlo), the eigenvalue spectrum, birthday
//! bounds, and the large-`n` approximation of `n!·P^{*k}(id)` that governs the
//! cutoff.
//!
//! Modules, bottom-up:
//! - [`perm`]: permutations, descents, cycle types, Lyndon factorization.
//! - [`qsym`]: compositions, partitions, quasisymmetric/symmetric evaluation.
//! - [`shuffle`]: bias vectors, exact laws, samplers, strong stationary times.
//! - [`distances`]: distance metrics, spectra, birthday bounds.
//! - [`asymptotics`]: cutoff location and large-`n` approximations.
//! - [`report`] and [`experiments`]: tabular output and the command drivers.
//! - [`oracle`]: slow reference computations used for cross-checks.
//! - [`validation`]: the acceptance checks behind `riffle validate`.

pub mod asymptotics;
pub mod distances;
pub mod error;
pub mod experiments;
pub mod oracle;
pub mod perm;
pub mod qsym;
pub mod report;
pub mod scalar;
pub mod shuffle;
pub mod validation;

pub use error::{Error, Result};
pub use perm::Permutation;
pub use scalar::{Backend, Scalar};
pub use shuffle::BiasVector;

use serde::{Deserialize, Serialize};

/// Size limits. Exceeding one is a hard [`Error::Capacity`], never a silent
/// truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest `n` for which all of `S_n` is enumerated.
    pub enumeration: usize,
    /// Largest `n` for which sums over partitions of `n` are evaluated.
    pub partitions: usize,
    /// Largest length `a^k` of a convolution-power weight vector.
    pub weights: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            enumeration: perm::DEFAULT_ENUM_CAP,
            partitions: 60,
            weights: 1 << 24,
        }
    }
}
