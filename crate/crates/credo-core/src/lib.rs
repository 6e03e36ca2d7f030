//! Belief updating across three uncertainty calculi on finite frames.
//!
//! `credo-core` implements, side by side, the main conditioning and
//! revision rules of
//!
//! * **probability theory** — Bayes conditioning and Jeffrey's rule for
//!   uncertain observations ([`probability`]);
//! * **Dempster-Shafer evidence theory** — belief/plausibility queries,
//!   four conditioning rules, Dempster's rule of combination, and the
//!   Jeffrey-style update for unreliable observations ([`evidence`]);
//! * **possibility theory** — conditioning, conjunctive combination,
//!   weighted-maximum aggregation, and the possibilistic counterpart of
//!   Jeffrey's rule ([`possibility`]);
//! * **ordinal conditional (ranking) functions** — shifted
//!   conditionalization, the exponential translation to possibility
//!   distributions and back, and the partition-based update that mirrors
//!   Jeffrey's rule on ranks ([`ocf`]).
//!
//! The calculi agree on a web of special cases: categorical combination
//! collapses to conditioning, the evidential Jeffrey rule collapses to the
//! probabilistic one on Bayesian states, ranking-function updates commute
//! with the exponential translation, and so on. The [`compare`] module
//! turns each of those coincidences into a seeded, reproducible numeric
//! check over randomly generated instances, which doubles as the crate's
//! cross-validation harness.
//!
//! The crate is `no_std` (with `alloc`); all state lives in ordinary
//! containers and all iteration orders are deterministic.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod compare;
pub mod error;
pub mod evidence;
pub mod frame;
pub mod ocf;
pub mod possibility;
pub mod probability;

pub use error::{Error, ErrorCategory, NormalizationMode, Result};
pub use evidence::{Conditioned, ConditioningRule, IntervalValuation, MassFunction};
pub use frame::{Frame, Subset, DEFAULT_ENUMERATION_CAP};
pub use ocf::{compare_rules, spohn_update, Ocf, OcfPart, RuleComparison, SpohnObservation, DEFAULT_RANK_CAP};
pub use possibility::{
    ConjunctionOp, LevelCut, PossibilityDistribution, Updated, UpdateCombination, Warning,
    WeightedSource,
};
pub use probability::{ProbabilityMeasure, WeightedPartition};

/// Width of the band around 1 inside which sums and maxima are repaired by
/// renormalization rather than rejected.
///
/// Values written with a dozen decimals (`0.999999999`) do not land exactly
/// on 1 after parsing; demanding agreement at [`Tolerance::DEFAULT_EPS`]
/// would reject them. Constructors therefore accept any total within this
/// band of 1 and rescale so the invariant holds exactly, while totals
/// outside the band remain hard validation errors.
pub const NORMALIZATION_BAND: f64 = 1e-6;

/// Width of the inner band around 1 inside which totals are accepted as
/// already normalized, with no repair at all.
///
/// Rescaling perturbs every value by a factor of `total`, so repairing
/// noise-level deviations would keep nudging values that are as close to
/// normalized as decimal serialization can express. Deviations up to this
/// slack -- comfortably above the rounding error of twelve-significant-
/// digit decimals, far below [`NORMALIZATION_BAND`] -- are therefore left
/// untouched, which makes construction idempotent: feeding a state's own
/// values back to a constructor reproduces the state bit for bit.
pub const NORMALIZATION_SLACK: f64 = 1e-9;

/// Comparison tolerance threaded through every rule.
///
/// A single `eps` plays two roles: strict-positivity preconditions are
/// checked as `x > eps`, and derived quantities are compared with
/// `|a - b| <= eps`. The default of `1e-9` suits states whose weights are
/// a handful of arithmetic operations away from user input; tighten or
/// loosen it per call site as needed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    eps: f64,
}

impl Tolerance {
    /// Default comparison tolerance.
    pub const DEFAULT_EPS: f64 = 1e-9;

    /// A tolerance with the given `eps`; non-finite or negative values fall
    /// back to the default.
    pub fn new(eps: f64) -> Self {
        if eps.is_finite() && eps >= 0.0 {
            Tolerance { eps }
        } else {
            Tolerance::default()
        }
    }

    /// The raw epsilon.
    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Whether `x` counts as strictly positive at this tolerance.
    pub fn positive(&self, x: f64) -> bool {
        x > self.eps
    }

    /// Whether `a` and `b` agree at this tolerance.
    pub fn close(&self, a: f64, b: f64) -> bool {
        libm::fabs(a - b) <= self.eps
    }

    /// Whether `x` counts as zero at this tolerance.
    pub fn zero(&self, x: f64) -> bool {
        libm::fabs(x) <= self.eps
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eps: Tolerance::DEFAULT_EPS,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_roles() {
        let tol = Tolerance::default();
        assert!(tol.positive(1e-8));
        assert!(!tol.positive(1e-10));
        assert!(tol.close(0.3, 0.3 + 1e-10));
        assert!(!tol.close(0.3, 0.3 + 1e-8));
        assert!(tol.zero(-1e-10));
        let loose = Tolerance::new(1e-3);
        assert!(loose.close(0.5, 0.5005));
        assert_eq!(Tolerance::new(f64::NAN), Tolerance::default());
        assert_eq!(Tolerance::new(-1.0), Tolerance::default());
    }
}
