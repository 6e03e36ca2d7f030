//! Ordinal conditional functions: integer-ranked disbelief, shifted
//! conditionalization, and the exponential bridge to possibility theory.
//!
//! An ordinal conditional function (OCF) `k` assigns every world a natural
//! number grading how surprising it would be, with `k = 0` somewhere: the
//! unsurprising worlds. Sets rank at their least surprising member,
//! `k(A) = min over A of k`.
//!
//! Learning "A, to firmness n" performs the `(A, n)`-conditionalization
//!
//! ```text
//! k'(w) = k(w) - k(A)            for w in A,
//! k'(w) = n + k(w) - k(not A)    for w outside A,
//! ```
//!
//! which normalizes the inside to rank 0 and pushes the outside `n` ranks
//! away. The exponential translation `pi = e^(-k)` carries OCFs onto
//! possibility distributions; under it, `(A, n)`-conditionalization is
//! exactly the partition update
//!
//! ```text
//! pi'(w) = alpha_i * pi(w) / Poss(A_i)     for w in cell A_i
//! ```
//!
//! with the two-cell observation `(A, 1), (not A, e^(-n))`. That update,
//! [`spohn_update`], accepts any max-normalized weighted partition and is
//! the ranking-theoretic counterpart of Jeffrey's rule. It is *not* the
//! same rule as the possibilistic Jeffrey update of
//! [`crate::possibility`] — the two agree when the observation is at
//! least as permissive as the prior or vice versa, and drift apart in
//! between; [`compare_rules`] computes both side by side and reports the
//! drift.
//!
//! The reverse translation [`Ocf::from_possibility`] only accepts
//! distributions whose values sit on the grid `{e^(-k)}` (within a small
//! tolerance) and are strictly positive; in practice that bounds usable
//! ranks by roughly `-ln(eps)`, about 20 at the default tolerance.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, NormalizationMode, Result};
use crate::frame::{Frame, Subset};
use crate::possibility::{PossibilityDistribution, Updated, Warning};
use crate::probability::WeightedPartition;
use crate::Tolerance;

/// Default ceiling on ranks, keeping `e^(-k)` translations finite and
/// arithmetic far from overflow.
pub const DEFAULT_RANK_CAP: u64 = 1_000_000;

/// Default tolerance when snapping `-ln pi` to the integer rank grid.
pub const DEFAULT_GRID_TOLERANCE: f64 = 1e-6;

/// An ordinal conditional function: one natural-number rank per world,
/// with rank 0 attained somewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ocf {
    frame: Frame,
    ranks: Vec<u64>,
}

impl Ocf {
    /// Builds an OCF from one rank per frame element, in frame order,
    /// capped at [`DEFAULT_RANK_CAP`].
    pub fn new(frame: Frame, ranks: Vec<u64>) -> Result<Self> {
        Self::new_with_cap(frame, ranks, DEFAULT_RANK_CAP)
    }

    /// Builds an OCF with an explicit rank cap.
    pub fn new_with_cap(frame: Frame, ranks: Vec<u64>, cap: u64) -> Result<Self> {
        if ranks.len() != frame.size() {
            return Err(Error::LengthMismatch {
                expected: frame.size(),
                found: ranks.len(),
            });
        }
        for &rank in &ranks {
            if rank > cap {
                return Err(Error::RankCapExceeded { rank, cap });
            }
        }
        let min = ranks.iter().copied().min().unwrap_or(0);
        if min != 0 {
            return Err(Error::RankNormalization { min });
        }
        Ok(Ocf { frame, ranks })
    }

    /// Builds an OCF from `(label, rank)` pairs; elements that are not
    /// mentioned get rank 0.
    pub fn from_labeled<I, S>(frame: Frame, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: AsRef<str>,
    {
        let mut ranks = vec![0u64; frame.size()];
        let mut seen = vec![false; frame.size()];
        for (label, rank) in entries {
            let label = label.as_ref();
            let idx = frame.index_of(label).ok_or_else(|| Error::UnknownElement {
                label: String::from(label),
            })?;
            if seen[idx] {
                return Err(Error::DuplicateLabel {
                    label: String::from(label),
                });
            }
            seen[idx] = true;
            ranks[idx] = rank;
        }
        Self::new(frame, ranks)
    }

    /// The frame this OCF is defined over.
    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// The ranks in frame order.
    pub fn ranks(&self) -> &[u64] {
        &self.ranks
    }

    /// Rank of the element at `index`.
    ///
    /// # Panics
    /// Panics if `index` is out of bounds.
    pub fn rank(&self, index: usize) -> u64 {
        self.ranks[index]
    }

    /// Rank of a non-empty event: its least surprising member's rank.
    pub fn rank_of(&self, event: &Subset) -> Result<u64> {
        self.frame.ensure_compatible(event.frame())?;
        event
            .member_indices()
            .map(|i| self.ranks[i])
            .min()
            .ok_or(Error::EmptySet)
    }

    /// The `A`-part of the OCF: ranks inside `event`, renormalized so the
    /// event's best world sits at 0. A partial function, defined on the
    /// event only.
    pub fn a_part(&self, event: &Subset) -> Result<OcfPart> {
        let base = self.rank_of(event)?;
        let entries = event
            .member_indices()
            .map(|i| (i, self.ranks[i] - base))
            .collect();
        Ok(OcfPart {
            domain: event.clone(),
            entries,
        })
    }

    /// `(event, shift)`-conditionalization, capped at [`DEFAULT_RANK_CAP`]:
    /// the event's interior renormalizes to 0, the exterior renormalizes
    /// and moves `shift` ranks away.
    pub fn conditionalize(&self, event: &Subset, shift: u64, tol: Tolerance) -> Result<Self> {
        self.conditionalize_with_cap(event, shift, DEFAULT_RANK_CAP, tol)
    }

    /// [`Ocf::conditionalize`] with an explicit rank cap.
    pub fn conditionalize_with_cap(
        &self,
        event: &Subset,
        shift: u64,
        cap: u64,
        _tol: Tolerance,
    ) -> Result<Self> {
        self.frame.ensure_compatible(event.frame())?;
        let complement = event.complement();
        if event.is_empty() {
            return Err(Error::EmptySet);
        }
        if complement.is_empty() {
            return Err(Error::DegenerateComplement);
        }
        if shift > cap {
            return Err(Error::RankCapExceeded { rank: shift, cap });
        }
        let inside_base = self.rank_of(event)?;
        let outside_base = self.rank_of(&complement)?;
        let mut ranks = vec![0u64; self.frame.size()];
        for i in event.member_indices() {
            ranks[i] = self.ranks[i] - inside_base;
        }
        for i in complement.member_indices() {
            ranks[i] = shift + (self.ranks[i] - outside_base);
        }
        for &rank in &ranks {
            if rank > cap {
                return Err(Error::RankCapExceeded { rank, cap });
            }
        }
        Ok(Ocf {
            frame: self.frame.clone(),
            ranks,
        })
    }

    /// The exponential translation `pi = e^(-k)`, always normalized since
    /// some world has rank 0.
    pub fn to_possibility(&self) -> PossibilityDistribution {
        let values: Vec<f64> = self
            .ranks
            .iter()
            .map(|&rank| libm::exp(-(rank as f64)))
            .collect();
        PossibilityDistribution::new(self.frame.clone(), values)
            .expect("a rank-0 world translates to possibility 1")
    }

    /// The reverse translation: snaps `-ln pi` to whole ranks, using
    /// [`DEFAULT_GRID_TOLERANCE`] and the default comparison tolerance.
    pub fn from_possibility(distribution: &PossibilityDistribution) -> Result<Self> {
        Self::from_possibility_with(
            distribution,
            DEFAULT_GRID_TOLERANCE,
            Tolerance::default(),
        )
    }

    /// [`Ocf::from_possibility`] with explicit tolerances.
    ///
    /// Every value must be strictly positive at `tol` and within
    /// `grid_tol` of some `e^(-k)`; otherwise the offending element is
    /// named in the error.
    pub fn from_possibility_with(
        distribution: &PossibilityDistribution,
        grid_tol: f64,
        tol: Tolerance,
    ) -> Result<Self> {
        let frame = distribution.frame().clone();
        let mut ranks = vec![0u64; frame.size()];
        for (i, &v) in distribution.values().iter().enumerate() {
            if !tol.positive(v) {
                return Err(Error::ZeroPossibility {
                    element: String::from(frame.label(i)),
                });
            }
            let log_value = -libm::log(v);
            let snapped = libm::round(log_value);
            if libm::fabs(log_value - snapped) > grid_tol {
                return Err(Error::NotOnRankGrid {
                    element: String::from(frame.label(i)),
                    log_value,
                });
            }
            ranks[i] = snapped as u64;
        }
        Self::new(frame, ranks)
    }

    /// The ranking-theoretic partition update applied to this OCF's
    /// translation; see [`spohn_update`].
    pub fn spohn_update(
        &self,
        observation: &SpohnObservation,
        tol: Tolerance,
    ) -> Result<PossibilityDistribution> {
        spohn_update(&self.to_possibility(), observation, tol)
    }

    /// Runs [`compare_rules`] with this OCF's translation as the prior.
    pub fn compare_rules(
        &self,
        observation: &SpohnObservation,
        tol: Tolerance,
    ) -> Result<RuleComparison> {
        compare_rules(&self.to_possibility(), observation, tol)
    }
}

impl fmt::Display for Ocf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k{{")?;
        for (i, rank) in self.ranks.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}: {rank}", self.frame.label(i))?;
        }
        write!(f, "}}")
    }
}

/// The `A`-part of an OCF: a partial ranking defined on one event, with
/// the event's best world at rank 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OcfPart {
    domain: Subset,
    entries: Vec<(usize, u64)>,
}

impl OcfPart {
    /// The event the partial ranking is defined on.
    pub fn domain(&self) -> &Subset {
        &self.domain
    }

    /// Rank of the element at `index`, if it belongs to the domain.
    pub fn rank_at(&self, index: usize) -> Option<u64> {
        self.entries
            .iter()
            .find(|(i, _)| *i == index)
            .map(|(_, rank)| *rank)
    }

    /// Rank of the named element, if it belongs to the domain.
    pub fn rank(&self, label: &str) -> Option<u64> {
        self.domain
            .frame()
            .index_of(label)
            .and_then(|i| self.rank_at(i))
    }

    /// The `(index, rank)` pairs in frame order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.entries.iter().copied()
    }

    /// Exponential translation of the partial ranking: `e^(-k)` on the
    /// domain, 0 outside — exactly conditioning the full translation on
    /// the domain.
    pub fn to_possibility(&self) -> PossibilityDistribution {
        let frame = self.domain.frame().clone();
        let mut values = vec![0.0; frame.size()];
        for &(i, rank) in &self.entries {
            values[i] = libm::exp(-(rank as f64));
        }
        PossibilityDistribution::new(frame, values)
            .expect("the domain's rank-0 world translates to possibility 1")
    }
}

/// A possibilistic observation for the ranking-theoretic partition
/// update: a max-normalized [`WeightedPartition`], each cell weighted by
/// how possible the observation deems it.
#[derive(Clone, Debug, PartialEq)]
pub struct SpohnObservation {
    partition: WeightedPartition,
}

impl SpohnObservation {
    /// Wraps a max-normalized partition; sum-normalized ones are refused.
    pub fn new(partition: WeightedPartition) -> Result<Self> {
        if partition.mode() != NormalizationMode::Max {
            return Err(Error::NormalizationModeMismatch {
                expected: NormalizationMode::Max,
                found: partition.mode(),
            });
        }
        Ok(SpohnObservation { partition })
    }

    /// Builds the observation directly from `(cell, weight)` pairs.
    pub fn from_cells(cells: Vec<(Subset, f64)>) -> Result<Self> {
        Self::new(WeightedPartition::new(cells, NormalizationMode::Max)?)
    }

    /// The two-cell observation "certainly `event`, to firmness `shift`":
    /// the event at weight 1, its complement at weight `e^(-shift)`.
    ///
    /// Under the exponential translation this observation makes
    /// [`spohn_update`] coincide with `(event, shift)`-conditionalization.
    pub fn certainty_shift(event: &Subset, shift: u64) -> Result<Self> {
        if event.is_empty() {
            return Err(Error::EmptySet);
        }
        let complement = event.complement();
        if complement.is_empty() {
            return Err(Error::DegenerateComplement);
        }
        Self::from_cells(vec![
            (event.clone(), 1.0),
            (complement, libm::exp(-(shift as f64))),
        ])
    }

    /// The underlying partition.
    pub fn partition(&self) -> &WeightedPartition {
        &self.partition
    }

    /// The frame the observation lives in.
    pub fn frame(&self) -> &Frame {
        self.partition.frame()
    }

    /// The observation as a step-shaped possibility distribution: each
    /// world at its cell's weight.
    ///
    /// Fails with [`Error::PossibilityNormalization`] in the degenerate
    /// case where the full-weight cell is empty.
    pub fn to_distribution(&self) -> Result<PossibilityDistribution> {
        let frame = self.partition.frame().clone();
        let mut values = vec![0.0; frame.size()];
        for (cell, weight) in self.partition.cells() {
            for i in cell.member_indices() {
                values[i] = weight;
            }
        }
        PossibilityDistribution::new(frame, values)
    }
}

/// The ranking-theoretic counterpart of Jeffrey's rule: given a prior
/// possibility distribution (usually `e^(-k)` for an OCF `k`) and a
/// max-normalized observation over a partition `{A_i}`, produce
///
/// ```text
/// pi'(w) = alpha_i * pi(w) / Poss(A_i)      for w in cell A_i.
/// ```
///
/// Inside every cell the relative possibilities are preserved; across
/// cells the observation dictates the levels. Cells of negligible weight
/// (at `tol`) are zeroed outright; every other cell must have strictly
/// positive prior possibility, otherwise the rule is undefined and the
/// cell is named.
pub fn spohn_update(
    prior: &PossibilityDistribution,
    observation: &SpohnObservation,
    tol: Tolerance,
) -> Result<PossibilityDistribution> {
    prior.frame().ensure_compatible(observation.frame())?;
    let mut values = vec![0.0; prior.frame().size()];
    for (cell, alpha) in observation.partition().cells() {
        if !tol.positive(alpha) {
            continue;
        }
        let poss = prior.possibility_of(&cell)?;
        if !tol.positive(poss) {
            return Err(Error::ConditioningUndefined {
                rule: "spohn",
                detail: format!(
                    "cell {cell} has weight {alpha} but prior possibility {poss}"
                ),
            });
        }
        for i in cell.member_indices() {
            values[i] = alpha * prior.value(i) / poss;
        }
    }
    PossibilityDistribution::new(prior.frame().clone(), values)
}

/// Side-by-side result of the two partition-update rules on one input.
///
/// `spohn` is the ranking-theoretic update of [`spohn_update`];
/// `possibilistic` is the Jeffrey-style update of
/// [`PossibilityDistribution::jeffrey_update`] applied to the
/// observation's step-shaped distribution. The flags describe where the
/// input sits relative to the regimes in which the two rules provably
/// agree.
#[derive(Clone, Debug)]
pub struct RuleComparison {
    /// Posterior of the ranking-theoretic partition update.
    pub spohn: PossibilityDistribution,
    /// Posterior of the possibilistic Jeffrey update.
    pub possibilistic: PossibilityDistribution,
    /// Warning attached to the possibilistic posterior, if any.
    pub possibilistic_warning: Option<Warning>,
    /// Pointwise `spohn - possibilistic`, in frame order.
    pub pointwise_diff: Vec<f64>,
    /// Largest absolute pointwise difference.
    pub max_abs_diff: f64,
    /// Whether the observation dominates the prior everywhere
    /// (`pi_obs >= pi_prior`, up to `tol`).
    pub observation_dominates_prior: bool,
    /// Whether the prior dominates the observation everywhere
    /// (`pi_obs <= pi_prior`, up to `tol`).
    pub prior_dominates_observation: bool,
    /// Whether the cores (fully possible worlds) of prior and observation
    /// intersect.
    pub cores_overlap: bool,
}

/// Runs both partition-update rules on the same prior and observation and
/// reports their pointwise drift together with the dominance structure of
/// the input. Errors from either rule propagate.
pub fn compare_rules(
    prior: &PossibilityDistribution,
    observation: &SpohnObservation,
    tol: Tolerance,
) -> Result<RuleComparison> {
    let obs_dist = observation.to_distribution()?;
    let spohn = spohn_update(prior, observation, tol)?;
    let Updated {
        distribution: possibilistic,
        warning: possibilistic_warning,
    } = prior.jeffrey_update(&obs_dist, tol)?;
    let pointwise_diff: Vec<f64> = spohn
        .values()
        .iter()
        .zip(possibilistic.values())
        .map(|(s, p)| s - p)
        .collect();
    let max_abs_diff = pointwise_diff.iter().fold(0.0f64, |acc, d| acc.max(libm::fabs(*d)));
    let obs_values = obs_dist.values();
    let prior_values = prior.values();
    let observation_dominates_prior = obs_values
        .iter()
        .zip(prior_values)
        .all(|(o, p)| *o >= *p - tol.eps());
    let prior_dominates_observation = obs_values
        .iter()
        .zip(prior_values)
        .all(|(o, p)| *o <= *p + tol.eps());
    let cores_overlap = !obs_dist
        .core()
        .intersect(&prior.core())?
        .is_empty();
    Ok(RuleComparison {
        spohn,
        possibilistic,
        possibilistic_warning,
        pointwise_diff,
        max_abs_diff,
        observation_dominates_prior,
        prior_dominates_observation,
        cores_overlap,
    })
}
