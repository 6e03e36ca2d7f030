//! Probability measures on finite frames.
//!
//! Two updating rules live here. Plain conditioning
//!
//! ```text
//! P(B | A) = P(A and B) / P(A),            P(A) > 0,
//! ```
//!
//! revises on an event learned with certainty, and Jeffrey's rule
//!
//! ```text
//! P'(B) = sum_i alpha_i * P(B | A_i),      sum_i alpha_i = 1,
//! ```
//!
//! revises on an uncertain observation that redistributes belief over a
//! partition `{A_i}` of the frame. Jeffrey's rule keeps the conditional
//! structure inside each cell and forces the posterior cell probabilities
//! to the prescribed weights `alpha_i`; with the two-cell partition
//! `{A, not A}` and weights `(1, 0)` it collapses to plain conditioning.
//!
//! The observation type, [`WeightedPartition`], is shared with the other
//! calculi: additively normalized partitions feed Jeffrey's rule, while
//! max-normalized partitions express possibilistic observations for the
//! ranking-function update in [`crate::ocf`].

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, NormalizationMode, Result};
use crate::frame::{Frame, Subset};
use crate::{Tolerance, NORMALIZATION_BAND, NORMALIZATION_SLACK};

/// A probability measure, stored as one weight per frame element.
///
/// Weights are non-negative and sum to 1 up to [`NORMALIZATION_SLACK`];
/// constructors repair totals within [`NORMALIZATION_BAND`] of 1 by
/// rescaling, keep totals already inside the slack as given, and reject
/// anything further out.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityMeasure {
    frame: Frame,
    weights: Vec<f64>,
}

impl ProbabilityMeasure {
    /// Builds a measure from one weight per frame element, in frame order.
    pub fn new(frame: Frame, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != frame.size() {
            return Err(Error::LengthMismatch {
                expected: frame.size(),
                found: weights.len(),
            });
        }
        for &w in &weights {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::NegativeValue {
                    what: "atom probability",
                    value: w,
                });
            }
        }
        let sum: f64 = weights.iter().sum();
        if libm::fabs(sum - 1.0) > NORMALIZATION_BAND {
            return Err(Error::ProbabilityNormalization { sum });
        }
        Ok(Self::rescaled(frame, weights))
    }

    /// Builds a measure from `(label, weight)` pairs; elements that are not
    /// mentioned get probability 0.
    pub fn from_labeled<I, S>(frame: Frame, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: AsRef<str>,
    {
        let mut weights = vec![0.0; frame.size()];
        let mut seen = vec![false; frame.size()];
        for (label, w) in entries {
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
            weights[idx] = w;
        }
        Self::new(frame, weights)
    }

    /// The uniform measure on `frame`.
    pub fn uniform(frame: Frame) -> Self {
        let n = frame.size();
        Self::rescaled(frame, vec![1.0; n])
    }

    /// Rescales mathematically normalized weights so they sum to exactly 1.
    /// Used by the rules, whose outputs normalize up to float rounding.
    /// Totals already within [`NORMALIZATION_SLACK`] of 1 are kept bit for
    /// bit, so rebuilding a measure from its own weights changes nothing.
    fn rescaled(frame: Frame, mut weights: Vec<f64>) -> Self {
        let sum: f64 = weights.iter().sum();
        if libm::fabs(sum - 1.0) > NORMALIZATION_SLACK {
            for w in &mut weights {
                *w /= sum;
            }
        }
        ProbabilityMeasure { frame, weights }
    }

    /// The frame this measure is defined over.
    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// The atom weights in frame order.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Probability of the element at `index`.
    ///
    /// # Panics
    /// Panics if `index` is out of bounds.
    pub fn weight(&self, index: usize) -> f64 {
        self.weights[index]
    }

    /// Probability of an event.
    pub fn probability_of(&self, event: &Subset) -> Result<f64> {
        self.frame.ensure_compatible(event.frame())?;
        Ok(event.member_indices().map(|i| self.weights[i]).sum())
    }

    /// Conditions on an event learned with certainty.
    ///
    /// Fails with [`Error::ConditioningOnNull`] when `P(event)` is not
    /// strictly positive at `tol`.
    pub fn bayes_condition(&self, event: &Subset, tol: Tolerance) -> Result<Self> {
        let pa = self.probability_of(event)?;
        if !tol.positive(pa) {
            return Err(Error::ConditioningOnNull {
                event: format!("{event}"),
            });
        }
        let mut weights = vec![0.0; self.frame.size()];
        for i in event.member_indices() {
            weights[i] = self.weights[i] / pa;
        }
        Ok(Self::rescaled(self.frame.clone(), weights))
    }

    /// Jeffrey's rule: revises on an uncertain observation over a
    /// sum-normalized partition.
    ///
    /// Cells with weight 0 contribute nothing and may even have probability
    /// 0; every cell with positive weight must itself have positive prior
    /// probability, otherwise the rule is undefined and the offending cell
    /// is named in the error.
    pub fn jeffrey_update(&self, observation: &WeightedPartition, tol: Tolerance) -> Result<Self> {
        self.frame.ensure_compatible(observation.frame())?;
        if observation.mode() != NormalizationMode::Sum {
            return Err(Error::NormalizationModeMismatch {
                expected: NormalizationMode::Sum,
                found: observation.mode(),
            });
        }
        let mut weights = vec![0.0; self.frame.size()];
        for (cell, alpha) in observation.cells() {
            if alpha == 0.0 {
                continue;
            }
            let pa = self.probability_of(&cell)?;
            if !tol.positive(pa) {
                return Err(Error::ConditioningOnNull {
                    event: format!("cell {cell} with weight {alpha}"),
                });
            }
            for i in cell.member_indices() {
                weights[i] += alpha * self.weights[i] / pa;
            }
        }
        Ok(Self::rescaled(self.frame.clone(), weights))
    }
}

impl fmt::Display for ProbabilityMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{{")?;
        for (i, w) in self.weights.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}: {w}", self.frame.label(i))?;
        }
        write!(f, "}}")
    }
}

/// A finite partition of the frame with one weight per cell.
///
/// The cells must be pairwise disjoint and jointly cover the frame (empty
/// cells are tolerated; they can never carry usable weight). Weights obey
/// the partition's [`NormalizationMode`]: additive observations sum to 1,
/// maxitive observations peak at 1. As with the state types, totals within
/// [`NORMALIZATION_BAND`] of 1 are repaired by rescaling.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPartition {
    frame: Frame,
    cells: Vec<(Subset, f64)>,
    mode: NormalizationMode,
}

impl WeightedPartition {
    /// Builds a weighted partition from `(cell, weight)` pairs.
    pub fn new(cells: Vec<(Subset, f64)>, mode: NormalizationMode) -> Result<Self> {
        let frame = match cells.first() {
            Some((cell, _)) => cell.frame().clone(),
            None => return Err(Error::PartitionIncomplete),
        };
        let mut covered = frame.empty();
        for (cell, w) in &cells {
            frame.ensure_compatible(cell.frame())?;
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::NegativeValue {
                    what: "cell weight",
                    value: *w,
                });
            }
            if *w > 1.0 + NORMALIZATION_BAND {
                return Err(Error::ValueOutOfRange {
                    what: "cell weight",
                    value: *w,
                });
            }
            if !covered.is_disjoint_from(cell)? {
                return Err(Error::PartitionNotDisjoint);
            }
            covered = covered.union(cell)?;
        }
        if !covered.is_full() {
            return Err(Error::PartitionIncomplete);
        }
        let mut cells: Vec<(Subset, f64)> = cells
            .into_iter()
            .map(|(cell, w)| (cell, w.clamp(0.0, 1.0)))
            .collect();
        match mode {
            NormalizationMode::Sum => {
                let sum: f64 = cells.iter().map(|(_, w)| *w).sum();
                if libm::fabs(sum - 1.0) > NORMALIZATION_BAND {
                    return Err(Error::WeightNormalization { mode, actual: sum });
                }
                if libm::fabs(sum - 1.0) > NORMALIZATION_SLACK {
                    for (_, w) in &mut cells {
                        *w /= sum;
                    }
                }
            }
            NormalizationMode::Max => {
                let max = cells.iter().map(|(_, w)| *w).fold(0.0, f64::max);
                if libm::fabs(max - 1.0) > NORMALIZATION_BAND {
                    return Err(Error::WeightNormalization { mode, actual: max });
                }
                if libm::fabs(max - 1.0) > NORMALIZATION_SLACK {
                    for (_, w) in &mut cells {
                        *w /= max;
                    }
                }
            }
        }
        Ok(WeightedPartition { frame, cells, mode })
    }

    /// The frame the partition lives in.
    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// The normalization discipline the weights obey.
    pub fn mode(&self) -> NormalizationMode {
        self.mode
    }

    /// Number of cells.
    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// The `(cell, weight)` pairs in construction order.
    pub fn cells(&self) -> impl Iterator<Item = (Subset, f64)> + '_ {
        self.cells.iter().map(|(cell, w)| (cell.clone(), *w))
    }
}
