//! Possibility theory: distributions, conditioning, combination, and the
//! possibilistic counterpart of Jeffrey's rule.
//!
//! A possibility distribution grades how unsurprising each world is, with
//! `max pi = 1` (something is fully possible). Events are scored by the
//! dual pair
//!
//! ```text
//! Poss(A) = max of pi over A,        Nec(A) = 1 - Poss(not A),
//! ```
//!
//! and learning an event `B` for sure rescales the inside maxitively:
//! `pi(w | B) = pi(w) / Poss(B)` on `B`, 0 elsewhere.
//!
//! An *uncertain* observation is itself a distribution `pi2` over the same
//! frame. The possibilistic Jeffrey rule re-reads it as the nested family
//! of its level cuts `{pi2 >= a}` and takes, at each world, the best
//! certainty level consistent with conditioning on the matching cut:
//!
//! ```text
//! [pi1 | pi2](w) = min( pi2(w),  pi1(w) / Poss1({pi2 >= pi2(w)}) ),
//! ```
//!
//! with `0/0` read as 0. [`PossibilityDistribution::jeffrey_update_by_cuts`]
//! evaluates the same rule literally as a supremum over the cut family and
//! exists so the closed form above can be cross-checked against it.
//!
//! A Jeffrey-updated distribution can fail to reach 1 when the prior rules
//! out the observation's most-possible worlds. Following the crate-wide
//! policy, such results are returned as-is with an
//! [`Warning::UnnormalizedResult`] attached — never silently rescaled —
//! so the caller decides whether renormalization is meaningful.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, NormalizationMode, Result};
use crate::frame::{Frame, Subset};
use crate::{Tolerance, NORMALIZATION_BAND, NORMALIZATION_SLACK};

/// Conjunctive combination operator for possibility degrees.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConjunctionOp {
    /// `min(a, b)` — the idempotent standard.
    Min,
    /// `a * b` — reinforcing.
    Product,
    /// `max(0, a + b - 1)` — the Lukasiewicz conjunction.
    Lukasiewicz,
}

impl ConjunctionOp {
    /// Applies the operator to a pair of degrees.
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            ConjunctionOp::Min => a.min(b),
            ConjunctionOp::Product => a * b,
            ConjunctionOp::Lukasiewicz => (a + b - 1.0).max(0.0),
        }
    }
}

impl fmt::Display for ConjunctionOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConjunctionOp::Min => write!(f, "min"),
            ConjunctionOp::Product => write!(f, "product"),
            ConjunctionOp::Lukasiewicz => write!(f, "lukasiewicz"),
        }
    }
}

/// Outer combination used by the possibilistic Jeffrey rule: how the
/// observed level `pi2(w)` meets the conditioned prior.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpdateCombination {
    /// `min` — the standard, purely ordinal reading.
    Min,
    /// product — the reinforcing variant.
    Product,
}

impl UpdateCombination {
    fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            UpdateCombination::Min => a.min(b),
            UpdateCombination::Product => a * b,
        }
    }
}

/// Warning-level outcome attached to results that are valid but degraded.
#[derive(Clone, Debug, PartialEq)]
pub enum Warning {
    /// The resulting distribution does not reach 1; its peak is `max`.
    UnnormalizedResult {
        /// The largest value of the returned distribution.
        max: f64,
    },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::UnnormalizedResult { max } => {
                write!(f, "result is subnormal: its largest value is {max}, not 1")
            }
        }
    }
}

/// A distribution together with the warning, if any, its computation raised.
#[derive(Clone, Debug, PartialEq)]
pub struct Updated {
    /// The resulting distribution (possibly subnormal; see `warning`).
    pub distribution: PossibilityDistribution,
    /// Set when the result is valid but degraded.
    pub warning: Option<Warning>,
}

/// One level cut of a distribution: the worlds at least `alpha` possible.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelCut {
    /// The cut level.
    pub alpha: f64,
    /// The set `{w : pi(w) >= alpha}`.
    pub cut: Subset,
}

/// A possibility distribution paired with a reliability weight, for
/// weighted-maximum aggregation of several sources.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSource {
    distribution: PossibilityDistribution,
    weight: f64,
}

impl WeightedSource {
    /// Pairs a distribution with a reliability weight in `[0, 1]`.
    pub fn new(distribution: PossibilityDistribution, weight: f64) -> Result<Self> {
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::NegativeValue {
                what: "source weight",
                value: weight,
            });
        }
        if weight > 1.0 + NORMALIZATION_BAND {
            return Err(Error::ValueOutOfRange {
                what: "source weight",
                value: weight,
            });
        }
        Ok(WeightedSource {
            distribution,
            weight: weight.clamp(0.0, 1.0),
        })
    }

    /// The source distribution.
    pub fn distribution(&self) -> &PossibilityDistribution {
        &self.distribution
    }

    /// The reliability weight.
    pub fn weight(&self) -> f64 {
        self.weight
    }
}

/// A possibility distribution on a finite frame: one degree in `[0, 1]`
/// per element, reaching exactly 1 somewhere unless explicitly built with
/// [`PossibilityDistribution::unnormalized`].
///
/// Peaks within [`NORMALIZATION_BAND`] of 1 are repaired by rescaling at
/// construction (peaks already within [`NORMALIZATION_SLACK`] are kept as
/// given); lower peaks are rejected by the normalized constructor.
#[derive(Clone, Debug, PartialEq)]
pub struct PossibilityDistribution {
    frame: Frame,
    values: Vec<f64>,
}

impl PossibilityDistribution {
    fn check_range(values: &[f64], frame: &Frame) -> Result<()> {
        if values.len() != frame.size() {
            return Err(Error::LengthMismatch {
                expected: frame.size(),
                found: values.len(),
            });
        }
        for &v in values {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::NegativeValue {
                    what: "possibility degree",
                    value: v,
                });
            }
            if v > 1.0 + NORMALIZATION_BAND {
                return Err(Error::ValueOutOfRange {
                    what: "possibility degree",
                    value: v,
                });
            }
        }
        Ok(())
    }

    /// Builds a normalized distribution from one degree per frame element.
    pub fn new(frame: Frame, values: Vec<f64>) -> Result<Self> {
        Self::check_range(&values, &frame)?;
        let mut values: Vec<f64> = values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
        let max = values.iter().copied().fold(0.0, f64::max);
        if libm::fabs(max - 1.0) > NORMALIZATION_BAND {
            return Err(Error::PossibilityNormalization { max });
        }
        if libm::fabs(max - 1.0) > NORMALIZATION_SLACK {
            for v in &mut values {
                *v /= max;
            }
        }
        Ok(PossibilityDistribution { frame, values })
    }

    /// Builds a distribution without requiring it to reach 1.
    ///
    /// Rule implementations use this to hand back subnormal results next
    /// to an [`Warning::UnnormalizedResult`]; the degrees themselves must
    /// still lie in `[0, 1]`.
    pub fn unnormalized(frame: Frame, values: Vec<f64>) -> Result<Self> {
        Self::check_range(&values, &frame)?;
        let values = values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
        Ok(PossibilityDistribution { frame, values })
    }

    /// Builds a distribution from `(label, degree)` pairs; elements that
    /// are not mentioned get degree 0.
    pub fn from_labeled<I, S>(frame: Frame, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: AsRef<str>,
    {
        let mut values = vec![0.0; frame.size()];
        let mut seen = vec![false; frame.size()];
        for (label, v) in entries {
            let label = label.as_ref();
            let idx = frame.index_of(label).ok_or_else(|| Error::UnknownElement {
                label: alloc::string::String::from(label),
            })?;
            if seen[idx] {
                return Err(Error::DuplicateLabel {
                    label: alloc::string::String::from(label),
                });
            }
            seen[idx] = true;
            values[idx] = v;
        }
        Self::new(frame, values)
    }

    /// The crisp distribution of a non-empty event: 1 inside, 0 outside.
    pub fn indicator(event: &Subset) -> Result<Self> {
        if event.is_empty() {
            return Err(Error::EmptySet);
        }
        let frame = event.frame().clone();
        let values = (0..frame.size())
            .map(|i| if event.contains_index(i) { 1.0 } else { 0.0 })
            .collect();
        Ok(PossibilityDistribution { frame, values })
    }

    /// The vacuous distribution: everything fully possible.
    pub fn vacuous(frame: Frame) -> Self {
        let values = vec![1.0; frame.size()];
        PossibilityDistribution { frame, values }
    }

    /// The frame this distribution is defined over.
    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// The degrees in frame order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Degree of the element at `index`.
    ///
    /// # Panics
    /// Panics if `index` is out of bounds.
    pub fn value(&self, index: usize) -> f64 {
        self.values[index]
    }

    /// Whether the distribution reaches exactly 1.
    pub fn is_normalized(&self) -> bool {
        self.values.contains(&1.0)
    }

    /// Possibility of an event: the largest degree inside it.
    pub fn possibility_of(&self, event: &Subset) -> Result<f64> {
        self.frame.ensure_compatible(event.frame())?;
        Ok(event
            .member_indices()
            .map(|i| self.values[i])
            .fold(0.0, f64::max))
    }

    /// Necessity of an event: `1 - Poss(not event)`.
    pub fn necessity_of(&self, event: &Subset) -> Result<f64> {
        Ok(1.0 - self.possibility_of(&event.complement())?)
    }

    /// The fully possible worlds, `{w : pi(w) = 1}`.
    pub fn core(&self) -> Subset {
        let mut core = self.frame.empty();
        let bits = {
            let mut b = core.bits().clone();
            for (i, &v) in self.values.iter().enumerate() {
                if v == 1.0 {
                    b.insert(i);
                }
            }
            b
        };
        core = self.frame.subset_from_bits(bits);
        core
    }

    /// The worlds of positive possibility, `{w : pi(w) > 0}`.
    pub fn support(&self) -> Subset {
        let mut bits = self.frame.empty().bits().clone();
        for (i, &v) in self.values.iter().enumerate() {
            if v > 0.0 {
                bits.insert(i);
            }
        }
        self.frame.subset_from_bits(bits)
    }

    /// The level cut `{w : pi(w) >= alpha}`.
    pub fn level_cut(&self, alpha: f64) -> Subset {
        let mut bits = self.frame.empty().bits().clone();
        for (i, &v) in self.values.iter().enumerate() {
            if v >= alpha {
                bits.insert(i);
            }
        }
        self.frame.subset_from_bits(bits)
    }

    /// The distinct positive degrees, ascending.
    pub fn distinct_positive_values(&self) -> Vec<f64> {
        let mut levels: Vec<f64> = self.values.iter().copied().filter(|&v| v > 0.0).collect();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        levels
    }

    /// The nested family of level cuts, one per distinct positive degree,
    /// ascending in `alpha`.
    pub fn level_cuts(&self) -> Vec<LevelCut> {
        self.distinct_positive_values()
            .into_iter()
            .map(|alpha| LevelCut {
                alpha,
                cut: self.level_cut(alpha),
            })
            .collect()
    }

    /// Conditions on an event learned with certainty: rescales inside,
    /// zeroes outside.
    ///
    /// Undefined when `Poss(event)` is not strictly positive at `tol`.
    pub fn condition(&self, event: &Subset, tol: Tolerance) -> Result<Self> {
        self.frame.ensure_compatible(event.frame())?;
        let poss = self.possibility_of(event)?;
        if !tol.positive(poss) {
            return Err(Error::ConditioningUndefined {
                rule: "possibilistic",
                detail: alloc::format!("possibility of {event} is {poss}"),
            });
        }
        let values = (0..self.frame.size())
            .map(|i| {
                if event.contains_index(i) {
                    self.values[i] / poss
                } else {
                    0.0
                }
            })
            .collect();
        Ok(PossibilityDistribution {
            frame: self.frame.clone(),
            values,
        })
    }

    /// Symmetric conjunctive combination of two sources: pointwise `op`,
    /// renormalized by the supremum.
    ///
    /// Fails with [`Error::TotalConflict`] when the supremum is not
    /// strictly positive at `tol`.
    pub fn combine(&self, other: &Self, op: ConjunctionOp, tol: Tolerance) -> Result<Self> {
        self.frame.ensure_compatible(&other.frame)?;
        let raw: Vec<f64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| op.apply(a, b))
            .collect();
        let sup = raw.iter().copied().fold(0.0, f64::max);
        if !tol.positive(sup) {
            return Err(Error::TotalConflict);
        }
        let values = raw.into_iter().map(|v| v / sup).collect();
        Ok(PossibilityDistribution {
            frame: self.frame.clone(),
            values,
        })
    }

    /// Weighted-maximum aggregation of several sources:
    ///
    /// ```text
    /// pi(w) = max over sources j of  op(lambda_j, pi_j(w)),
    /// ```
    ///
    /// where `lambda_j` grades the reliability of source `j`. The largest
    /// weight must be 1 (within `tol`), which keeps the result normalized.
    pub fn aggregate_weighted_max(
        sources: &[WeightedSource],
        op: ConjunctionOp,
        tol: Tolerance,
    ) -> Result<Self> {
        let first = sources.first().ok_or(Error::LengthMismatch {
            expected: 1,
            found: 0,
        })?;
        let frame = first.distribution.frame.clone();
        let mut max_weight = 0.0f64;
        for source in sources {
            frame.ensure_compatible(&source.distribution.frame)?;
            max_weight = max_weight.max(source.weight);
        }
        if !tol.close(max_weight, 1.0) {
            return Err(Error::WeightNormalization {
                mode: NormalizationMode::Max,
                actual: max_weight,
            });
        }
        let values: Vec<f64> = (0..frame.size())
            .map(|i| {
                sources
                    .iter()
                    .map(|s| op.apply(s.weight, s.distribution.values[i]))
                    .fold(0.0, f64::max)
            })
            .collect();
        Self::new(frame, values)
    }

    /// Shared tail of the Jeffrey-style updates: decide between a
    /// normalized result and a subnormal one carrying a warning.
    fn updated_from_raw(&self, raw: Vec<f64>) -> Result<Updated> {
        let max = raw.iter().copied().fold(0.0, f64::max);
        if max <= 0.0 {
            return Err(Error::TotalConflict);
        }
        if max >= 1.0 - NORMALIZATION_BAND {
            let values = raw.into_iter().map(|v| (v / max).clamp(0.0, 1.0)).collect();
            Ok(Updated {
                distribution: PossibilityDistribution {
                    frame: self.frame.clone(),
                    values,
                },
                warning: None,
            })
        } else {
            Ok(Updated {
                distribution: PossibilityDistribution {
                    frame: self.frame.clone(),
                    values: raw,
                },
                warning: Some(Warning::UnnormalizedResult { max }),
            })
        }
    }

    fn ensure_overlapping_support(&self, observation: &Self, tol: Tolerance) -> Result<()> {
        let overlap = self
            .values
            .iter()
            .zip(&observation.values)
            .any(|(&a, &b)| tol.positive(a) && tol.positive(b));
        if overlap {
            Ok(())
        } else {
            Err(Error::TotalConflict)
        }
    }

    /// The possibilistic Jeffrey rule with the standard `min` outer
    /// combination. See [`PossibilityDistribution::jeffrey_update_with`].
    pub fn jeffrey_update(&self, observation: &Self, tol: Tolerance) -> Result<Updated> {
        self.jeffrey_update_with(observation, UpdateCombination::Min, tol)
    }

    /// The possibilistic Jeffrey rule in closed form,
    ///
    /// ```text
    /// [pi1 | pi2](w) = outer( pi2(w),  pi1(w) / Poss1({pi2 >= pi2(w)}) ),
    /// ```
    ///
    /// with `0/0` read as 0. Fails with [`Error::TotalConflict`] when the
    /// supports of prior and observation are disjoint at `tol`; a result
    /// that cannot reach 1 is returned subnormal with a warning attached.
    pub fn jeffrey_update_with(
        &self,
        observation: &Self,
        outer: UpdateCombination,
        tol: Tolerance,
    ) -> Result<Updated> {
        self.frame.ensure_compatible(&observation.frame)?;
        self.ensure_overlapping_support(observation, tol)?;
        let n = self.frame.size();
        let mut raw = vec![0.0; n];
        for (w, slot) in raw.iter_mut().enumerate() {
            let alpha = observation.values[w];
            if alpha <= 0.0 {
                continue;
            }
            let mut poss_cut = 0.0f64;
            for i in 0..n {
                if observation.values[i] >= alpha {
                    poss_cut = poss_cut.max(self.values[i]);
                }
            }
            if poss_cut <= 0.0 {
                continue; // 0/0 convention: the cut carries no prior possibility
            }
            *slot = outer.apply(alpha, self.values[w] / poss_cut);
        }
        self.updated_from_raw(raw)
    }

    /// The possibilistic Jeffrey rule evaluated literally as a supremum
    /// over the observation's level cuts:
    ///
    /// ```text
    /// [pi1 | pi2](w) = sup over cuts B with w in B of
    ///                      min( level(B),  pi1(w) / Poss1(B) ).
    /// ```
    ///
    /// Only the distinct positive levels of the observation matter, so the
    /// supremum is exact. Kept as an independent route for cross-checking
    /// the closed form; both agree everywhere.
    pub fn jeffrey_update_by_cuts(&self, observation: &Self, tol: Tolerance) -> Result<Updated> {
        self.frame.ensure_compatible(&observation.frame)?;
        self.ensure_overlapping_support(observation, tol)?;
        let n = self.frame.size();
        let mut raw = vec![0.0; n];
        for level_cut in observation.level_cuts() {
            let poss_cut = self.possibility_of(&level_cut.cut)?;
            if poss_cut <= 0.0 {
                continue;
            }
            for w in level_cut.cut.member_indices() {
                let value = level_cut.alpha.min(self.values[w] / poss_cut);
                if value > raw[w] {
                    raw[w] = value;
                }
            }
        }
        self.updated_from_raw(raw)
    }

    /// Updating on "the truth is in `event`" held with residual doubt
    /// `lambda`: the observation says worlds in the event are fully
    /// possible and those outside are still possible to degree `lambda`.
    ///
    /// For `lambda < 1` this is the Jeffrey update on the observation
    /// `max(indicator(event), lambda)`, and reduces to the closed form
    ///
    /// ```text
    /// pi'(w) = max( pi(w) / Poss(event)  [w in event],
    ///               min(lambda, pi(w)) ),
    /// ```
    ///
    /// which needs `Poss(event) > 0`. With `lambda >= 1` the observation
    /// says nothing and the prior is returned unchanged.
    pub fn update_crisp_with_doubt(
        &self,
        event: &Subset,
        lambda: f64,
        tol: Tolerance,
    ) -> Result<Self> {
        self.frame.ensure_compatible(event.frame())?;
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::NegativeValue {
                what: "doubt level",
                value: lambda,
            });
        }
        if lambda > 1.0 + NORMALIZATION_BAND {
            return Err(Error::ValueOutOfRange {
                what: "doubt level",
                value: lambda,
            });
        }
        if lambda >= 1.0 {
            return Ok(self.clone());
        }
        let poss = self.possibility_of(event)?;
        if !tol.positive(poss) {
            return Err(Error::ConditioningUndefined {
                rule: "crisp-with-doubt",
                detail: alloc::format!("possibility of {event} is {poss}"),
            });
        }
        let values = (0..self.frame.size())
            .map(|i| {
                let inside = if event.contains_index(i) {
                    self.values[i] / poss
                } else {
                    0.0
                };
                inside.max(lambda.min(self.values[i]))
            })
            .collect();
        Ok(PossibilityDistribution {
            frame: self.frame.clone(),
            values,
        })
    }
}

impl fmt::Display for PossibilityDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pi{{")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}: {v}", self.frame.label(i))?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn abc() -> Frame {
        Frame::new(["a", "b", "c"]).unwrap()
    }

    fn dist(frame: &Frame, values: &[f64]) -> PossibilityDistribution {
        PossibilityDistribution::new(frame.clone(), values.to_vec()).unwrap()
    }

    #[test]
    fn possibility_and_necessity_are_dual() {
        let f = abc();
        let pi = dist(&f, &[1.0, 0.5, 0.2]);
        for s in f.subsets().unwrap() {
            let nec = pi.necessity_of(&s).unwrap();
            let poss_comp = pi.possibility_of(&s.complement()).unwrap();
            assert!((nec - (1.0 - poss_comp)).abs() < 1e-12, "duality at {s}");
        }
        let ab = f.subset(["a", "b"]).unwrap();
        assert!((pi.necessity_of(&ab).unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn possibility_is_maxitive() {
        let f = abc();
        let pi = dist(&f, &[1.0, 0.5, 0.2]);
        for s in f.subsets().unwrap() {
            for t in f.subsets().unwrap() {
                let lhs = pi.possibility_of(&s.union(&t).unwrap()).unwrap();
                let rhs = pi
                    .possibility_of(&s)
                    .unwrap()
                    .max(pi.possibility_of(&t).unwrap());
                assert!((lhs - rhs).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn conditioning_rescales_the_inside() {
        let f = abc();
        let pi = dist(&f, &[1.0, 0.5, 0.2]);
        let bc = f.subset(["b", "c"]).unwrap();
        let post = pi.condition(&bc, tol()).unwrap();
        assert_eq!(post.value(0), 0.0);
        assert!((post.value(1) - 1.0).abs() < 1e-15);
        assert!((post.value(2) - 0.4).abs() < 1e-15);
        assert!(post.is_normalized());
    }

    #[test]
    fn conditioning_on_an_impossible_event_is_undefined() {
        let f = abc();
        let pi = dist(&f, &[1.0, 0.5, 0.0]);
        match pi.condition(&f.singleton("c").unwrap(), tol()) {
            Err(Error::ConditioningUndefined { rule, .. }) => assert_eq!(rule, "possibilistic"),
            other => panic!("expected ConditioningUndefined, got {other:?}"),
        }
    }

    #[test]
    fn combination_under_the_three_operators() {
        let f = abc();
        let pi1 = dist(&f, &[1.0, 0.5, 0.2]);
        let pi2 = dist(&f, &[0.3, 1.0, 0.1]);

        let min = pi1.combine(&pi2, ConjunctionOp::Min, tol()).unwrap();
        assert!((min.value(0) - 0.6).abs() < 1e-12);
        assert!((min.value(1) - 1.0).abs() < 1e-12);
        assert!((min.value(2) - 0.2).abs() < 1e-12);

        let product = pi1.combine(&pi2, ConjunctionOp::Product, tol()).unwrap();
        assert!((product.value(0) - 0.6).abs() < 1e-12);
        assert!((product.value(1) - 1.0).abs() < 1e-12);
        assert!((product.value(2) - 0.04).abs() < 1e-12);

        let luka = pi1.combine(&pi2, ConjunctionOp::Lukasiewicz, tol()).unwrap();
        assert!((luka.value(0) - 0.6).abs() < 1e-12);
        assert!((luka.value(1) - 1.0).abs() < 1e-12);
        assert!(luka.value(2).abs() < 1e-12);
    }

    #[test]
    fn combining_disjoint_certainties_is_total_conflict() {
        let f = abc();
        let on_a = PossibilityDistribution::indicator(&f.singleton("a").unwrap()).unwrap();
        let on_b = PossibilityDistribution::indicator(&f.singleton("b").unwrap()).unwrap();
        assert_eq!(
            on_a.combine(&on_b, ConjunctionOp::Min, tol()),
            Err(Error::TotalConflict)
        );
    }

    #[test]
    fn min_combination_with_an_indicator_is_conditioning() {
        let f = abc();
        let pi = dist(&f, &[1.0, 0.5, 0.2]);
        let bc = f.subset(["b", "c"]).unwrap();
        let crisp = PossibilityDistribution::indicator(&bc).unwrap();
        let combined = pi.combine(&crisp, ConjunctionOp::Min, tol()).unwrap();
        let conditioned = pi.condition(&bc, tol()).unwrap();
        assert_eq!(combined.values(), conditioned.values());
    }

    #[test]
    fn weighted_max_aggregation() {
        let f = Frame::new(["a", "b"]).unwrap();
        let s1 = WeightedSource::new(
            PossibilityDistribution::indicator(&f.singleton("a").unwrap()).unwrap(),
            1.0,
        )
        .unwrap();
        let s2 = WeightedSource::new(
            PossibilityDistribution::indicator(&f.singleton("b").unwrap()).unwrap(),
            0.5,
        )
        .unwrap();
        let pooled = PossibilityDistribution::aggregate_weighted_max(
            &[s1.clone(), s2.clone()],
            ConjunctionOp::Min,
            tol(),
        )
        .unwrap();
        assert!((pooled.value(0) - 1.0).abs() < 1e-15);
        assert!((pooled.value(1) - 0.5).abs() < 1e-15);

        // Without a fully reliable source the weights are rejected.
        let down = WeightedSource::new(s1.distribution().clone(), 0.8).unwrap();
        match PossibilityDistribution::aggregate_weighted_max(
            &[down, s2],
            ConjunctionOp::Min,
            tol(),
        ) {
            Err(Error::WeightNormalization { mode, actual }) => {
                assert_eq!(mode, NormalizationMode::Max);
                assert!((actual - 0.8).abs() < 1e-12);
            }
            other => panic!("expected WeightNormalization, got {other:?}"),
        }
    }

    #[test]
    fn jeffrey_update_matches_the_hand_computed_example() {
        let f = abc();
        let pi1 = dist(&f, &[1.0, 0.5, 0.2]);
        let pi2 = dist(&f, &[0.3, 1.0, 0.4]);
        let updated = pi1.jeffrey_update(&pi2, tol()).unwrap();
        assert!(updated.warning.is_none());
        // Cut at 0.3 holds everything, cut at 1 holds {b}, cut at 0.4 holds {b, c}.
        assert!((updated.distribution.value(0) - 0.3).abs() < 1e-15);
        assert!((updated.distribution.value(1) - 1.0).abs() < 1e-15);
        assert!((updated.distribution.value(2) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn jeffrey_update_closed_form_equals_the_cut_supremum() {
        let f = abc();
        let pi1 = dist(&f, &[1.0, 0.5, 0.2]);
        let pi2 = dist(&f, &[0.3, 1.0, 0.4]);
        let compact = pi1.jeffrey_update(&pi2, tol()).unwrap();
        let by_cuts = pi1.jeffrey_update_by_cuts(&pi2, tol()).unwrap();
        assert_eq!(compact.distribution.values(), by_cuts.distribution.values());
        assert_eq!(compact.warning, by_cuts.warning);
    }

    #[test]
    fn jeffrey_update_reports_subnormal_results_without_rescaling() {
        let f = abc();
        let pi1 = dist(&f, &[1.0, 0.5, 0.0]);
        let pi2 = dist(&f, &[0.0, 0.4, 1.0]);
        // The prior rules out the observation's core {c}; the best
        // remaining world is b at level 0.4.
        let updated = pi1.jeffrey_update(&pi2, tol()).unwrap();
        assert_eq!(
            updated.warning,
            Some(Warning::UnnormalizedResult { max: 0.4 })
        );
        assert_eq!(updated.distribution.value(0), 0.0);
        assert!((updated.distribution.value(1) - 0.4).abs() < 1e-15);
        assert_eq!(updated.distribution.value(2), 0.0);
        assert!(!updated.distribution.is_normalized());
    }

    #[test]
    fn jeffrey_update_with_disjoint_supports_is_total_conflict() {
        let f = abc();
        let pi1 = dist(&f, &[1.0, 0.0, 0.0]);
        let pi2 = dist(&f, &[0.0, 1.0, 0.5]);
        assert_eq!(pi1.jeffrey_update(&pi2, tol()), Err(Error::TotalConflict));
    }

    #[test]
    fn jeffrey_update_with_a_vacuous_observation_changes_nothing() {
        let f = abc();
        let pi1 = dist(&f, &[1.0, 0.5, 0.2]);
        let vacuous = PossibilityDistribution::vacuous(f.clone());
        let updated = pi1.jeffrey_update(&vacuous, tol()).unwrap();
        assert_eq!(updated.distribution.values(), pi1.values());
        assert!(updated.warning.is_none());
    }

    #[test]
    fn crisp_with_doubt_matches_the_hand_computed_example() {
        let f = abc();
        let pi = dist(&f, &[0.4, 1.0, 0.5]);
        let ac = f.subset(["a", "c"]).unwrap();
        let post = pi.update_crisp_with_doubt(&ac, 0.3, tol()).unwrap();
        assert!((post.value(0) - 0.8).abs() < 1e-15);
        assert!((post.value(1) - 0.3).abs() < 1e-15);
        assert!((post.value(2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn crisp_with_doubt_agrees_with_the_jeffrey_route() {
        let f = abc();
        let pi = dist(&f, &[0.4, 1.0, 0.5]);
        let ac = f.subset(["a", "c"]).unwrap();
        let lambda = 0.3;
        let closed = pi.update_crisp_with_doubt(&ac, lambda, tol()).unwrap();
        let observation = PossibilityDistribution::new(
            f.clone(),
            (0..f.size())
                .map(|i| if ac.contains_index(i) { 1.0 } else { lambda })
                .collect(),
        )
        .unwrap();
        let via_jeffrey = pi.jeffrey_update(&observation, tol()).unwrap();
        assert!(via_jeffrey.warning.is_none());
        assert_eq!(closed.values(), via_jeffrey.distribution.values());
    }

    #[test]
    fn crisp_with_total_doubt_changes_nothing() {
        let f = abc();
        let pi = dist(&f, &[0.4, 1.0, 0.5]);
        // With lambda = 1 the observation is vacuous, even on an event of
        // possibility 0.
        let dead = f.singleton("a").unwrap();
        let zeroed = dist(&f, &[0.0, 1.0, 0.5]);
        let post = zeroed.update_crisp_with_doubt(&dead, 1.0, tol()).unwrap();
        assert_eq!(post.values(), zeroed.values());
        // With lambda < 1 the closed form needs Poss(event) > 0.
        assert!(matches!(
            zeroed.update_crisp_with_doubt(&dead, 0.5, tol()),
            Err(Error::ConditioningUndefined { .. })
        ));
        // Out-of-range doubt is rejected.
        assert!(matches!(
            pi.update_crisp_with_doubt(&dead, 1.5, tol()),
            Err(Error::ValueOutOfRange { .. })
        ));
        assert!(matches!(
            pi.update_crisp_with_doubt(&dead, -0.1, tol()),
            Err(Error::NegativeValue { .. })
        ));
    }

    #[test]
    fn construction_validates_and_repairs() {
        let f = abc();
        match PossibilityDistribution::new(f.clone(), vec![0.8, 0.5, 0.1]) {
            Err(Error::PossibilityNormalization { max }) => assert!((max - 0.8).abs() < 1e-12),
            other => panic!("expected PossibilityNormalization, got {other:?}"),
        }
        assert!(matches!(
            PossibilityDistribution::new(f.clone(), vec![1.0, 1.2, 0.0]),
            Err(Error::ValueOutOfRange { .. })
        ));
        assert!(matches!(
            PossibilityDistribution::new(f.clone(), vec![1.0, -0.2, 0.0]),
            Err(Error::NegativeValue { .. })
        ));
        assert!(matches!(
            PossibilityDistribution::new(f.clone(), vec![1.0, 0.5]),
            Err(Error::LengthMismatch {
                expected: 3,
                found: 2
            })
        ));
        // A peak within the repair band is rescaled to exactly 1.
        let repaired =
            PossibilityDistribution::new(f.clone(), vec![0.99999995, 0.5, 0.0]).unwrap();
        assert!(repaired.is_normalized());
        // A peak off by no more than the slack is kept verbatim.
        let kept =
            PossibilityDistribution::new(f.clone(), vec![0.9999999999995, 0.5, 0.0]).unwrap();
        assert_eq!(kept.value(0), 0.9999999999995);
        // The relaxed constructor keeps subnormal peaks as they are.
        let sub = PossibilityDistribution::unnormalized(f, vec![0.8, 0.5, 0.1]).unwrap();
        assert!(!sub.is_normalized());
        assert_eq!(sub.value(0), 0.8);
    }

    #[test]
    fn cores_supports_and_cuts() {
        let f = abc();
        let pi = dist(&f, &[1.0, 0.5, 0.0]);
        assert_eq!(pi.core(), f.singleton("a").unwrap());
        assert_eq!(pi.support(), f.subset(["a", "b"]).unwrap());
        assert_eq!(pi.level_cut(0.5), f.subset(["a", "b"]).unwrap());
        assert_eq!(pi.level_cut(0.6), f.singleton("a").unwrap());
        let cuts = pi.level_cuts();
        assert_eq!(cuts.len(), 2);
        assert_eq!(cuts[0].alpha, 0.5);
        assert_eq!(cuts[0].cut, f.subset(["a", "b"]).unwrap());
        assert_eq!(cuts[1].alpha, 1.0);
        assert_eq!(cuts[1].cut, f.singleton("a").unwrap());
        assert_eq!(pi.level_cut(0.0), f.full());
    }
}
