//! Dempster-Shafer evidence theory: mass functions, belief and
//! plausibility, conditioning, combination, and Jeffrey-style updating.
//!
//! A mass function `m` distributes unit weight over non-empty *focal*
//! subsets of the frame. It induces the dual pair
//!
//! ```text
//! Bel(B) = sum of m(A) over non-empty A contained in B,
//! Pl(B)  = sum of m(A) over A meeting B,        Bel(B) = 1 - Pl(not B),
//! ```
//!
//! read as the provable and the merely consistent support for `B`.
//!
//! Learning an event `A` for sure admits several inequivalent rules, all
//! implemented here:
//!
//! * **Dempster conditioning** moves each focal `C` to `C ∩ A`, drops what
//!   vanishes, and renormalizes by `Pl(A)` — the result is the plausible
//!   part of the evidence given `A`.
//! * **Geometric conditioning** keeps only the focals already inside `A`
//!   and renormalizes by `Bel(A)` — the provable part.
//! * **Upper/lower conditioning** brackets the Bayesian posteriors of
//!   every probability compatible with `m`; it yields an interval per
//!   query, not a new mass function. [`MassFunction::credal_oracle`]
//!   recomputes the same bounds by brute force over all selections of the
//!   focal masses and serves as the ground truth in the test suites.
//!
//! Independent evidence merges via Dempster's rule of combination, and an
//! unreliable observation — itself a mass function over the same frame —
//! updates the prior through the Jeffrey-style mixture
//! [`MassFunction::jeffrey_update`], which weighs the Dempster
//! conditionals of the prior by the observation's masses.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::frame::{Bits, Frame, Subset};
use crate::probability::ProbabilityMeasure;
use crate::{Tolerance, NORMALIZATION_BAND, NORMALIZATION_SLACK};

/// How to condition a mass function on an event learned with certainty.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConditioningRule {
    /// Transfer focals onto the event and renormalize by plausibility.
    Dempster,
    /// Keep focals inside the event and renormalize by belief.
    Geometric,
    /// Upper envelope of the compatible Bayesian posteriors.
    Upper,
    /// Lower envelope of the compatible Bayesian posteriors.
    Lower,
}

impl fmt::Display for ConditioningRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditioningRule::Dempster => write!(f, "dempster"),
            ConditioningRule::Geometric => write!(f, "geometric"),
            ConditioningRule::Upper => write!(f, "upper"),
            ConditioningRule::Lower => write!(f, "lower"),
        }
    }
}

/// Outcome of [`MassFunction::condition`]: either a new mass function or,
/// for the envelope rules, an interval-valued valuation.
#[derive(Clone, Debug)]
pub enum Conditioned {
    /// Dempster or geometric conditioning produced a mass function.
    Mass(MassFunction),
    /// Upper/lower conditioning produced per-query probability bounds.
    Interval(IntervalValuation),
}

/// A Dempster-Shafer mass function: positive weight on non-empty focal
/// subsets, summing to 1.
///
/// Totals within [`NORMALIZATION_BAND`] of 1 are repaired by rescaling at
/// construction (totals already within [`NORMALIZATION_SLACK`] are kept as
/// given); anything further out is rejected. Focal sets iterate in a
/// stable order, so all derived quantities are deterministic.
#[derive(Clone, Debug, PartialEq)]
pub struct MassFunction {
    frame: Frame,
    focal: BTreeMap<Bits, f64>,
}

impl MassFunction {
    /// Builds a mass function from `(subset, mass)` pairs.
    ///
    /// Duplicate subsets merge additively, exact zeros are dropped, the
    /// empty set is rejected if it carries positive mass, and the total is
    /// repaired or rejected as described on the type.
    pub fn new<I>(frame: Frame, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Subset, f64)>,
    {
        let mut focal: BTreeMap<Bits, f64> = BTreeMap::new();
        for (subset, mass) in entries {
            frame.ensure_compatible(subset.frame())?;
            if !mass.is_finite() || mass < 0.0 {
                return Err(Error::NegativeValue {
                    what: "focal mass",
                    value: mass,
                });
            }
            if mass == 0.0 {
                continue;
            }
            if subset.is_empty() {
                return Err(Error::EmptyFocal);
            }
            *focal.entry(subset.bits().clone()).or_insert(0.0) += mass;
        }
        let sum: f64 = focal.values().sum();
        if libm::fabs(sum - 1.0) > NORMALIZATION_BAND {
            return Err(Error::MassNormalization { sum });
        }
        if libm::fabs(sum - 1.0) > NORMALIZATION_SLACK {
            for mass in focal.values_mut() {
                *mass /= sum;
            }
        }
        Ok(MassFunction { frame, focal })
    }

    /// The vacuous mass function: all weight on the whole frame.
    pub fn vacuous(frame: Frame) -> Self {
        let mut focal = BTreeMap::new();
        focal.insert(frame.full().bits().clone(), 1.0);
        MassFunction { frame, focal }
    }

    /// The categorical mass function: all weight on one non-empty subset.
    pub fn categorical(subset: &Subset) -> Result<Self> {
        if subset.is_empty() {
            return Err(Error::EmptyFocal);
        }
        let mut focal = BTreeMap::new();
        focal.insert(subset.bits().clone(), 1.0);
        Ok(MassFunction {
            frame: subset.frame().clone(),
            focal,
        })
    }

    /// The Bayesian mass function matching a probability measure: one
    /// focal singleton per element of positive probability.
    pub fn from_probability(p: &ProbabilityMeasure) -> Self {
        let frame = p.frame().clone();
        let mut focal = BTreeMap::new();
        for (i, &w) in p.weights().iter().enumerate() {
            if w > 0.0 {
                let mut bits = Bits::empty(frame.size());
                bits.insert(i);
                focal.insert(bits, w);
            }
        }
        MassFunction { frame, focal }
    }

    /// Whether every focal element is a singleton.
    pub fn is_bayesian(&self) -> bool {
        self.focal.keys().all(|bits| bits.count() == 1)
    }

    /// Reads a Bayesian mass function back as a probability measure.
    pub fn to_probability(&self) -> Result<ProbabilityMeasure> {
        if !self.is_bayesian() {
            return Err(Error::NotBayesian);
        }
        let mut weights = alloc::vec![0.0; self.frame.size()];
        for (bits, &mass) in &self.focal {
            for (i, weight) in weights.iter_mut().enumerate() {
                if bits.contains(i) {
                    *weight = mass;
                }
            }
        }
        ProbabilityMeasure::new(self.frame.clone(), weights)
    }

    /// The frame this mass function is defined over.
    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// Number of focal elements.
    pub fn focal_count(&self) -> usize {
        self.focal.len()
    }

    /// The `(focal subset, mass)` pairs in stable order.
    pub fn focals(&self) -> impl Iterator<Item = (Subset, f64)> + '_ {
        self.focal
            .iter()
            .map(|(bits, &mass)| (self.frame.subset_from_bits(bits.clone()), mass))
    }

    /// Mass of a specific subset (0 unless it is focal).
    pub fn mass(&self, subset: &Subset) -> Result<f64> {
        self.frame.ensure_compatible(subset.frame())?;
        Ok(self.focal.get(subset.bits()).copied().unwrap_or(0.0))
    }

    fn belief_bits(&self, bits: &Bits) -> f64 {
        self.focal
            .iter()
            .filter(|(a, _)| a.subset_of(bits))
            .map(|(_, &m)| m)
            .sum()
    }

    fn plausibility_bits(&self, bits: &Bits) -> f64 {
        self.focal
            .iter()
            .filter(|(a, _)| !a.and(bits).is_empty())
            .map(|(_, &m)| m)
            .sum()
    }

    /// Belief in an event: the total mass provably inside it.
    pub fn belief(&self, event: &Subset) -> Result<f64> {
        self.frame.ensure_compatible(event.frame())?;
        Ok(self.belief_bits(event.bits()))
    }

    /// Plausibility of an event: the total mass consistent with it.
    pub fn plausibility(&self, event: &Subset) -> Result<f64> {
        self.frame.ensure_compatible(event.frame())?;
        Ok(self.plausibility_bits(event.bits()))
    }

    /// Normalizes an accumulated focal map, prunes masses below `tol`, and
    /// renormalizes the remainder so the invariant holds exactly.
    fn finalize(frame: Frame, mut focal: BTreeMap<Bits, f64>, tol: Tolerance) -> Result<Self> {
        let sum: f64 = focal.values().sum();
        if sum <= 0.0 {
            return Err(Error::TotalConflict);
        }
        for mass in focal.values_mut() {
            *mass /= sum;
        }
        focal.retain(|_, mass| *mass >= tol.eps());
        let kept: f64 = focal.values().sum();
        if kept <= 0.0 {
            return Err(Error::TotalConflict);
        }
        for mass in focal.values_mut() {
            *mass /= kept;
        }
        Ok(MassFunction { frame, focal })
    }

    /// Dempster conditionals of every focal given `event`, normalized but
    /// not yet pruned: the mass of each focal moves to its intersection
    /// with the event, and the survivors are rescaled by `Pl(event)`.
    fn dempster_conditional_map(
        &self,
        event: &Subset,
        tol: Tolerance,
        rule: &'static str,
    ) -> Result<BTreeMap<Bits, f64>> {
        let pl = self.plausibility_bits(event.bits());
        if !tol.positive(pl) {
            return Err(Error::ConditioningUndefined {
                rule,
                detail: format!("plausibility of {event} is {pl}"),
            });
        }
        let mut out: BTreeMap<Bits, f64> = BTreeMap::new();
        for (bits, &mass) in &self.focal {
            let inter = bits.and(event.bits());
            if !inter.is_empty() {
                *out.entry(inter).or_insert(0.0) += mass;
            }
        }
        let sum: f64 = out.values().sum();
        for mass in out.values_mut() {
            *mass /= sum;
        }
        Ok(out)
    }

    /// Geometric conditionals of every focal given `event`: focals inside
    /// the event survive, rescaled by `Bel(event)`.
    fn geometric_conditional_map(
        &self,
        event: &Subset,
        tol: Tolerance,
        rule: &'static str,
    ) -> Result<BTreeMap<Bits, f64>> {
        let bel = self.belief_bits(event.bits());
        if !tol.positive(bel) {
            return Err(Error::ConditioningUndefined {
                rule,
                detail: format!("belief in {event} is {bel}"),
            });
        }
        let mut out: BTreeMap<Bits, f64> = BTreeMap::new();
        for (bits, &mass) in &self.focal {
            if bits.subset_of(event.bits()) {
                out.insert(bits.clone(), mass);
            }
        }
        let sum: f64 = out.values().sum();
        for mass in out.values_mut() {
            *mass /= sum;
        }
        Ok(out)
    }

    /// Dempster conditioning on an event learned with certainty.
    ///
    /// Undefined when `Pl(event)` is not strictly positive at `tol`.
    pub fn condition_dempster(&self, event: &Subset, tol: Tolerance) -> Result<Self> {
        self.frame.ensure_compatible(event.frame())?;
        let map = self.dempster_conditional_map(event, tol, "dempster")?;
        Self::finalize(self.frame.clone(), map, tol)
    }

    /// Geometric conditioning on an event learned with certainty.
    ///
    /// Undefined when `Bel(event)` is not strictly positive at `tol`.
    pub fn condition_geometric(&self, event: &Subset, tol: Tolerance) -> Result<Self> {
        self.frame.ensure_compatible(event.frame())?;
        let map = self.geometric_conditional_map(event, tol, "geometric")?;
        Self::finalize(self.frame.clone(), map, tol)
    }

    /// Conditions by the requested rule; the envelope rules return an
    /// interval-valued valuation instead of a mass function.
    pub fn condition(
        &self,
        event: &Subset,
        rule: ConditioningRule,
        tol: Tolerance,
    ) -> Result<Conditioned> {
        match rule {
            ConditioningRule::Dempster => self
                .condition_dempster(event, tol)
                .map(Conditioned::Mass),
            ConditioningRule::Geometric => self
                .condition_geometric(event, tol)
                .map(Conditioned::Mass),
            ConditioningRule::Upper | ConditioningRule::Lower => {
                self.frame.ensure_compatible(event.frame())?;
                Ok(Conditioned::Interval(IntervalValuation {
                    prior: self.clone(),
                    event: event.clone(),
                }))
            }
        }
    }

    /// Dempster's rule of combination for two independent sources.
    ///
    /// Fails with [`Error::TotalConflict`] when the conflict weight reaches
    /// 1 at `tol`.
    pub fn combine_dempster(&self, other: &MassFunction, tol: Tolerance) -> Result<Self> {
        self.frame.ensure_compatible(&other.frame)?;
        let mut out: BTreeMap<Bits, f64> = BTreeMap::new();
        let mut conflict = 0.0;
        for (a, &ma) in &self.focal {
            for (b, &mb) in &other.focal {
                let inter = a.and(b);
                if inter.is_empty() {
                    conflict += ma * mb;
                } else {
                    *out.entry(inter).or_insert(0.0) += ma * mb;
                }
            }
        }
        if !tol.positive(1.0 - conflict) {
            return Err(Error::TotalConflict);
        }
        Self::finalize(self.frame.clone(), out, tol)
    }

    /// Jeffrey-style updating on an unreliable observation, with Dempster
    /// conditioning inside: the posterior is the observation-weighted
    /// mixture of the prior's Dempster conditionals,
    ///
    /// ```text
    /// m'(B) = sum over focals A of obs of  obs(A) * m(B | A).
    /// ```
    ///
    /// Every focal of the observation must have strictly positive prior
    /// plausibility; the offending focal is named otherwise. With a
    /// categorical observation this is exactly Dempster conditioning, and
    /// on Bayesian priors with Bayesian observations it is Jeffrey's rule.
    pub fn jeffrey_update(&self, observation: &MassFunction, tol: Tolerance) -> Result<Self> {
        self.jeffrey_mixture(observation, tol, false)
    }

    /// The geometric variant of [`MassFunction::jeffrey_update`]: the same
    /// observation-weighted mixture, but with geometric conditionals
    /// inside. Every focal of the observation must have strictly positive
    /// prior belief.
    pub fn jeffrey_update_geometric(
        &self,
        observation: &MassFunction,
        tol: Tolerance,
    ) -> Result<Self> {
        self.jeffrey_mixture(observation, tol, true)
    }

    fn jeffrey_mixture(
        &self,
        observation: &MassFunction,
        tol: Tolerance,
        geometric: bool,
    ) -> Result<Self> {
        self.frame.ensure_compatible(&observation.frame)?;
        let mut out: BTreeMap<Bits, f64> = BTreeMap::new();
        for (a_bits, &weight) in &observation.focal {
            let event = self.frame.subset_from_bits(a_bits.clone());
            let conditionals = if geometric {
                self.geometric_conditional_map(&event, tol, "jeffrey-geometric")?
            } else {
                self.dempster_conditional_map(&event, tol, "jeffrey-dempster")?
            };
            for (bits, mass) in conditionals {
                *out.entry(bits).or_insert(0.0) += weight * mass;
            }
        }
        Self::finalize(self.frame.clone(), out, tol)
    }

    /// Conditional belief by the belief-function rule
    ///
    /// ```text
    /// Bel(B | A) = (Bel(B or not A) - Bel(not A)) / (1 - Bel(not A)),
    /// ```
    ///
    /// undefined when `Bel(not A)` reaches 1 at `tol`.
    pub fn bel_conditional(&self, query: &Subset, event: &Subset, tol: Tolerance) -> Result<f64> {
        self.frame.ensure_compatible(query.frame())?;
        self.frame.ensure_compatible(event.frame())?;
        let not_a = event.complement();
        let bel_not_a = self.belief_bits(not_a.bits());
        let denom = 1.0 - bel_not_a;
        if !tol.positive(denom) {
            return Err(Error::ConditioningUndefined {
                rule: "belief",
                detail: format!("belief in the complement of {event} is {bel_not_a}"),
            });
        }
        let b_or_not_a = query.union(&not_a)?;
        Ok((self.belief_bits(b_or_not_a.bits()) - bel_not_a) / denom)
    }

    /// Brute-force bounds on `P(query | event)` over every probability
    /// measure compatible with this mass function.
    ///
    /// Each *selection* sends the mass of every focal to one of its
    /// members; the oracle walks all selections, conditions the resulting
    /// atomic measure the Bayesian way, and returns the `(lower, upper)`
    /// envelope of the conditional probabilities. Selections that give the
    /// event probability 0 are skipped; if none remains, the bounds do not
    /// exist and [`Error::NoFeasibleSelection`] is returned.
    ///
    /// Exponential in the number of focals — this is the ground truth the
    /// closed-form envelope rules are validated against, not a production
    /// path. The frame must be within [`crate::DEFAULT_ENUMERATION_CAP`].
    pub fn credal_oracle(
        &self,
        query: &Subset,
        event: &Subset,
        tol: Tolerance,
    ) -> Result<(f64, f64)> {
        self.frame.ensure_compatible(query.frame())?;
        self.frame.ensure_compatible(event.frame())?;
        if self.frame.size() > crate::DEFAULT_ENUMERATION_CAP {
            return Err(Error::FrameTooLarge {
                size: self.frame.size(),
                cap: crate::DEFAULT_ENUMERATION_CAP,
            });
        }
        let focals: Vec<(Vec<usize>, f64)> = self
            .focal
            .iter()
            .map(|(bits, &mass)| {
                let members: Vec<usize> =
                    (0..self.frame.size()).filter(|&i| bits.contains(i)).collect();
                (members, mass)
            })
            .collect();
        let mut choice = alloc::vec![0usize; focals.len()];
        let mut lower = f64::INFINITY;
        let mut upper = f64::NEG_INFINITY;
        let mut feasible = false;
        loop {
            let mut p_event = 0.0;
            let mut p_query_event = 0.0;
            for (slot, (members, mass)) in choice.iter().zip(&focals) {
                let atom = members[*slot];
                if event.contains_index(atom) {
                    p_event += mass;
                    if query.contains_index(atom) {
                        p_query_event += mass;
                    }
                }
            }
            if tol.positive(p_event) {
                feasible = true;
                let ratio = p_query_event / p_event;
                lower = lower.min(ratio);
                upper = upper.max(ratio);
            }
            // Odometer step over the focal member choices.
            let mut done = true;
            for (slot, (members, _)) in choice.iter_mut().zip(&focals) {
                *slot += 1;
                if *slot < members.len() {
                    done = false;
                    break;
                }
                *slot = 0;
            }
            if done {
                break;
            }
        }
        if !feasible {
            return Err(Error::NoFeasibleSelection);
        }
        Ok((lower, upper))
    }
}

impl fmt::Display for MassFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m{{")?;
        for (i, (subset, mass)) in self.focals().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{subset}: {mass}")?;
        }
        write!(f, "}}")
    }
}

/// Interval-valued conditioning: for each query `B`, the tightest bounds
///
/// ```text
/// upper(B) = Pl(B and A) / (Pl(B and A) + Bel(not B and A)),
/// lower(B) = Bel(B and A) / (Bel(B and A) + Pl(not B and A)),
/// ```
///
/// on the Bayesian posteriors `P(B | A)` of the probability measures
/// compatible with the prior. Queries whose denominator vanishes are
/// individually undefined; the valuation itself always exists.
#[derive(Clone, Debug)]
pub struct IntervalValuation {
    prior: MassFunction,
    event: Subset,
}

impl IntervalValuation {
    /// The prior mass function the bounds are computed from.
    pub fn prior(&self) -> &MassFunction {
        &self.prior
    }

    /// The conditioning event.
    pub fn conditioning_event(&self) -> &Subset {
        &self.event
    }

    /// Upper bound on `P(query | event)`.
    pub fn upper(&self, query: &Subset, tol: Tolerance) -> Result<f64> {
        self.prior.frame.ensure_compatible(query.frame())?;
        let q_and_a = query.intersect(&self.event)?;
        let nq_and_a = query.complement().intersect(&self.event)?;
        let num = self.prior.plausibility_bits(q_and_a.bits());
        let denom = num + self.prior.belief_bits(nq_and_a.bits());
        if !tol.positive(denom) {
            return Err(Error::ConditioningUndefined {
                rule: "upper",
                detail: format!(
                    "plausibility of {q_and_a} and belief in {nq_and_a} are both 0"
                ),
            });
        }
        Ok(num / denom)
    }

    /// Lower bound on `P(query | event)`.
    pub fn lower(&self, query: &Subset, tol: Tolerance) -> Result<f64> {
        self.prior.frame.ensure_compatible(query.frame())?;
        let q_and_a = query.intersect(&self.event)?;
        let nq_and_a = query.complement().intersect(&self.event)?;
        let num = self.prior.belief_bits(q_and_a.bits());
        let denom = num + self.prior.plausibility_bits(nq_and_a.bits());
        if !tol.positive(denom) {
            return Err(Error::ConditioningUndefined {
                rule: "lower",
                detail: format!(
                    "belief in {q_and_a} and plausibility of {nq_and_a} are both 0"
                ),
            });
        }
        Ok(num / denom)
    }

    /// Both bounds as `(lower, upper)`.
    pub fn interval(&self, query: &Subset, tol: Tolerance) -> Result<(f64, f64)> {
        Ok((self.lower(query, tol)?, self.upper(query, tol)?))
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

    /// The running example: m({a}) = 0.6, m({a, b}) = 0.4.
    fn sample(frame: &Frame) -> MassFunction {
        MassFunction::new(
            frame.clone(),
            [
                (frame.singleton("a").unwrap(), 0.6),
                (frame.subset(["a", "b"]).unwrap(), 0.4),
            ],
        )
        .unwrap()
    }

    #[test]
    fn belief_and_plausibility_read_the_focal_structure() {
        let f = abc();
        let m = sample(&f);
        let checks = [
            (alloc::vec!["a"], 0.6, 1.0),
            (alloc::vec!["b"], 0.0, 0.4),
            (alloc::vec!["c"], 0.0, 0.0),
            (alloc::vec!["a", "b"], 1.0, 1.0),
            (alloc::vec!["b", "c"], 0.0, 0.4),
        ];
        for (members, bel, pl) in checks {
            let s = f.subset(&members).unwrap();
            assert!((m.belief(&s).unwrap() - bel).abs() < 1e-12, "Bel({s})");
            assert!((m.plausibility(&s).unwrap() - pl).abs() < 1e-12, "Pl({s})");
        }
        assert!((m.belief(&f.empty()).unwrap()).abs() < 1e-12);
        assert!((m.plausibility(&f.full()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn belief_and_plausibility_are_dual() {
        let f = abc();
        let m = sample(&f);
        for s in f.subsets().unwrap() {
            let bel = m.belief(&s).unwrap();
            let pl_comp = m.plausibility(&s.complement()).unwrap();
            assert!((bel - (1.0 - pl_comp)).abs() < 1e-12, "duality at {s}");
        }
    }

    #[test]
    fn dempster_conditioning_transfers_and_renormalizes() {
        let f = abc();
        let m = sample(&f);
        let bc = f.subset(["b", "c"]).unwrap();
        let cond = m.condition_dempster(&bc, tol()).unwrap();
        // {a} vanishes, {a, b} moves to {b} and is rescaled by Pl({b, c}) = 0.4.
        assert_eq!(cond.focal_count(), 1);
        assert!((cond.mass(&f.singleton("b").unwrap()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dempster_conditioning_needs_positive_plausibility() {
        let f = abc();
        let m = sample(&f);
        let c = f.singleton("c").unwrap();
        match m.condition_dempster(&c, tol()) {
            Err(Error::ConditioningUndefined { rule, detail }) => {
                assert_eq!(rule, "dempster");
                assert!(detail.contains("{c}"), "event not named: {detail}");
            }
            other => panic!("expected ConditioningUndefined, got {other:?}"),
        }
    }

    #[test]
    fn geometric_conditioning_keeps_the_inside() {
        let f = abc();
        let m = sample(&f);
        let a = f.singleton("a").unwrap();
        let cond = m.condition_geometric(&a, tol()).unwrap();
        // Only {a} lies inside {a}; Bel({a}) = 0.6 rescales it to 1.
        assert!((cond.mass(&a).unwrap() - 1.0).abs() < 1e-12);

        let ab = f.subset(["a", "b"]).unwrap();
        let unchanged = m.condition_geometric(&ab, tol()).unwrap();
        assert!((unchanged.mass(&a).unwrap() - 0.6).abs() < 1e-12);
        assert!((unchanged.mass(&ab).unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn geometric_conditioning_needs_positive_belief() {
        let f = abc();
        let m = sample(&f);
        // Pl({b}) = 0.4 but Bel({b}) = 0: Dempster is defined, geometric is not.
        let b = f.singleton("b").unwrap();
        assert!(m.condition_dempster(&b, tol()).is_ok());
        match m.condition_geometric(&b, tol()) {
            Err(Error::ConditioningUndefined { rule, .. }) => assert_eq!(rule, "geometric"),
            other => panic!("expected ConditioningUndefined, got {other:?}"),
        }
    }

    #[test]
    fn envelope_bounds_match_the_hand_computed_example() {
        let f = abc();
        let m = sample(&f);
        let valuation = match m.condition(&f.full(), ConditioningRule::Upper, tol()).unwrap() {
            Conditioned::Interval(v) => v,
            other => panic!("expected an interval valuation, got {other:?}"),
        };
        let a = f.singleton("a").unwrap();
        // Pl({a}) = 1, Bel({b, c}) = 0  =>  upper = 1.
        assert!((valuation.upper(&a, tol()).unwrap() - 1.0).abs() < 1e-12);
        // Bel({a}) = 0.6, Pl({b, c}) = 0.4  =>  lower = 0.6.
        assert!((valuation.lower(&a, tol()).unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn envelope_bounds_agree_with_the_credal_oracle() {
        let f = abc();
        let m = sample(&f);
        let (lo, hi) = m.credal_oracle(&f.singleton("a").unwrap(), &f.full(), tol()).unwrap();
        assert!((lo - 0.6).abs() < 1e-12);
        assert!((hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn credal_oracle_fails_when_no_selection_reaches_the_event() {
        let f = abc();
        let m = MassFunction::categorical(&f.singleton("a").unwrap()).unwrap();
        let b = f.singleton("b").unwrap();
        assert_eq!(
            m.credal_oracle(&b, &b, tol()),
            Err(Error::NoFeasibleSelection)
        );
    }

    #[test]
    fn combination_pools_concordant_evidence() {
        let f = Frame::new(["a", "b"]).unwrap();
        let m1 = MassFunction::new(
            f.clone(),
            [
                (f.singleton("a").unwrap(), 0.5),
                (f.full(), 0.5),
            ],
        )
        .unwrap();
        let m2 = MassFunction::new(
            f.clone(),
            [
                (f.singleton("b").unwrap(), 0.5),
                (f.full(), 0.5),
            ],
        )
        .unwrap();
        let both = m1.combine_dempster(&m2, tol()).unwrap();
        // Conflict {a} x {b} carries 0.25; the three survivors share evenly.
        let third = 1.0 / 3.0;
        assert!((both.mass(&f.singleton("a").unwrap()).unwrap() - third).abs() < 1e-12);
        assert!((both.mass(&f.singleton("b").unwrap()).unwrap() - third).abs() < 1e-12);
        assert!((both.mass(&f.full()).unwrap() - third).abs() < 1e-12);
    }

    #[test]
    fn combination_of_contradictory_certainties_is_total_conflict() {
        let f = abc();
        let m1 = MassFunction::categorical(&f.singleton("a").unwrap()).unwrap();
        let m2 = MassFunction::categorical(&f.singleton("b").unwrap()).unwrap();
        assert_eq!(m1.combine_dempster(&m2, tol()), Err(Error::TotalConflict));
    }

    #[test]
    fn combination_is_commutative() {
        let f = abc();
        let m1 = sample(&f);
        let m2 = MassFunction::new(
            f.clone(),
            [
                (f.subset(["b", "c"]).unwrap(), 0.7),
                (f.full(), 0.3),
            ],
        )
        .unwrap();
        let ab = m1.combine_dempster(&m2, tol()).unwrap();
        let ba = m2.combine_dempster(&m1, tol()).unwrap();
        for (subset, mass) in ab.focals() {
            assert!((ba.mass(&subset).unwrap() - mass).abs() < 1e-12);
        }
        assert_eq!(ab.focal_count(), ba.focal_count());
    }

    #[test]
    fn jeffrey_update_with_a_categorical_observation_is_dempster_conditioning() {
        let f = abc();
        let m = sample(&f);
        let bc = f.subset(["b", "c"]).unwrap();
        let obs = MassFunction::categorical(&bc).unwrap();
        let via_jeffrey = m.jeffrey_update(&obs, tol()).unwrap();
        let via_conditioning = m.condition_dempster(&bc, tol()).unwrap();
        assert_eq!(via_jeffrey.focal_count(), via_conditioning.focal_count());
        for (subset, mass) in via_jeffrey.focals() {
            assert!((via_conditioning.mass(&subset).unwrap() - mass).abs() < 1e-15);
        }
    }

    #[test]
    fn jeffrey_update_names_the_implausible_observation_focal() {
        let f = abc();
        let m = sample(&f);
        let obs = MassFunction::new(
            f.clone(),
            [
                (f.singleton("c").unwrap(), 0.5),
                (f.full(), 0.5),
            ],
        )
        .unwrap();
        match m.jeffrey_update(&obs, tol()) {
            Err(Error::ConditioningUndefined { rule, detail }) => {
                assert_eq!(rule, "jeffrey-dempster");
                assert!(detail.contains("{c}"), "focal not named: {detail}");
            }
            other => panic!("expected ConditioningUndefined, got {other:?}"),
        }
    }

    #[test]
    fn bel_conditional_matches_the_hand_computed_values() {
        let f = abc();
        let m = sample(&f);
        let ab = f.subset(["a", "b"]).unwrap();
        // Bel({a} or {c}) = 0.6, Bel({c}) = 0  =>  0.6.
        let got = m
            .bel_conditional(&f.singleton("a").unwrap(), &ab, tol())
            .unwrap();
        assert!((got - 0.6).abs() < 1e-12);
        // Bel({b, c}) = 0, Bel({c}) = 0  =>  0.
        let got = m
            .bel_conditional(&f.singleton("b").unwrap(), &ab, tol())
            .unwrap();
        assert!(got.abs() < 1e-12);
    }

    #[test]
    fn bel_conditional_is_undefined_when_the_complement_is_certain() {
        let f = abc();
        let m = MassFunction::categorical(&f.singleton("a").unwrap()).unwrap();
        let bc = f.subset(["b", "c"]).unwrap();
        match m.bel_conditional(&f.singleton("b").unwrap(), &bc, tol()) {
            Err(Error::ConditioningUndefined { rule, .. }) => assert_eq!(rule, "belief"),
            other => panic!("expected ConditioningUndefined, got {other:?}"),
        }
    }

    #[test]
    fn construction_validates_and_repairs() {
        let f = abc();
        assert_eq!(
            MassFunction::new(f.clone(), [(f.empty(), 0.4), (f.full(), 0.6)]),
            Err(Error::EmptyFocal)
        );
        match MassFunction::new(f.clone(), [(f.full(), 0.9)]) {
            Err(Error::MassNormalization { sum }) => assert!((sum - 0.9).abs() < 1e-12),
            other => panic!("expected MassNormalization, got {other:?}"),
        }
        assert!(matches!(
            MassFunction::new(f.clone(), [(f.full(), 1.2), (f.singleton("a").unwrap(), -0.2)]),
            Err(Error::NegativeValue { .. })
        ));
        // A zero-mass empty set is dropped, not rejected.
        let m = MassFunction::new(f.clone(), [(f.empty(), 0.0), (f.full(), 1.0)]).unwrap();
        assert_eq!(m.focal_count(), 1);
        // Duplicates merge; near-misses are repaired.
        let m = MassFunction::new(
            f.clone(),
            [
                (f.singleton("a").unwrap(), 0.3),
                (f.singleton("a").unwrap(), 0.3),
                (f.full(), 0.399999999),
            ],
        )
        .unwrap();
        assert_eq!(m.focal_count(), 2);
        let total: f64 = m.focals().map(|(_, mass)| mass).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn probability_round_trip() {
        let f = abc();
        let p = ProbabilityMeasure::new(f.clone(), alloc::vec![0.2, 0.3, 0.5]).unwrap();
        let m = MassFunction::from_probability(&p);
        assert!(m.is_bayesian());
        let back = m.to_probability().unwrap();
        for i in 0..f.size() {
            assert!((back.weight(i) - p.weight(i)).abs() < 1e-15);
        }
        assert_eq!(sample(&f).to_probability(), Err(Error::NotBayesian));
    }

    #[test]
    fn cross_frame_operands_are_rejected() {
        let f = abc();
        let g = Frame::new(["x", "y"]).unwrap();
        let m = sample(&f);
        let other = MassFunction::vacuous(g.clone());
        assert_eq!(
            m.combine_dempster(&other, tol()),
            Err(Error::FrameMismatch)
        );
        assert_eq!(
            m.belief(&g.singleton("x").unwrap()),
            Err(Error::FrameMismatch)
        );
    }
}
