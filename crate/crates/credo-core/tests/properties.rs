//! Property-based invariants for the state types and their updating
//! rules: normalization is preserved, dual pairs stay dual, set algebra
//! behaves, translations round-trip, and rule failures on valid inputs
//! are always classified as the rule being undefined rather than as
//! validation errors.

use credo_core::compare::gen;
use credo_core::{
    ConjunctionOp, ErrorCategory, Frame, MassFunction, Ocf, PossibilityDistribution,
    ProbabilityMeasure, Subset, Tolerance, WeightedPartition,
};
use proptest::collection::vec;
use proptest::prelude::*;

fn tol() -> Tolerance {
    Tolerance::default()
}

/// Subset of the letter frame selected by the low `size` bits of `mask`.
fn subset_from_mask(frame: &Frame, mask: u8) -> Subset {
    let members: Vec<&str> = frame
        .labels()
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1u8 << i) != 0)
        .map(|(_, label)| label.as_str())
        .collect();
    frame.subset(members).expect("labels come from the frame")
}

/// Builds a normalized mass function from raw `(mask, weight)` pairs,
/// dropping empty masks; `None` when nothing survives.
fn mass_from_raw(frame: &Frame, raw: &[(u8, f64)]) -> Option<MassFunction> {
    let limit = 1u16 << frame.size();
    let entries: Vec<(Subset, f64)> = raw
        .iter()
        .map(|(mask, w)| ((u16::from(*mask) % limit) as u8, *w))
        .filter(|(mask, _)| *mask != 0)
        .map(|(mask, w)| (subset_from_mask(frame, mask), w))
        .collect();
    if entries.is_empty() {
        return None;
    }
    let total: f64 = entries.iter().map(|(_, w)| *w).sum();
    let normalized = entries.into_iter().map(|(s, w)| (s, w / total));
    Some(MassFunction::new(frame.clone(), normalized).expect("normalized non-empty entries"))
}

/// Builds a normalized possibility distribution with a forced peak.
fn possibility_from_raw(frame: &Frame, raw: &[f64], peak: usize) -> PossibilityDistribution {
    let mut values: Vec<f64> = raw[..frame.size()].to_vec();
    let peak = peak % frame.size();
    values[peak] = 1.0;
    PossibilityDistribution::new(frame.clone(), values).expect("peak forced to 1")
}

fn ocf_from_raw(frame: &Frame, raw: &[u64], floor: usize) -> Ocf {
    let mut ranks: Vec<u64> = raw[..frame.size()].to_vec();
    let floor = floor % frame.size();
    ranks[floor] = 0;
    Ocf::new(frame.clone(), ranks).expect("rank 0 forced somewhere")
}

proptest! {
    #[test]
    fn subset_algebra_behaves(
        size in 2usize..=6,
        mask_a: u8,
        mask_b: u8,
    ) {
        let frame = gen::frame(size);
        let a = subset_from_mask(&frame, mask_a);
        let b = subset_from_mask(&frame, mask_b);

        prop_assert_eq!(a.complement().complement(), a.clone());
        prop_assert_eq!(
            a.union(&b).unwrap().complement(),
            a.complement().intersect(&b.complement()).unwrap()
        );
        prop_assert_eq!(
            a.intersect(&b).unwrap().cardinality() + a.union(&b).unwrap().cardinality(),
            a.cardinality() + b.cardinality()
        );
        prop_assert_eq!(a.is_subset_of(&b).unwrap(), a.intersect(&b).unwrap() == a);
        prop_assert_eq!(a.is_disjoint_from(&b).unwrap(), a.intersect(&b).unwrap().is_empty());
    }

    #[test]
    fn belief_and_plausibility_stay_dual(
        size in 2usize..=5,
        raw in vec((any::<u8>(), 0.05f64..1.0), 1..6),
        qmask: u8,
    ) {
        let frame = gen::frame(size);
        let Some(m) = mass_from_raw(&frame, &raw) else {
            return Ok(());
        };
        let query = subset_from_mask(&frame, qmask);
        let bel = m.belief(&query).unwrap();
        let pl = m.plausibility(&query).unwrap();
        prop_assert!(bel <= pl + 1e-12);
        prop_assert!((bel - (1.0 - m.plausibility(&query.complement()).unwrap())).abs() <= 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&bel));
        prop_assert!((0.0..=1.0 + 1e-12).contains(&pl));
    }

    #[test]
    fn conditioning_keeps_mass_functions_sound(
        size in 2usize..=5,
        raw in vec((any::<u8>(), 0.05f64..1.0), 1..6),
        emask: u8,
    ) {
        let frame = gen::frame(size);
        let Some(m) = mass_from_raw(&frame, &raw) else {
            return Ok(());
        };
        let event = subset_from_mask(&frame, emask);
        prop_assume!(!event.is_empty());

        match m.condition_dempster(&event, tol()) {
            Ok(c) => {
                let total: f64 = c.focals().map(|(_, w)| w).sum();
                prop_assert!((total - 1.0).abs() <= 1e-9);
                for (focal, w) in c.focals() {
                    prop_assert!(!focal.is_empty());
                    prop_assert!(focal.is_subset_of(&event).unwrap());
                    prop_assert!(w > 0.0);
                }
            }
            Err(e) => prop_assert_eq!(e.category(), ErrorCategory::RuleUndefined),
        }
        match m.condition_geometric(&event, tol()) {
            Ok(c) => {
                let total: f64 = c.focals().map(|(_, w)| w).sum();
                prop_assert!((total - 1.0).abs() <= 1e-9);
                for (focal, _) in c.focals() {
                    prop_assert!(focal.is_subset_of(&event).unwrap());
                }
            }
            Err(e) => prop_assert_eq!(e.category(), ErrorCategory::RuleUndefined),
        }
    }

    #[test]
    fn combination_is_commutative_and_keeps_the_vacuous_state_neutral(
        size in 2usize..=5,
        raw1 in vec((any::<u8>(), 0.05f64..1.0), 1..5),
        raw2 in vec((any::<u8>(), 0.05f64..1.0), 1..5),
    ) {
        let frame = gen::frame(size);
        let (Some(m1), Some(m2)) =
            (mass_from_raw(&frame, &raw1), mass_from_raw(&frame, &raw2))
        else {
            return Ok(());
        };

        let forward = m1.combine_dempster(&m2, tol());
        let backward = m2.combine_dempster(&m1, tol());
        match (forward, backward) {
            (Ok(f), Ok(b)) => {
                for (focal, w) in f.focals() {
                    prop_assert!((w - b.mass(&focal).unwrap()).abs() <= 1e-12);
                }
            }
            (Err(e1), Err(e2)) => prop_assert_eq!(e1, e2),
            (f, b) => prop_assert!(false, "asymmetric outcomes: {:?} vs {:?}", f, b),
        }

        let vacuous = MassFunction::vacuous(frame.clone());
        let neutral = m1.combine_dempster(&vacuous, tol()).unwrap();
        for (focal, w) in m1.focals() {
            prop_assert!((w - neutral.mass(&focal).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn jeffrey_with_a_states_own_marginals_changes_nothing(
        size in 2usize..=6,
        weights in vec(0.05f64..1.0, 6),
        assignment in vec(0usize..3, 6),
    ) {
        let frame = gen::frame(size);
        let total: f64 = weights[..size].iter().sum();
        let p = ProbabilityMeasure::new(
            frame.clone(),
            weights[..size].iter().map(|w| w / total).collect(),
        )
        .unwrap();

        let mut cells: Vec<Vec<&str>> = vec![Vec::new(); 3];
        for (i, label) in frame.labels().iter().enumerate() {
            cells[assignment[i]].push(label.as_str());
        }
        let entries: Vec<(Subset, f64)> = cells
            .into_iter()
            .filter(|members| !members.is_empty())
            .map(|members| {
                let cell = frame.subset(members).unwrap();
                let weight = p.probability_of(&cell).unwrap();
                (cell, weight)
            })
            .collect();
        let partition =
            WeightedPartition::new(entries, credo_core::NormalizationMode::Sum).unwrap();
        let updated = p.jeffrey_update(&partition, tol()).unwrap();
        for (got, want) in updated.weights().iter().zip(p.weights()) {
            prop_assert!((got - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn possibility_measures_are_maxitive_and_necessity_minitive(
        size in 2usize..=6,
        raw in vec(0.0f64..1.0, 6),
        peak in any::<usize>(),
        mask_a: u8,
        mask_b: u8,
    ) {
        let frame = gen::frame(size);
        let pi = possibility_from_raw(&frame, &raw, peak);
        let a = subset_from_mask(&frame, mask_a);
        let b = subset_from_mask(&frame, mask_b);

        let union = a.union(&b).unwrap();
        prop_assert_eq!(
            pi.possibility_of(&union).unwrap(),
            pi.possibility_of(&a).unwrap().max(pi.possibility_of(&b).unwrap())
        );
        let meet = a.intersect(&b).unwrap();
        prop_assert_eq!(
            pi.necessity_of(&meet).unwrap(),
            pi.necessity_of(&a).unwrap().min(pi.necessity_of(&b).unwrap())
        );
        prop_assert!(
            pi.necessity_of(&a).unwrap() <= pi.possibility_of(&a).unwrap() + 1e-12
        );
    }

    #[test]
    fn level_cuts_are_nested_and_reach_core_and_support(
        size in 2usize..=6,
        raw in vec(0.0f64..1.0, 6),
        peak in any::<usize>(),
    ) {
        let frame = gen::frame(size);
        let pi = possibility_from_raw(&frame, &raw, peak);
        let cuts = pi.level_cuts();
        prop_assert!(!cuts.is_empty());
        for pair in cuts.windows(2) {
            prop_assert!(pair[0].alpha < pair[1].alpha);
            prop_assert!(pair[1].cut.is_subset_of(&pair[0].cut).unwrap());
        }
        let top = cuts.last().unwrap();
        prop_assert_eq!(top.alpha, 1.0);
        prop_assert_eq!(&top.cut, &pi.core());
        prop_assert_eq!(&cuts[0].cut, &pi.support());
    }

    #[test]
    fn possibilistic_conditioning_and_combination_stay_normalized(
        size in 2usize..=6,
        raw1 in vec(0.0f64..1.0, 6),
        raw2 in vec(0.0f64..1.0, 6),
        peak1 in any::<usize>(),
        peak2 in any::<usize>(),
        emask: u8,
    ) {
        let frame = gen::frame(size);
        let pi1 = possibility_from_raw(&frame, &raw1, peak1);
        let pi2 = possibility_from_raw(&frame, &raw2, peak2);
        let event = subset_from_mask(&frame, emask);
        prop_assume!(!event.is_empty());

        match pi1.condition(&event, tol()) {
            Ok(c) => {
                prop_assert!(c.is_normalized());
                let outside = event.complement();
                prop_assert_eq!(c.possibility_of(&outside).unwrap(), 0.0);
            }
            Err(e) => prop_assert_eq!(e.category(), ErrorCategory::RuleUndefined),
        }
        for op in [ConjunctionOp::Min, ConjunctionOp::Product, ConjunctionOp::Lukasiewicz] {
            match pi1.combine(&pi2, op, tol()) {
                Ok(c) => prop_assert!(c.is_normalized()),
                Err(e) => prop_assert_eq!(e.category(), ErrorCategory::RuleUndefined),
            }
        }
        match pi1.jeffrey_update(&pi2, tol()) {
            Ok(u) => prop_assert!(u.distribution.is_normalized() || u.warning.is_some()),
            Err(e) => prop_assert_eq!(e.category(), ErrorCategory::RuleUndefined),
        }
    }

    #[test]
    fn rankings_are_minitive_and_translation_round_trips(
        size in 2usize..=6,
        raw in vec(0u64..=20, 6),
        floor in any::<usize>(),
        mask_a: u8,
        mask_b: u8,
    ) {
        let frame = gen::frame(size);
        let kappa = ocf_from_raw(&frame, &raw, floor);
        let a = subset_from_mask(&frame, mask_a);
        let b = subset_from_mask(&frame, mask_b);
        prop_assume!(!a.is_empty() && !b.is_empty());

        let union = a.union(&b).unwrap();
        prop_assert_eq!(
            kappa.rank_of(&union).unwrap(),
            kappa.rank_of(&a).unwrap().min(kappa.rank_of(&b).unwrap())
        );
        prop_assert_eq!(kappa.rank_of(&frame.full()).unwrap(), 0);

        let translated = kappa.to_possibility();
        prop_assert!(translated.is_normalized());
        let back = Ocf::from_possibility(&translated).unwrap();
        prop_assert_eq!(back.ranks(), kappa.ranks());
    }

    #[test]
    fn conditionalization_pins_the_event_and_shifts_its_complement(
        size in 2usize..=6,
        raw in vec(0u64..=12, 6),
        floor in any::<usize>(),
        emask: u8,
        shift in 0u64..=20,
    ) {
        let frame = gen::frame(size);
        let kappa = ocf_from_raw(&frame, &raw, floor);
        let event = subset_from_mask(&frame, emask);
        prop_assume!(!event.is_empty() && !event.is_full());

        let conditioned = kappa.conditionalize(&event, shift, tol()).unwrap();
        prop_assert_eq!(conditioned.rank_of(&event).unwrap(), 0);
        prop_assert_eq!(conditioned.rank_of(&event.complement()).unwrap(), shift);
        // Inside the event, rank differences are preserved exactly.
        let base = kappa.rank_of(&event).unwrap();
        for i in event.member_indices() {
            prop_assert_eq!(conditioned.rank(i), kappa.rank(i) - base);
        }
    }
}
