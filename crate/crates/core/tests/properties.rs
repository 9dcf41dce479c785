//! Property tests for the substrate: mass bookkeeping, functoriality, and
//! serialization round trips.

use proptest::prelude::*;

use cooc_core::cooccurrence::prob_cooc;
use cooc_core::measure::{MeasureKind, RationalMeasure};
use cooc_core::object::{pushforward, RandomObject};
use cooc_core::rational::{format_rat, parse_rat, Rat};
use cooc_core::space::{Event, FiniteSpace, SpaceRef};

fn space(n: usize) -> SpaceRef {
    FiniteSpace::unlabeled(n).unwrap()
}

/// Everything is immutable after construction and may be shared across
/// threads.
#[test]
fn values_are_shareable_across_threads() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<cooc_core::FiniteSpace>();
    assert_send_sync::<cooc_core::Partition>();
    assert_send_sync::<cooc_core::Event>();
    assert_send_sync::<cooc_core::RationalMeasure>();
    assert_send_sync::<cooc_core::RandomObject>();
    assert_send_sync::<cooc_core::ProductSpace>();
    assert_send_sync::<cooc_core::Kernel>();
    assert_send_sync::<cooc_core::PointwiseConditional>();
    assert_send_sync::<cooc_core::Density>();
    assert_send_sync::<cooc_core::RandomVariable>();
    assert_send_sync::<cooc_core::Scm>();

    // concurrent reads of one shared measure
    let p = RationalMeasure::uniform(space(4));
    let shared = std::sync::Arc::new(p);
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let p = shared.clone();
            std::thread::spawn(move || p.total())
        })
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), Rat::new(1.into(), 1.into()));
    }
}

/// Nonnegative weights k/8 summing to one over `n` outcomes.
fn probability_strategy(n: usize) -> impl Strategy<Value = RationalMeasure> {
    proptest::collection::vec(0u32..=8, n).prop_map(move |raw| {
        let total: u32 = raw.iter().sum();
        let s = space(n);
        if total == 0 {
            return RationalMeasure::point_mass(s, 0).unwrap();
        }
        let weights = raw
            .iter()
            .map(|&k| Rat::new((k as i64).into(), (total as i64).into()))
            .collect();
        RationalMeasure::new(s, weights, MeasureKind::Probability).unwrap()
    })
}

fn map_strategy(domain: usize, codomain: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(0..codomain, domain)
}

proptest! {
    #[test]
    fn pushforward_preserves_total_mass(
        p in probability_strategy(5),
        map in map_strategy(5, 3),
    ) {
        let x = RandomObject::new(space(5), space(3), map).unwrap();
        let law = pushforward(&p, &x).unwrap();
        prop_assert_eq!(law.total(), p.total());
        prop_assert_eq!(law.kind(), MeasureKind::Probability);
    }

    #[test]
    fn pushforward_is_functorial(
        p in probability_strategy(5),
        f_map in map_strategy(5, 4),
        g_map in map_strategy(4, 3),
    ) {
        let f = RandomObject::new(space(5), space(4), f_map).unwrap();
        let g = RandomObject::new(space(4), space(3), g_map).unwrap();
        let composed = f.then(&g).unwrap();
        let one_step = pushforward(&p, &composed).unwrap();
        let two_step = pushforward(&pushforward(&p, &f).unwrap(), &g).unwrap();
        prop_assert_eq!(one_step.weights(), two_step.weights());
    }

    #[test]
    fn finite_measures_push_mass_too(
        raw in proptest::collection::vec(0u32..=8, 4),
        map in map_strategy(4, 2),
    ) {
        let weights: Vec<Rat> = raw
            .iter()
            .map(|&k| Rat::new((k as i64).into(), 8.into()))
            .collect();
        let m = RationalMeasure::new(space(4), weights, MeasureKind::Finite).unwrap();
        let x = RandomObject::new(space(4), space(2), map).unwrap();
        let law = pushforward(&m, &x).unwrap();
        prop_assert_eq!(law.total(), m.total());
    }

    #[test]
    fn rational_text_round_trip(n in -9999i64..=9999, d in 1i64..=9999) {
        let r = Rat::new(n.into(), d.into());
        prop_assert_eq!(parse_rat(&format_rat(&r)).unwrap(), r);
    }

    #[test]
    fn cooccurrence_shrinks_with_events(
        p in probability_strategy(6),
        mask_a in 0u32..64,
        mask_b in 0u32..64,
    ) {
        let s = p.space().clone();
        let event = |mask: u32| {
            Event::new(s.clone(), (0..6).filter(|i| mask >> i & 1 == 1)).unwrap()
        };
        let a = event(mask_a);
        let ab = event(mask_a & mask_b);
        let joint = prob_cooc(&p, &[a.clone(), event(mask_b)]).unwrap();
        prop_assert_eq!(&joint, &prob_cooc(&p, &[ab]).unwrap());
        prop_assert!(joint <= prob_cooc(&p, &[a]).unwrap());
    }

    #[test]
    fn bundle_projections_recover_components(
        maps in proptest::collection::vec(map_strategy(4, 3), 2),
    ) {
        let base = space(4);
        let mut objects = std::collections::BTreeMap::new();
        for (k, map) in maps.iter().enumerate() {
            objects.insert(k + 1, RandomObject::new(base.clone(), space(3), map.clone()).unwrap());
        }
        let idx = cooc_core::space::IndexSet::new(objects.keys().copied()).unwrap();
        let (bundled, product) = cooc_core::object::bundle(&objects, &idx).unwrap();
        for (i, obj) in &objects {
            let proj = cooc_core::object::project(&product, *i).unwrap();
            for o in 0..4 {
                prop_assert_eq!(proj.apply(bundled.apply(o)), obj.apply(o));
            }
        }
    }
}
