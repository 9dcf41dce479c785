//! Deterministic random model generators for the law suite: small spaces,
//! rational weights with small denominators, and deliberately frequent
//! zero-probability outcomes so that null branches get exercised.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::cooccurrence::Constraint;
use crate::eintegral::{PiecewiseLinearConvex, RandomVariable};
use crate::error::Result;
use crate::measure::{MeasureKind, RationalMeasure};
use crate::object::RandomObject;
use crate::rational::Rat;
use crate::scm::Scm;
use crate::space::{Event, FiniteSpace, IndexSet, Partition, ProductSpace, SpaceRef};

use super::Scenario;

fn space(n: usize) -> SpaceRef {
    FiniteSpace::unlabeled(n).expect("positive size")
}

/// Probability weights k_i / d with a common denominator d ≤ 8; zero
/// numerators (null outcomes) are allowed and common.
pub fn random_probability(rng: &mut ChaCha8Rng, space: &SpaceRef) -> RationalMeasure {
    let n = space.size();
    loop {
        let d = rng.gen_range(2..=8usize);
        let mut cuts: Vec<usize> = (0..n - 1).map(|_| rng.gen_range(0..=d)).collect();
        cuts.push(0);
        cuts.push(d);
        cuts.sort_unstable();
        let weights: Vec<Rat> = cuts
            .windows(2)
            .map(|w| Rat::new(((w[1] - w[0]) as i64).into(), (d as i64).into()))
            .collect();
        // keep at least two live outcomes when the space allows it, so
        // conditioning has something to do
        let live = weights.iter().filter(|w| !num::Zero::is_zero(*w)).count();
        if live >= 2.min(n) {
            return RationalMeasure::new(space.clone(), weights, MeasureKind::Probability)
                .expect("weights sum to one");
        }
    }
}

/// A total map into a codomain of the given size.
pub fn random_object(
    rng: &mut ChaCha8Rng,
    domain: &SpaceRef,
    codomain_size: usize,
) -> RandomObject {
    let codomain = space(codomain_size);
    let map = (0..domain.size())
        .map(|_| rng.gen_range(0..codomain_size))
        .collect();
    RandomObject::new(domain.clone(), codomain, map).expect("total map")
}

/// A scenario: base space of size 2–4, random exact law, 2–4 objects with
/// codomains of size 2–4.
pub fn random_scenario(rng: &mut ChaCha8Rng, name: &str) -> Scenario {
    random_scenario_sized(rng, name, 2..=4, 2..=4)
}

/// Scenario with explicit size ranges for the base and the codomains.
pub fn random_scenario_sized(
    rng: &mut ChaCha8Rng,
    name: &str,
    base_sizes: std::ops::RangeInclusive<usize>,
    codomain_sizes: std::ops::RangeInclusive<usize>,
) -> Scenario {
    let base_space = space(rng.gen_range(base_sizes));
    let base = random_probability(rng, &base_space);
    let count = rng.gen_range(2..=4usize);
    let objects = (0..count)
        .map(|_| {
            let cs = rng.gen_range(codomain_sizes.clone());
            random_object(rng, &base_space, cs)
        })
        .collect();
    Scenario::new(name.to_string(), base, objects)
}

/// A scenario whose base is a two-factor product carrying a product
/// measure, with the object list split into a left group (functions of the
/// first coordinate) and a right group (functions of the second): the two
/// groups are independent by construction.
pub struct ProductScenario {
    pub scenario: Scenario,
    /// Indices into `scenario.objects` factoring through the first
    /// coordinate.
    pub left: Vec<usize>,
    /// Indices factoring through the second coordinate.
    pub right: Vec<usize>,
}

pub fn random_product_scenario(rng: &mut ChaCha8Rng, name: &str) -> ProductScenario {
    let a = space(rng.gen_range(2..=3usize));
    let b = space(rng.gen_range(2..=3usize));
    let pa = random_probability(rng, &a);
    let pb = random_probability(rng, &b);
    let product = ProductSpace::pair(a.clone(), b.clone()).expect("small product");
    let weights = (0..product.len())
        .map(|pt| {
            let c = product.coords(pt);
            pa.weight(c[0]) * pb.weight(c[1])
        })
        .collect();
    let base = RationalMeasure::new(product.space().clone(), weights, MeasureKind::Probability)
        .expect("product of probabilities");
    let mut objects = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for side in 0..2 {
        for _ in 0..rng.gen_range(2..=3usize) {
            let cs = rng.gen_range(2..=3usize);
            let codomain = space(cs);
            let table: Vec<usize> = (0..[a.size(), b.size()][side])
                .map(|_| rng.gen_range(0..cs))
                .collect();
            let map = (0..product.len())
                .map(|pt| table[product.coords(pt)[side]])
                .collect();
            let object =
                RandomObject::new(product.space().clone(), codomain, map).expect("total map");
            if side == 0 {
                left.push(objects.len());
            } else {
                right.push(objects.len());
            }
            objects.push(object);
        }
    }
    ProductScenario {
        scenario: Scenario::new(name.to_string(), base, objects),
        left,
        right,
    }
}

/// A uniformly random event (possibly empty or full).
pub fn random_event(rng: &mut ChaCha8Rng, space: &SpaceRef) -> Event {
    let members = space.outcomes().filter(|_| rng.gen_bool(0.5));
    Event::new(space.clone(), members).expect("members in range")
}

/// A random nonempty event.
pub fn random_nonempty_event(rng: &mut ChaCha8Rng, space: &SpaceRef) -> Event {
    loop {
        let e = random_event(rng, space);
        if !e.is_empty() {
            return e;
        }
    }
}

/// A random constraint on the given object (over its discrete field).
pub fn random_constraint(rng: &mut ChaCha8Rng, object: &RandomObject) -> Constraint {
    let event = random_event(rng, object.codomain());
    Constraint::new(object.clone(), event).expect("objects carry discrete fields here")
}

/// A constraint whose event is nonempty.
pub fn random_nonempty_constraint(rng: &mut ChaCha8Rng, object: &RandomObject) -> Constraint {
    let event = random_nonempty_event(rng, object.codomain());
    Constraint::new(object.clone(), event).expect("objects carry discrete fields here")
}

/// The trivial full-space constraint on an object.
pub fn full_constraint(object: &RandomObject) -> Constraint {
    Constraint::new(object.clone(), Event::full(object.codomain().clone()))
        .expect("full event is always measurable")
}

/// A rational-valued variable with values in [-4, 4], denominators ≤ 8.
pub fn random_variable(rng: &mut ChaCha8Rng, space: &SpaceRef) -> RandomVariable {
    let values = (0..space.size())
        .map(|_| {
            let d = rng.gen_range(1..=8i64);
            let n = rng.gen_range(-4 * d..=4 * d);
            Rat::new(n.into(), d.into())
        })
        .collect();
    RandomVariable::new(space.clone(), values).expect("sized values")
}

/// A nonnegative variable (for monotone sequences and domination).
pub fn random_nonnegative_variable(rng: &mut ChaCha8Rng, space: &SpaceRef) -> RandomVariable {
    let values = (0..space.size())
        .map(|_| {
            let d = rng.gen_range(1..=8i64);
            let n = rng.gen_range(0..=4 * d);
            Rat::new(n.into(), d.into())
        })
        .collect();
    RandomVariable::new(space.clone(), values).expect("sized values")
}

/// A pair (coarse, fine) of partitions of the space with fine refining
/// coarse: a nested chain of sub-σ-fields.
pub fn random_partition_pair(rng: &mut ChaCha8Rng, space: &SpaceRef) -> (Partition, Partition) {
    // fine: random partition via random block labels
    let n = space.size();
    let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
    let mut fine_blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (o, l) in labels.iter().enumerate() {
        fine_blocks.entry(*l).or_default().push(o);
    }
    let fine_blocks: Vec<Vec<usize>> = fine_blocks.into_values().collect();
    let fine = Partition::new(space.clone(), fine_blocks.clone()).expect("covering blocks");
    // coarse: merge fine blocks under random group labels
    let groups: Vec<usize> = (0..fine_blocks.len())
        .map(|_| rng.gen_range(0..fine_blocks.len()))
        .collect();
    let mut merged: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (b, g) in groups.iter().enumerate() {
        merged.entry(*g).or_default().extend(fine_blocks[b].iter());
    }
    let coarse =
        Partition::new(space.clone(), merged.into_values().collect()).expect("merged blocks");
    (coarse, fine)
}

/// A random convex piecewise-linear function: up to three rational
/// breakpoints and non-decreasing rational slopes.
pub fn random_convex(rng: &mut ChaCha8Rng) -> PiecewiseLinearConvex {
    let k = rng.gen_range(0..=3usize);
    let mut breakpoints: Vec<Rat> = (0..k)
        .map(|_| {
            let d = rng.gen_range(1..=4i64);
            Rat::new(rng.gen_range(-4 * d..=4 * d).into(), d.into())
        })
        .collect();
    breakpoints.sort();
    breakpoints.dedup();
    let mut slopes: Vec<Rat> = (0..=breakpoints.len())
        .map(|_| {
            let d = rng.gen_range(1..=4i64);
            Rat::new(rng.gen_range(-3 * d..=3 * d).into(), d.into())
        })
        .collect();
    slopes.sort();
    PiecewiseLinearConvex::new(breakpoints, slopes).expect("sorted data is convex")
}

/// A random acyclic structural model: every endogenous coordinate depends
/// only on strictly earlier endogenous coordinates and the exogenous point,
/// so each exogenous point has exactly one solution.
pub fn random_acyclic_scm(rng: &mut ChaCha8Rng) -> Scm {
    random_acyclic_scm_result(rng).expect("generator stays under the cap")
}

fn random_acyclic_scm_result(rng: &mut ChaCha8Rng) -> Result<Scm> {
    let n_endo = rng.gen_range(1..=3usize);
    let n_exo = rng.gen_range(1..=2usize);
    let endo_indices = IndexSet::new(1..=n_endo)?;
    let exo_indices = IndexSet::new(101..101 + n_exo)?;
    let endo_spaces: Vec<SpaceRef> = (0..n_endo)
        .map(|_| space(rng.gen_range(2..=3usize)))
        .collect();
    let exo_spaces: Vec<SpaceRef> = (0..n_exo)
        .map(|_| space(rng.gen_range(2..=3usize)))
        .collect();
    let endo_product = ProductSpace::new(endo_indices.clone(), endo_spaces.clone())?;
    let exo_product = ProductSpace::new(exo_indices.clone(), exo_spaces.clone())?;
    let exo_law = random_probability(rng, exo_product.space());
    // per coordinate i: a table over (earlier endo coords, exo point)
    let mut tables: Vec<Vec<usize>> = Vec::with_capacity(n_endo);
    for i in 0..n_endo {
        let prefix_size: usize = endo_spaces[..i].iter().map(|s| s.size()).product();
        let rows = prefix_size * exo_product.len();
        tables.push(
            (0..rows)
                .map(|_| rng.gen_range(0..endo_spaces[i].size()))
                .collect(),
        );
    }
    let prefix_id = |coords: &[usize], i: usize| -> usize {
        let mut id = 0;
        for k in 0..i {
            id = id * endo_spaces[k].size() + coords[k];
        }
        id
    };
    let mut mechanism = Vec::with_capacity(endo_product.len() * exo_product.len());
    for x in 0..endo_product.len() {
        let coords = endo_product.coords(x);
        for e in 0..exo_product.len() {
            let out: Vec<usize> = (0..n_endo)
                .map(|i| tables[i][prefix_id(&coords, i) * exo_product.len() + e])
                .collect();
            mechanism.push(endo_product.point(&out));
        }
    }
    Scm::new(
        endo_indices,
        exo_indices,
        endo_spaces,
        exo_spaces,
        exo_law.weights().to_vec(),
        mechanism,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn probabilities_have_small_denominators_and_unit_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let s = space(4);
            let p = random_probability(&mut rng, &s);
            assert_eq!(p.total(), Rat::new(1.into(), 1.into()));
            for w in p.weights() {
                assert!(*w.denom() <= 8.into());
            }
        }
    }

    #[test]
    fn partition_pairs_are_nested() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let s = space(4);
            let (coarse, fine) = random_partition_pair(&mut rng, &s);
            assert!(fine.refines(&coarse).unwrap());
        }
    }

    #[test]
    fn acyclic_models_always_solve_uniquely() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let scm = random_acyclic_scm(&mut rng);
            for (e, fixed) in scm.solve().entries() {
                assert_eq!(fixed.len(), 1, "exo point {e} has {} solutions", fixed.len());
            }
        }
    }

    #[test]
    fn product_scenarios_have_product_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ps = random_product_scenario(&mut rng, "t");
        assert_eq!(ps.scenario.base.total(), Rat::new(1.into(), 1.into()));
        assert!(!ps.left.is_empty() && !ps.right.is_empty());
    }
}
