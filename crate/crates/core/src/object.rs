//! Random objects: total measurable maps between finite spaces.

use std::collections::BTreeMap;

use num::Zero;

use crate::error::{Error, Result};
use crate::measure::{MeasureKind, RationalMeasure};
use crate::space::{require_same_space, Event, IndexSet, Partition, ProductSpace, SpaceRef};
use crate::DEFAULT_PRODUCT_CAP;

/// A total map from one finite space to another, measurable with respect to
/// the attached domain and codomain fields. The codomain field is the
/// "objective" σ-field: conditioning on this object resolves information
/// exactly down to its blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomObject {
    domain: SpaceRef,
    domain_field: Partition,
    codomain: SpaceRef,
    codomain_field: Partition,
    map: Vec<usize>,
}

impl RandomObject {
    /// Builds an object with explicit fields, checking totality and
    /// measurability (the preimage of every codomain block must be a union
    /// of domain blocks).
    pub fn with_fields(
        domain: SpaceRef,
        domain_field: Partition,
        codomain: SpaceRef,
        codomain_field: Partition,
        map: Vec<usize>,
    ) -> Result<RandomObject> {
        require_same_space(&domain, domain_field.space(), "domain field")?;
        require_same_space(&codomain, codomain_field.space(), "codomain field")?;
        if map.len() != domain.size() {
            return Err(Error::InvalidObject(format!(
                "map has {} entries for a domain of size {}",
                map.len(),
                domain.size()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&y| y >= codomain.size()) {
            return Err(Error::InvalidObject(format!(
                "image {bad} out of range for codomain of size {}",
                codomain.size()
            )));
        }
        let object = RandomObject {
            domain,
            domain_field,
            codomain,
            codomain_field,
            map,
        };
        for block in object.codomain_field.blocks() {
            let pre = Event::new(object.domain.clone(), object.preimage_of_block(block))?;
            if !pre.measurable_wrt(&object.domain_field) {
                return Err(Error::InvalidObject(
                    "preimage of a codomain block is not a union of domain blocks".into(),
                ));
            }
        }
        Ok(object)
    }

    /// Object with discrete fields on both ends; always measurable.
    pub fn new(domain: SpaceRef, codomain: SpaceRef, map: Vec<usize>) -> Result<RandomObject> {
        let domain_field = Partition::discrete(domain.clone());
        let codomain_field = Partition::discrete(codomain.clone());
        RandomObject::with_fields(domain, domain_field, codomain, codomain_field, map)
    }

    /// The identity object on a space, with the full σ-field.
    pub fn identity(space: SpaceRef) -> RandomObject {
        let map = space.outcomes().collect();
        RandomObject {
            domain: space.clone(),
            domain_field: Partition::discrete(space.clone()),
            codomain: space.clone(),
            codomain_field: Partition::discrete(space),
            map,
        }
    }

    /// A constant object into a one-point view of `codomain` is just a
    /// constant map; constants are independent of everything.
    pub fn constant(domain: SpaceRef, codomain: SpaceRef, value: usize) -> Result<RandomObject> {
        if value >= codomain.size() {
            return Err(Error::EventOutOfRange {
                member: value,
                size: codomain.size(),
            });
        }
        RandomObject::new(domain.clone(), codomain, vec![value; domain.size()])
    }

    pub fn domain(&self) -> &SpaceRef {
        &self.domain
    }

    pub fn domain_field(&self) -> &Partition {
        &self.domain_field
    }

    pub fn codomain(&self) -> &SpaceRef {
        &self.codomain
    }

    pub fn codomain_field(&self) -> &Partition {
        &self.codomain_field
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, outcome: usize) -> usize {
        self.map[outcome]
    }

    fn preimage_of_block(&self, block: &[usize]) -> Vec<usize> {
        self.domain
            .outcomes()
            .filter(|&o| block.contains(&self.map[o]))
            .collect()
    }

    /// Preimage of a codomain event as a domain event.
    pub fn preimage(&self, event: &Event) -> Result<Event> {
        require_same_space(&self.codomain, event.space(), "preimage of foreign event")?;
        Event::new(
            self.domain.clone(),
            self.domain.outcomes().filter(|&o| event.contains(self.map[o])),
        )
    }

    /// Same pointwise map, codomain field replaced by `field`. This is the
    /// coarsening X ↦ X_𝒢; the identity object coarsened to 𝒢 is I_𝒢.
    pub fn coarsen(&self, field: Partition) -> Result<RandomObject> {
        require_same_space(&self.codomain, field.space(), "coarsening field")?;
        RandomObject::with_fields(
            self.domain.clone(),
            self.domain_field.clone(),
            self.codomain.clone(),
            field,
            self.map.clone(),
        )
    }

    /// Composition `after ∘ self` (apply `self` first).
    pub fn then(&self, after: &RandomObject) -> Result<RandomObject> {
        require_same_space(&self.codomain, after.domain(), "composition")?;
        RandomObject::new(
            self.domain.clone(),
            after.codomain.clone(),
            self.map.iter().map(|&y| after.map[y]).collect(),
        )
    }
}

/// The induced measure `P[X]`: weight of y is the mass of the preimage of y.
/// Mass is preserved exactly for probability and finite kinds.
pub fn pushforward(p: &RationalMeasure, x: &RandomObject) -> Result<RationalMeasure> {
    require_same_space(p.space(), x.domain(), "pushforward")?;
    let mut weights = vec![crate::rational::zero(); x.codomain().size()];
    for o in x.domain().outcomes() {
        let w = p.weight(o);
        if !w.is_zero() {
            weights[x.apply(o)] += w;
        }
    }
    let kind = match p.kind() {
        MeasureKind::Probability => MeasureKind::Probability,
        _ => MeasureKind::Finite,
    };
    RationalMeasure::new(x.codomain().clone(), weights, kind)
}

/// Bundles the selected objects into one object valued in the product of
/// their codomains, coordinates ordered by ascending index. The codomain
/// field is the product of the component codomain fields.
pub fn bundle(
    objects: &BTreeMap<usize, RandomObject>,
    index_set: &IndexSet,
) -> Result<(RandomObject, ProductSpace)> {
    bundle_with_cap(objects, index_set, DEFAULT_PRODUCT_CAP)
}

pub fn bundle_with_cap(
    objects: &BTreeMap<usize, RandomObject>,
    index_set: &IndexSet,
    cap: usize,
) -> Result<(RandomObject, ProductSpace)> {
    if index_set.is_empty() {
        return Err(Error::EmptyIndexSet);
    }
    let mut picked = Vec::with_capacity(index_set.len());
    for i in index_set.iter() {
        let obj = objects.get(&i).ok_or(Error::UnknownIndex(i))?;
        picked.push(obj);
    }
    let domain = picked[0].domain().clone();
    for obj in &picked {
        if **obj.domain() != *domain {
            return Err(Error::DomainMismatch);
        }
    }
    let factors: Vec<SpaceRef> = picked.iter().map(|o| o.codomain().clone()).collect();
    let product = ProductSpace::with_cap(index_set.clone(), factors, cap)?;
    let map: Vec<usize> = domain
        .outcomes()
        .map(|o| {
            let coords: Vec<usize> = picked.iter().map(|x| x.apply(o)).collect();
            product.point(&coords)
        })
        .collect();
    let fields: Vec<Partition> = picked.iter().map(|o| o.codomain_field().clone()).collect();
    let codomain_field = product.product_partition(&fields)?;
    let object = RandomObject::with_fields(
        domain.clone(),
        picked[0].domain_field().clone(),
        product.space().clone(),
        codomain_field,
        map,
    )?;
    Ok((object, product))
}

/// Coordinate projection of a bundled object back onto one component.
pub fn project(product: &ProductSpace, index: usize) -> Result<RandomObject> {
    let pos = product
        .index_set()
        .position(index)
        .ok_or(Error::CoordinateMismatch(format!("index {index} not in product")))?;
    let codomain = product.factors()[pos].clone();
    let map = (0..product.len()).map(|p| product.coords(p)[pos]).collect();
    RandomObject::new(product.space().clone(), codomain, map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::space::FiniteSpace;

    fn space(n: usize) -> SpaceRef {
        FiniteSpace::unlabeled(n).unwrap()
    }

    /// Four-point uniform base with parity and high-bit observables.
    pub(crate) fn m0() -> (SpaceRef, RationalMeasure, RandomObject, RandomObject) {
        let omega = space(4);
        let p = RationalMeasure::uniform(omega.clone());
        let parity =
            RandomObject::new(omega.clone(), space(2), vec![0, 1, 0, 1]).unwrap();
        let high = RandomObject::new(omega.clone(), space(2), vec![0, 0, 1, 1]).unwrap();
        (omega, p, parity, high)
    }

    #[test]
    fn pushforward_of_uniform_parity() {
        let (_, p, parity, _) = m0();
        let law = pushforward(&p, &parity).unwrap();
        assert_eq!(law.weights(), &[ratio(1, 2), ratio(1, 2)]);
        assert_eq!(law.kind(), MeasureKind::Probability);
    }

    #[test]
    fn pushforward_through_identity_is_identity() {
        let (omega, p, _, _) = m0();
        let id = RandomObject::identity(omega);
        assert_eq!(pushforward(&p, &id).unwrap(), p);
    }

    #[test]
    fn point_mass_transport() {
        let (omega, _, _, high) = m0();
        let delta = RationalMeasure::point_mass(omega, 3).unwrap();
        let law = pushforward(&delta, &high).unwrap();
        assert_eq!(law.weights(), &[ratio(0, 1), ratio(1, 1)]);
    }

    #[test]
    fn bundle_maps_componentwise() {
        let (_, _, parity, high) = m0();
        let mut objs = BTreeMap::new();
        objs.insert(1usize, parity);
        objs.insert(2usize, high);
        let idx = IndexSet::new([1, 2]).unwrap();
        let (xb, product) = bundle(&objs, &idx).unwrap();
        // tuple coordinates: (parity, high) for outcomes 0..4
        let expect = [(0, 0), (1, 0), (0, 1), (1, 1)];
        for (o, &(pc, hc)) in expect.iter().enumerate() {
            assert_eq!(product.coords(xb.apply(o)), vec![pc, hc]);
        }
    }

    #[test]
    fn bundle_projection_recovers_components() {
        let (_, _, parity, high) = m0();
        let mut objs = BTreeMap::new();
        objs.insert(1usize, parity.clone());
        objs.insert(2usize, high.clone());
        let idx = IndexSet::new([1, 2]).unwrap();
        let (xb, product) = bundle(&objs, &idx).unwrap();
        let p1 = project(&product, 1).unwrap();
        let p2 = project(&product, 2).unwrap();
        for o in 0..4 {
            assert_eq!(p1.apply(xb.apply(o)), parity.apply(o));
            assert_eq!(p2.apply(xb.apply(o)), high.apply(o));
        }
    }

    #[test]
    fn bundle_rejects_mismatched_domains() {
        let (_, _, parity, _) = m0();
        let other = RandomObject::identity(space(3));
        let mut objs = BTreeMap::new();
        objs.insert(1usize, parity);
        objs.insert(2usize, other);
        let idx = IndexSet::new([1, 2]).unwrap();
        assert_eq!(bundle(&objs, &idx).unwrap_err(), Error::DomainMismatch);
    }

    #[test]
    fn singleton_bundle_wraps_component() {
        let (_, _, parity, _) = m0();
        let mut objs = BTreeMap::new();
        objs.insert(1usize, parity.clone());
        let idx = IndexSet::new([1]).unwrap();
        let (xb, product) = bundle(&objs, &idx).unwrap();
        for o in 0..4 {
            assert_eq!(product.coords(xb.apply(o)), vec![parity.apply(o)]);
        }
    }

    #[test]
    fn coarsen_replaces_codomain_field_only() {
        let (omega, _, _, _) = m0();
        let id = RandomObject::identity(omega.clone());
        let halves = Partition::new(omega.clone(), vec![vec![0, 1], vec![2, 3]]).unwrap();
        let coarse = id.coarsen(halves.clone()).unwrap();
        assert_eq!(coarse.map(), id.map());
        assert_eq!(coarse.codomain_field(), &halves);
        // no-op coarsening
        let again = id.coarsen(Partition::discrete(omega.clone())).unwrap();
        assert_eq!(again, id);
        // wrong space
        let bad = id.coarsen(Partition::discrete(space(3)));
        assert!(matches!(bad.unwrap_err(), Error::SpaceMismatch(_)));
    }

    #[test]
    fn measurability_enforced_for_coarse_domain_fields() {
        let omega = space(4);
        let halves = Partition::new(omega.clone(), vec![vec![0, 1], vec![2, 3]]).unwrap();
        // parity is not measurable w.r.t. the halves domain field
        let bad = RandomObject::with_fields(
            omega.clone(),
            halves.clone(),
            space(2),
            Partition::discrete(space(2)),
            vec![0, 1, 0, 1],
        );
        assert!(bad.is_err());
        // high bit is
        let good = RandomObject::with_fields(
            omega.clone(),
            halves,
            space(2),
            Partition::discrete(space(2)),
            vec![0, 0, 1, 1],
        );
        assert!(good.is_ok());
    }
}
