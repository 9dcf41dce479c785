//! Finite structural causal models: solution finding, observational
//! distributions, do-interventions, and the bridge into the query engine.
//!
//! A model is a tuple of disjoint endogenous and exogenous index sets, a
//! finite space per index, an exogenous probability law, and a mechanism
//! table mapping every (endogenous, exogenous) point pair to an endogenous
//! point. A solution at an exogenous point is a fixed point of the
//! mechanism there; the observational distribution exists when every
//! positive-mass exogenous point has exactly one.

use std::collections::BTreeMap;

use num::Zero;

use crate::error::{Error, Result};
use crate::measure::{MeasureKind, RationalMeasure};
use crate::object::RandomObject;
use crate::rational::Rat;
use crate::space::{IndexSet, ProductSpace, SpaceRef};
use crate::DEFAULT_PRODUCT_CAP;

/// A finite structural causal model.
#[derive(Debug, Clone)]
pub struct Scm {
    endo_indices: IndexSet,
    exo_indices: IndexSet,
    endo_product: ProductSpace,
    exo_product: ProductSpace,
    exo_law: RationalMeasure,
    /// mechanism[x * exo_size + e] = f(x, e), all ids lexicographic.
    mechanism: Vec<usize>,
}

/// All endogenous fixed points per positive-mass exogenous point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionMap {
    entries: Vec<(usize, Vec<usize>)>,
}

impl SolutionMap {
    pub fn entries(&self) -> &[(usize, Vec<usize>)] {
        &self.entries
    }

    /// The per-point solutions, if every listed point has exactly one.
    fn unique(&self) -> std::result::Result<BTreeMap<usize, usize>, &(usize, Vec<usize>)> {
        let mut out = BTreeMap::new();
        for entry in &self.entries {
            match entry.1.as_slice() {
                [only] => {
                    out.insert(entry.0, *only);
                }
                _ => return Err(entry),
            }
        }
        Ok(out)
    }
}

/// The engine-facing view of a model: the exogenous product as the base
/// space with the exogenous law, one random object per endogenous index
/// (point to its solved value's coordinate) and one per exogenous index
/// (coordinate projection).
#[derive(Debug, Clone)]
pub struct EngineModel {
    pub base: RationalMeasure,
    pub endo_objects: BTreeMap<usize, RandomObject>,
    pub exo_objects: BTreeMap<usize, RandomObject>,
}

impl Scm {
    pub fn new(
        endo_indices: IndexSet,
        exo_indices: IndexSet,
        endo_spaces: Vec<SpaceRef>,
        exo_spaces: Vec<SpaceRef>,
        exo_law_weights: Vec<Rat>,
        mechanism: Vec<usize>,
    ) -> Result<Scm> {
        Scm::with_cap(
            endo_indices,
            exo_indices,
            endo_spaces,
            exo_spaces,
            exo_law_weights,
            mechanism,
            DEFAULT_PRODUCT_CAP,
        )
    }

    pub fn with_cap(
        endo_indices: IndexSet,
        exo_indices: IndexSet,
        endo_spaces: Vec<SpaceRef>,
        exo_spaces: Vec<SpaceRef>,
        exo_law_weights: Vec<Rat>,
        mechanism: Vec<usize>,
        cap: usize,
    ) -> Result<Scm> {
        if !endo_indices.is_disjoint(&exo_indices) {
            return Err(Error::OverlappingIndexSets);
        }
        let endo_product = ProductSpace::with_cap(endo_indices.clone(), endo_spaces, cap)?;
        let exo_product = ProductSpace::with_cap(exo_indices.clone(), exo_spaces, cap)?;
        let table_len = endo_product
            .len()
            .checked_mul(exo_product.len())
            .filter(|&n| n <= cap)
            .ok_or(Error::ProductTooLarge {
                size: usize::MAX,
                cap,
            })?;
        if mechanism.len() != table_len {
            return Err(Error::InvalidObject(format!(
                "mechanism table has {} entries, expected {}",
                mechanism.len(),
                table_len
            )));
        }
        if let Some(&bad) = mechanism.iter().find(|&&y| y >= endo_product.len()) {
            return Err(Error::InvalidObject(format!(
                "mechanism output {bad} out of range"
            )));
        }
        let exo_law = RationalMeasure::new(
            exo_product.space().clone(),
            exo_law_weights,
            MeasureKind::Probability,
        )?;
        Ok(Scm {
            endo_indices,
            exo_indices,
            endo_product,
            exo_product,
            exo_law,
            mechanism,
        })
    }

    pub fn endo_indices(&self) -> &IndexSet {
        &self.endo_indices
    }

    pub fn exo_indices(&self) -> &IndexSet {
        &self.exo_indices
    }

    pub fn endo_product(&self) -> &ProductSpace {
        &self.endo_product
    }

    pub fn exo_product(&self) -> &ProductSpace {
        &self.exo_product
    }

    pub fn exo_law(&self) -> &RationalMeasure {
        &self.exo_law
    }

    /// The mechanism applied to a pair of point ids.
    pub fn apply_mechanism(&self, endo_point: usize, exo_point: usize) -> usize {
        self.mechanism[endo_point * self.exo_product.len() + exo_point]
    }

    /// Enumerates endogenous fixed points at every positive-mass exogenous
    /// point. Zero-mass points are exempt: solutions only need to exist
    /// almost surely.
    pub fn solve(&self) -> SolutionMap {
        let entries = self
            .exo_law
            .support()
            .into_iter()
            .map(|e| {
                let fixed: Vec<usize> = (0..self.endo_product.len())
                    .filter(|&x| self.apply_mechanism(x, e) == x)
                    .collect();
                (e, fixed)
            })
            .collect();
        SolutionMap { entries }
    }

    /// Pushes the exogenous law through the solved mechanism onto the
    /// endogenous product. Ambiguity and unsolvability are errors carrying
    /// the witnessing exogenous point: there is no canonical selection rule.
    pub fn observational_distribution(&self) -> Result<RationalMeasure> {
        let solutions = self.solve();
        let per_point = match solutions.unique() {
            Ok(map) => map,
            Err((e, fixed)) => {
                let tuple = self.exo_product.coords(*e);
                return Err(if fixed.is_empty() {
                    Error::NoSolution { point: *e, tuple }
                } else {
                    Error::NonUniqueSolution { point: *e, tuple }
                });
            }
        };
        let mut weights = vec![Rat::zero(); self.endo_product.len()];
        for (e, x) in per_point {
            weights[x] += self.exo_law.weight(e);
        }
        RationalMeasure::new(
            self.endo_product.space().clone(),
            weights,
            MeasureKind::Probability,
        )
    }

    /// The do-intervention on one endogenous coordinate: a new model whose
    /// mechanism forces that coordinate to `value`, everything else
    /// untouched.
    pub fn intervene(&self, index: usize, value: usize) -> Result<Scm> {
        let pos = self
            .endo_indices
            .position(index)
            .ok_or(Error::UnknownIndex(index))?;
        let coord_size = self.endo_product.factors()[pos].size();
        if value >= coord_size {
            return Err(Error::BadValue {
                value,
                size: coord_size,
            });
        }
        let exo_len = self.exo_product.len();
        let mut mechanism = Vec::with_capacity(self.mechanism.len());
        for x in 0..self.endo_product.len() {
            for e in 0..exo_len {
                let out = self.apply_mechanism(x, e);
                let mut coords = self.endo_product.coords(out);
                coords[pos] = value;
                mechanism.push(self.endo_product.point(&coords));
            }
        }
        Ok(Scm {
            endo_indices: self.endo_indices.clone(),
            exo_indices: self.exo_indices.clone(),
            endo_product: self.endo_product.clone(),
            exo_product: self.exo_product.clone(),
            exo_law: self.exo_law.clone(),
            mechanism,
        })
    }

    /// Pointwise mechanism equality; two models behave identically iff
    /// their tables agree.
    pub fn same_mechanism(&self, other: &Scm) -> bool {
        self.mechanism == other.mechanism
            && self.endo_product == other.endo_product
            && self.exo_product == other.exo_product
    }

    /// Bridges the solved model into the query engine. Downstream queries
    /// over the returned objects reproduce observational probabilities
    /// exactly. Fails like `observational_distribution` on unsolvable or
    /// ambiguous models.
    ///
    /// The per-exogenous-point solution map is only pinned down almost
    /// surely; at zero-mass exogenous points the objects take an arbitrary
    /// fixed value, which no query can see.
    pub fn as_engine_model(&self) -> Result<EngineModel> {
        let solutions = self.solve();
        let per_point = match solutions.unique() {
            Ok(map) => map,
            Err((e, fixed)) => {
                let tuple = self.exo_product.coords(*e);
                return Err(if fixed.is_empty() {
                    Error::NoSolution { point: *e, tuple }
                } else {
                    Error::NonUniqueSolution { point: *e, tuple }
                });
            }
        };
        let base_space = self.exo_product.space().clone();
        let solved: Vec<usize> = (0..self.exo_product.len())
            .map(|e| per_point.get(&e).copied().unwrap_or(0))
            .collect();
        let mut endo_objects = BTreeMap::new();
        for (pos, i) in self.endo_indices.iter().enumerate() {
            let codomain = self.endo_product.factors()[pos].clone();
            let map = solved
                .iter()
                .map(|&x| self.endo_product.coords(x)[pos])
                .collect();
            endo_objects.insert(i, RandomObject::new(base_space.clone(), codomain, map)?);
        }
        let mut exo_objects = BTreeMap::new();
        for i in self.exo_indices.iter() {
            exo_objects.insert(i, crate::object::project(&self.exo_product, i)?);
        }
        Ok(EngineModel {
            base: self.exo_law.clone(),
            endo_objects,
            exo_objects,
        })
    }
}

/// Brute-force observational distribution: enumerates every (endogenous,
/// exogenous) pair, keeps the fixed points, and aggregates. Independent of
/// the solver's per-point loop; used as the oracle in tests.
pub fn observational_by_enumeration(scm: &Scm) -> Result<RationalMeasure> {
    let mut weights = vec![Rat::zero(); scm.endo_product().len()];
    for e in 0..scm.exo_product().len() {
        let mass = scm.exo_law().weight(e);
        if mass.is_zero() {
            continue;
        }
        let fixed: Vec<usize> = (0..scm.endo_product().len())
            .filter(|&x| scm.apply_mechanism(x, e) == x)
            .collect();
        let tuple = scm.exo_product().coords(e);
        match fixed.as_slice() {
            [] => return Err(Error::NoSolution { point: e, tuple }),
            [x] => weights[*x] += mass,
            _ => return Err(Error::NonUniqueSolution { point: e, tuple }),
        }
    }
    RationalMeasure::new(
        scm.endo_product().space().clone(),
        weights,
        MeasureKind::Probability,
    )
}

/// Observational probability of an endogenous rectangle through the engine
/// bridge, for cross-checks.
pub fn engine_rectangle_probability(
    engine: &EngineModel,
    events: &BTreeMap<usize, crate::space::Event>,
) -> Result<Rat> {
    let mut constraints = Vec::new();
    for (i, event) in events {
        let object = engine
            .endo_objects
            .get(i)
            .or_else(|| engine.exo_objects.get(i))
            .ok_or(Error::UnknownIndex(*i))?;
        constraints.push(crate::cooccurrence::Constraint::new(
            object.clone(),
            event.clone(),
        )?);
    }
    crate::cooccurrence::prob_cooc_objects(&engine.base, &constraints)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::space::{Event, FiniteSpace};

    fn space(n: usize) -> SpaceRef {
        FiniteSpace::unlabeled(n).unwrap()
    }

    fn binary_pair() -> (IndexSet, IndexSet, Vec<SpaceRef>, Vec<SpaceRef>) {
        (
            IndexSet::new([1]).unwrap(),
            IndexSet::new([101]).unwrap(),
            vec![space(2)],
            vec![space(2)],
        )
    }

    /// x := e.
    fn copy_scm(exo_weights: Vec<Rat>) -> Scm {
        let (endo, exo, es, xs) = binary_pair();
        // table rows: endo point x, columns: exo point e, value e
        let mechanism = vec![0, 1, 0, 1];
        Scm::new(endo, exo, es, xs, exo_weights, mechanism).unwrap()
    }

    /// x := x (every point fixed).
    fn identity_scm() -> Scm {
        let (endo, exo, es, xs) = binary_pair();
        let mechanism = vec![0, 0, 1, 1];
        Scm::new(endo, exo, es, xs, vec![ratio(1, 2), ratio(1, 2)], mechanism).unwrap()
    }

    /// x := 1 - x (no fixed point).
    fn involution_scm() -> Scm {
        let (endo, exo, es, xs) = binary_pair();
        let mechanism = vec![1, 1, 0, 0];
        Scm::new(endo, exo, es, xs, vec![ratio(1, 2), ratio(1, 2)], mechanism).unwrap()
    }

    #[test]
    fn copy_mechanism_solves_uniquely() {
        let scm = copy_scm(vec![ratio(1, 3), ratio(2, 3)]);
        let solutions = scm.solve();
        assert_eq!(solutions.entries(), &[(0, vec![0]), (1, vec![1])]);
        let law = scm.observational_distribution().unwrap();
        assert_eq!(law.weights(), &[ratio(1, 3), ratio(2, 3)]);
    }

    #[test]
    fn identity_mechanism_is_ambiguous() {
        let scm = identity_scm();
        let solutions = scm.solve();
        assert_eq!(solutions.entries(), &[(0, vec![0, 1]), (1, vec![0, 1])]);
        match scm.observational_distribution().unwrap_err() {
            Error::NonUniqueSolution { point: 0, tuple } => assert_eq!(tuple, vec![0]),
            other => panic!("expected NonUniqueSolution, got {other:?}"),
        }
    }

    #[test]
    fn involution_has_no_solution() {
        let scm = involution_scm();
        for (_, fixed) in scm.solve().entries() {
            assert!(fixed.is_empty());
        }
        assert!(matches!(
            scm.observational_distribution().unwrap_err(),
            Error::NoSolution { .. }
        ));
    }

    #[test]
    fn zero_mass_points_are_exempt() {
        // involution at the zero-mass exo point, copy elsewhere
        let (endo, exo, es, xs) = binary_pair();
        // columns e=0 (mass 1), e=1 (mass 0): copy on e=0, involution on e=1
        let mechanism = vec![0, 1, 0, 0];
        let scm = Scm::new(endo, exo, es, xs, vec![int(1), int(0)], mechanism).unwrap();
        let law = scm.observational_distribution().unwrap();
        assert_eq!(law.weights(), &[int(1), int(0)]);
    }

    #[test]
    fn two_variable_xor_chain() {
        // x1 := e, x2 := x1 xor e  => unique solution (e, 0)
        let endo = IndexSet::new([1, 2]).unwrap();
        let exo = IndexSet::new([101]).unwrap();
        let endo_spaces = vec![space(2), space(2)];
        let exo_spaces = vec![space(2)];
        let endo_product = ProductSpace::new(endo.clone(), endo_spaces.clone()).unwrap();
        let mut mechanism = Vec::new();
        for x in 0..endo_product.len() {
            let coords = endo_product.coords(x);
            for e in 0..2usize {
                let x1 = e;
                let x2 = coords[0] ^ e;
                mechanism.push(endo_product.point(&[x1, x2]));
            }
        }
        let scm = Scm::new(
            endo,
            exo,
            endo_spaces,
            exo_spaces,
            vec![ratio(1, 4), ratio(3, 4)],
            mechanism,
        )
        .unwrap();
        let law = scm.observational_distribution().unwrap();
        // endo points lexicographic: (0,0),(0,1),(1,0),(1,1)
        assert_eq!(law.weights(), &[ratio(1, 4), int(0), ratio(3, 4), int(0)]);
        assert_eq!(law.total(), int(1));
        let oracle = observational_by_enumeration(&scm).unwrap();
        assert_eq!(law.weights(), oracle.weights());
    }

    #[test]
    fn intervention_forces_downstream_values() {
        // chain x1 := e, x2 := x1; do(x1 := 1) makes x2 constant 1
        let endo = IndexSet::new([1, 2]).unwrap();
        let exo = IndexSet::new([101]).unwrap();
        let endo_spaces = vec![space(2), space(2)];
        let endo_product = ProductSpace::new(endo.clone(), endo_spaces.clone()).unwrap();
        let mut mechanism = Vec::new();
        for x in 0..endo_product.len() {
            let coords = endo_product.coords(x);
            for e in 0..2usize {
                mechanism.push(endo_product.point(&[e, coords[0]]));
            }
        }
        let scm = Scm::new(
            endo,
            exo,
            endo_spaces,
            vec![space(2)],
            vec![ratio(1, 2), ratio(1, 2)],
            mechanism,
        )
        .unwrap();
        let forced = scm.intervene(1, 1).unwrap();
        let law = forced.observational_distribution().unwrap();
        // only (1,1) carries mass
        assert_eq!(law.weights(), &[int(0), int(0), int(0), int(1)]);
        // intervening is idempotent
        let twice = forced.intervene(1, 1).unwrap();
        assert!(twice.same_mechanism(&forced));
        // unknown index and bad value
        assert_eq!(scm.intervene(9, 0).unwrap_err(), Error::UnknownIndex(9));
        assert_eq!(
            scm.intervene(1, 5).unwrap_err(),
            Error::BadValue { value: 5, size: 2 }
        );
    }

    #[test]
    fn intervening_a_constant_coordinate_with_its_constant_is_identity() {
        let scm = copy_scm(vec![ratio(1, 2), ratio(1, 2)]);
        let forced = scm.intervene(1, 0).unwrap();
        let again = forced.intervene(1, 0).unwrap();
        assert!(again.same_mechanism(&forced));
        assert_eq!(forced.solve(), again.solve());
    }

    #[test]
    fn engine_bridge_reproduces_observational_probabilities() {
        let scm = copy_scm(vec![ratio(1, 3), ratio(2, 3)]);
        let engine = scm.as_engine_model().unwrap();
        let x1 = &engine.endo_objects[&1];
        let one = Event::new(x1.codomain().clone(), [1]).unwrap();
        let mut events = BTreeMap::new();
        events.insert(1usize, one);
        let prob = engine_rectangle_probability(&engine, &events).unwrap();
        assert_eq!(prob, ratio(2, 3));
        // chain model: x2 = x1, so they are maximally dependent
        let endo = IndexSet::new([1, 2]).unwrap();
        let exo = IndexSet::new([101]).unwrap();
        let endo_spaces = vec![space(2), space(2)];
        let endo_product = ProductSpace::new(endo.clone(), endo_spaces.clone()).unwrap();
        let mut mechanism = Vec::new();
        for x in 0..endo_product.len() {
            let coords = endo_product.coords(x);
            for e in 0..2usize {
                mechanism.push(endo_product.point(&[e, coords[0]]));
            }
        }
        let chain = Scm::new(
            endo,
            exo,
            endo_spaces,
            vec![space(2)],
            vec![ratio(1, 2), ratio(1, 2)],
            mechanism,
        )
        .unwrap();
        let engine = chain.as_engine_model().unwrap();
        let x1 = engine.endo_objects[&1].clone();
        let x2 = engine.endo_objects[&2].clone();
        let e1 = Event::new(x1.codomain().clone(), [1]).unwrap();
        let e2 = Event::new(x2.codomain().clone(), [1]).unwrap();
        let id_full = crate::cooccurrence::Constraint::new(
            RandomObject::identity(engine.base.space().clone()),
            Event::full(engine.base.space().clone()),
        )
        .unwrap();
        let verdict = crate::conditioning::check_cond_independence(
            &engine.base,
            &crate::conditioning::IndependencePattern::EventEvent {
                left: crate::cooccurrence::Constraint::new(x1, e1).unwrap(),
                right: crate::cooccurrence::Constraint::new(x2, e2).unwrap(),
                given: id_full,
            },
        )
        .unwrap();
        assert!(!verdict.holds);
    }

    #[test]
    fn overlapping_index_sets_rejected() {
        let endo = IndexSet::new([1]).unwrap();
        let exo = IndexSet::new([1]).unwrap();
        let err = Scm::new(
            endo,
            exo,
            vec![space(2)],
            vec![space(2)],
            vec![ratio(1, 2), ratio(1, 2)],
            vec![0, 0, 0, 0],
        )
        .unwrap_err();
        assert_eq!(err, Error::OverlappingIndexSets);
    }
}
