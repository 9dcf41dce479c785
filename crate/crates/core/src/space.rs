//! Finite measurable spaces, sub-σ-fields as partitions, events, index sets
//! and lexicographic product spaces.
//!
//! On a finite space every σ-field is generated by a unique partition, so
//! sub-σ-fields are represented by partitions and nothing else: the discrete
//! partition is the full σ-field, coarser partitions are smaller fields.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::DEFAULT_PRODUCT_CAP;

/// A finite sample space: `size` outcomes, optionally labeled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSpace {
    size: usize,
    labels: Option<Vec<String>>,
}

/// Shared handle to a space. Spaces compare structurally; sharing through
/// `Arc` keeps clones cheap.
pub type SpaceRef = Arc<FiniteSpace>;

impl FiniteSpace {
    /// Builds a space with `size` outcomes and optional unique labels.
    pub fn new(size: usize, labels: Option<Vec<String>>) -> Result<SpaceRef> {
        if size == 0 {
            return Err(Error::ZeroSize);
        }
        if let Some(ref ls) = labels {
            if ls.len() != size {
                return Err(Error::InvalidMeasure(format!(
                    "expected {size} labels, got {}",
                    ls.len()
                )));
            }
            let mut seen = BTreeSet::new();
            for l in ls {
                if !seen.insert(l) {
                    return Err(Error::DuplicateLabel(l.clone()));
                }
            }
        }
        Ok(Arc::new(FiniteSpace { size, labels }))
    }

    /// Unlabeled space with `size` outcomes.
    pub fn unlabeled(size: usize) -> Result<SpaceRef> {
        FiniteSpace::new(size, None)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of an outcome, or its index rendered as text.
    pub fn label_of(&self, outcome: usize) -> String {
        match &self.labels {
            Some(ls) => ls[outcome].clone(),
            None => outcome.to_string(),
        }
    }

    /// Outcome index carrying the given label.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels
            .as_ref()
            .and_then(|ls| ls.iter().position(|l| l == label))
    }

    pub fn outcomes(&self) -> std::ops::Range<usize> {
        0..self.size
    }
}

/// Checks two spaces agree, with a caller-supplied context for the error.
pub(crate) fn require_same_space(a: &SpaceRef, b: &SpaceRef, context: &str) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::SpaceMismatch(context.to_string()))
    }
}

/// An event: a set of outcome indices of one space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    space: SpaceRef,
    members: BTreeSet<usize>,
}

impl Event {
    pub fn new(space: SpaceRef, members: impl IntoIterator<Item = usize>) -> Result<Event> {
        let members: BTreeSet<usize> = members.into_iter().collect();
        if let Some(&m) = members.iter().next_back() {
            if m >= space.size() {
                return Err(Error::EventOutOfRange {
                    member: m,
                    size: space.size(),
                });
            }
        }
        Ok(Event { space, members })
    }

    /// The sure event Ω.
    pub fn full(space: SpaceRef) -> Event {
        let members = space.outcomes().collect();
        Event { space, members }
    }

    /// The empty event.
    pub fn empty(space: SpaceRef) -> Event {
        Event {
            space,
            members: BTreeSet::new(),
        }
    }

    /// Singleton event {outcome}.
    pub fn singleton(space: SpaceRef, outcome: usize) -> Result<Event> {
        Event::new(space, [outcome])
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn contains(&self, outcome: usize) -> bool {
        self.members.contains(&outcome)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == self.space.size()
    }

    pub fn intersect(&self, other: &Event) -> Result<Event> {
        require_same_space(&self.space, &other.space, "events on different spaces")?;
        Ok(Event {
            space: self.space.clone(),
            members: self.members.intersection(&other.members).copied().collect(),
        })
    }

    pub fn union(&self, other: &Event) -> Result<Event> {
        require_same_space(&self.space, &other.space, "events on different spaces")?;
        Ok(Event {
            space: self.space.clone(),
            members: self.members.union(&other.members).copied().collect(),
        })
    }

    pub fn complement(&self) -> Event {
        let members = self
            .space
            .outcomes()
            .filter(|o| !self.members.contains(o))
            .collect();
        Event {
            space: self.space.clone(),
            members,
        }
    }

    pub fn is_subset(&self, other: &Event) -> bool {
        self.members.is_subset(&other.members)
    }

    /// True iff the event is a union of blocks of `field`.
    pub fn measurable_wrt(&self, field: &Partition) -> bool {
        field.blocks().iter().all(|block| {
            let inside = block.iter().filter(|o| self.contains(**o)).count();
            inside == 0 || inside == block.len()
        })
    }

    /// All 2^n events of a space, in a fixed enumeration order. Intended for
    /// exhaustive checks on small spaces.
    pub fn enumerate_all(space: &SpaceRef) -> Vec<Event> {
        let n = space.size();
        assert!(n <= 16, "event enumeration is for small spaces only");
        (0u32..1 << n)
            .map(|mask| {
                let members = (0..n).filter(|i| mask >> i & 1 == 1);
                Event::new(space.clone(), members).unwrap()
            })
            .collect()
    }
}

/// A partition of a space's outcomes; stands for the sub-σ-field it
/// generates. Stored canonically: members sorted within blocks, blocks
/// sorted by least member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    space: SpaceRef,
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl Partition {
    pub fn new(space: SpaceRef, blocks: Vec<Vec<usize>>) -> Result<Partition> {
        let mut block_of = vec![usize::MAX; space.size()];
        let mut canonical: Vec<Vec<usize>> = Vec::with_capacity(blocks.len());
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            let mut b: Vec<usize> = block.clone();
            b.sort_unstable();
            b.dedup();
            if b.len() != block.len() {
                return Err(Error::InvalidPartition("duplicate member in a block".into()));
            }
            for &o in &b {
                if o >= space.size() {
                    return Err(Error::EventOutOfRange {
                        member: o,
                        size: space.size(),
                    });
                }
                if block_of[o] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "outcome {o} appears in two blocks"
                    )));
                }
                block_of[o] = 0; // placeholder, fixed after sorting blocks
            }
            canonical.push(b);
        }
        if block_of.contains(&usize::MAX) {
            return Err(Error::InvalidPartition(
                "blocks do not cover the space".into(),
            ));
        }
        canonical.sort_by_key(|b| b[0]);
        for (i, b) in canonical.iter().enumerate() {
            for &o in b {
                block_of[o] = i;
            }
        }
        Ok(Partition {
            space,
            blocks: canonical,
            block_of,
        })
    }

    /// The discrete partition (all singletons): the full σ-field.
    pub fn discrete(space: SpaceRef) -> Partition {
        let blocks: Vec<Vec<usize>> = space.outcomes().map(|o| vec![o]).collect();
        let block_of = space.outcomes().collect();
        Partition {
            space,
            blocks,
            block_of,
        }
    }

    /// The indiscrete partition {Ω}: the trivial σ-field.
    pub fn indiscrete(space: SpaceRef) -> Partition {
        let blocks = vec![space.outcomes().collect()];
        let block_of = vec![0; space.size()];
        Partition {
            space,
            blocks,
            block_of,
        }
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Index of the block containing `outcome`.
    pub fn block_index_of(&self, outcome: usize) -> usize {
        self.block_of[outcome]
    }

    /// Members of the block containing `outcome`.
    pub fn block_of(&self, outcome: usize) -> &[usize] {
        &self.blocks[self.block_of[outcome]]
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.len() == self.space.size()
    }

    /// True iff `self` refines `coarser`: every block of `self` lies inside
    /// one block of `coarser`. Partition refinement is exactly σ-field
    /// inclusion: the refining partition generates the larger field.
    pub fn refines(&self, coarser: &Partition) -> Result<bool> {
        require_same_space(&self.space, &coarser.space, "partitions on different spaces")?;
        Ok(self.blocks.iter().all(|block| {
            let target = coarser.block_of[block[0]];
            block.iter().all(|&o| coarser.block_of[o] == target)
        }))
    }

    /// Every partition of a small space, for enumeration checks.
    pub fn enumerate_all(space: &SpaceRef) -> Vec<Partition> {
        let n = space.size();
        assert!(n <= 8, "partition enumeration is for small spaces only");
        let mut out = Vec::new();
        // Restricted growth strings enumerate set partitions exactly once.
        let mut assignment = vec![0usize; n];
        loop {
            let block_count = assignment.iter().copied().max().unwrap_or(0) + 1;
            let mut blocks = vec![Vec::new(); block_count];
            for (o, &b) in assignment.iter().enumerate() {
                blocks[b].push(o);
            }
            out.push(Partition::new(space.clone(), blocks).unwrap());
            // next restricted growth string
            let mut i = n;
            loop {
                if i <= 1 {
                    return out;
                }
                i -= 1;
                let max_prefix = assignment[..i].iter().copied().max().unwrap_or(0);
                if assignment[i] <= max_prefix {
                    assignment[i] += 1;
                    for a in assignment[i + 1..].iter_mut() {
                        *a = 0;
                    }
                    break;
                }
            }
        }
    }
}

/// A strictly ascending set of natural-number indices. Indices name the
/// coordinates of product spaces and the variables of structural models.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct IndexSet {
    indices: Vec<usize>,
}

impl IndexSet {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Result<IndexSet> {
        let set: BTreeSet<usize> = indices.into_iter().collect();
        if set.is_empty() {
            return Err(Error::EmptyIndexSet);
        }
        Ok(IndexSet {
            indices: set.into_iter().collect(),
        })
    }

    /// An index set that may be empty (some complements are).
    pub fn maybe_empty(indices: impl IntoIterator<Item = usize>) -> IndexSet {
        let set: BTreeSet<usize> = indices.into_iter().collect();
        IndexSet {
            indices: set.into_iter().collect(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// Position of `index` within the ascending enumeration.
    pub fn position(&self, index: usize) -> Option<usize> {
        self.indices.binary_search(&index).ok()
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.indices.iter().all(|i| other.contains(*i))
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.indices.iter().all(|i| !other.contains(*i))
    }

    /// Disjoint union `I₁+I₂`; overlapping inputs are rejected.
    pub fn disjoint_union(&self, other: &IndexSet) -> Result<IndexSet> {
        if !self.is_disjoint(other) {
            return Err(Error::OverlappingIndexSets);
        }
        IndexSet::new(self.indices.iter().chain(other.indices.iter()).copied())
    }

    /// Indices of `self` not in `other`.
    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        IndexSet::maybe_empty(self.indices.iter().copied().filter(|i| !other.contains(*i)))
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// A product of factor spaces over an index set, with its points enumerated
/// lexicographically by ascending index (first index most significant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductSpace {
    index_set: IndexSet,
    factors: Vec<SpaceRef>,
    space: SpaceRef,
}

impl ProductSpace {
    pub fn new(index_set: IndexSet, factors: Vec<SpaceRef>) -> Result<ProductSpace> {
        ProductSpace::with_cap(index_set, factors, DEFAULT_PRODUCT_CAP)
    }

    pub fn with_cap(
        index_set: IndexSet,
        factors: Vec<SpaceRef>,
        cap: usize,
    ) -> Result<ProductSpace> {
        if index_set.is_empty() {
            return Err(Error::EmptyIndexSet);
        }
        if factors.len() != index_set.len() {
            return Err(Error::IndexMismatch);
        }
        let mut size: usize = 1;
        for f in &factors {
            size = size
                .checked_mul(f.size())
                .ok_or(Error::ProductTooLarge { size: usize::MAX, cap })?;
            if size > cap {
                return Err(Error::ProductTooLarge { size, cap });
            }
        }
        // a single-factor product is its factor: 1-tuples carry no structure
        let space = if factors.len() == 1 {
            factors[0].clone()
        } else {
            FiniteSpace::unlabeled(size)?
        };
        Ok(ProductSpace {
            index_set,
            factors,
            space,
        })
    }

    /// Two-factor product with synthetic indices 0 and 1; the first factor
    /// is the most significant coordinate.
    pub fn pair(first: SpaceRef, second: SpaceRef) -> Result<ProductSpace> {
        ProductSpace::new(IndexSet::new([0, 1])?, vec![first, second])
    }

    pub fn index_set(&self) -> &IndexSet {
        &self.index_set
    }

    pub fn factors(&self) -> &[SpaceRef] {
        &self.factors
    }

    /// Factor space attached to an index of the index set.
    pub fn factor(&self, index: usize) -> Option<&SpaceRef> {
        self.index_set.position(index).map(|p| &self.factors[p])
    }

    /// The flattened enumeration space; measures and maps on the product
    /// live on this.
    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.space.size()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Decodes a point id into its coordinate tuple (ascending index order).
    pub fn coords(&self, point: usize) -> Vec<usize> {
        let mut rem = point;
        let mut out = vec![0usize; self.factors.len()];
        for (k, f) in self.factors.iter().enumerate().rev() {
            out[k] = rem % f.size();
            rem /= f.size();
        }
        out
    }

    /// Encodes a coordinate tuple into its point id.
    pub fn point(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.factors.len());
        let mut id = 0usize;
        for (k, f) in self.factors.iter().enumerate() {
            debug_assert!(coords[k] < f.size());
            id = id * f.size() + coords[k];
        }
        id
    }

    /// The cylinder event fixing some coordinates to per-factor events;
    /// indices absent from `constraints` are unconstrained.
    pub fn rectangle(&self, constraints: &BTreeMap<usize, Event>) -> Result<Event> {
        for (i, e) in constraints {
            let pos = self
                .index_set
                .position(*i)
                .ok_or(Error::CoordinateMismatch(format!("index {i} not in product")))?;
            require_same_space(e.space(), &self.factors[pos], "rectangle factor")?;
        }
        let members = (0..self.len()).filter(|&p| {
            let coords = self.coords(p);
            constraints.iter().all(|(i, e)| {
                let pos = self.index_set.position(*i).unwrap();
                e.contains(coords[pos])
            })
        });
        Event::new(self.space.clone(), members)
    }

    /// Product partition whose blocks are products of per-factor blocks.
    pub fn product_partition(&self, fields: &[Partition]) -> Result<Partition> {
        if fields.len() != self.factors.len() {
            return Err(Error::IndexMismatch);
        }
        for (f, field) in self.factors.iter().zip(fields) {
            require_same_space(f, field.space(), "product partition factor")?;
        }
        let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for p in 0..self.len() {
            let key: Vec<usize> = self
                .coords(p)
                .iter()
                .zip(fields)
                .map(|(&c, field)| field.block_index_of(c))
                .collect();
            groups.entry(key).or_default().push(p);
        }
        Partition::new(self.space.clone(), groups.into_values().collect())
    }
}
