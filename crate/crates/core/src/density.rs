//! Densities of joint laws with respect to product measures: existence,
//! marginalization, kernels from densities, factorization and change of
//! base.
//!
//! On finite spaces a density is a pointwise ratio of masses wherever the
//! base is positive, canonically zero elsewhere. Against the product of the
//! law's own marginals, absolute continuity is automatic (a marginal-null
//! coordinate nulls the joint); against a general base family it can fail,
//! and that failure is reported with the witnessing point.

use std::collections::BTreeMap;

use num::Zero;

use crate::conditioning::Kernel;
use crate::error::{Error, Result};
use crate::measure::{MeasureKind, RationalMeasure};
use crate::object::{bundle_with_cap, pushforward, RandomObject};
use crate::rational::Rat;
use crate::space::{require_same_space, IndexSet, ProductSpace, SpaceRef};
use crate::DEFAULT_PRODUCT_CAP;

/// One base measure per index, each over the matching factor space.
/// Zero weights are allowed; they are where absolute continuity can fail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseFamily {
    index_set: IndexSet,
    bases: Vec<RationalMeasure>,
}

impl BaseFamily {
    pub fn new(index_set: IndexSet, bases: Vec<RationalMeasure>) -> Result<BaseFamily> {
        if bases.len() != index_set.len() {
            return Err(Error::IndexMismatch);
        }
        Ok(BaseFamily { index_set, bases })
    }

    pub fn index_set(&self) -> &IndexSet {
        &self.index_set
    }

    pub fn bases(&self) -> &[RationalMeasure] {
        &self.bases
    }

    pub fn base_at(&self, index: usize) -> Option<&RationalMeasure> {
        self.index_set.position(index).map(|p| &self.bases[p])
    }

    /// Counting measure on every factor.
    pub fn counting(product: &ProductSpace) -> BaseFamily {
        BaseFamily {
            index_set: product.index_set().clone(),
            bases: product
                .factors()
                .iter()
                .map(|f| RationalMeasure::counting(f.clone()))
                .collect(),
        }
    }
}

/// A density of a joint law with respect to a product base measure: one
/// nonnegative rational per product point, zero at base-null points
/// (the canonical representative of the almost-everywhere class), with
/// Σ value·base = the represented mass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Density {
    product: ProductSpace,
    values: Vec<Rat>,
    factor_bases: Vec<RationalMeasure>,
}

impl Density {
    pub fn product(&self) -> &ProductSpace {
        &self.product
    }

    pub fn index_set(&self) -> &IndexSet {
        self.product.index_set()
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn value(&self, point: usize) -> &Rat {
        &self.values[point]
    }

    /// Per-index bases whose product is the reference measure.
    pub fn factor_bases(&self) -> &[RationalMeasure] {
        &self.factor_bases
    }

    /// The product base mass of one point.
    pub fn base_weight(&self, point: usize) -> Rat {
        let coords = self.product.coords(point);
        let mut w = Rat::new(1.into(), 1.into());
        for (k, base) in self.factor_bases.iter().enumerate() {
            w *= base.weight(coords[k]);
            if w.is_zero() {
                break;
            }
        }
        w
    }

    /// Integrates the density against its base over the whole product:
    /// the total mass of the represented law.
    pub fn total_mass(&self) -> Rat {
        (0..self.product.len())
            .map(|pt| self.value(pt) * self.base_weight(pt))
            .sum()
    }

    /// The represented law recovered pointwise: value · base per point.
    pub fn law(&self) -> Result<RationalMeasure> {
        let weights = (0..self.product.len())
            .map(|pt| self.value(pt) * self.base_weight(pt))
            .collect();
        RationalMeasure::new(self.product.space().clone(), weights, MeasureKind::Finite)
    }
}

fn canonical_density(
    product: ProductSpace,
    law: &RationalMeasure,
    factor_bases: Vec<RationalMeasure>,
) -> Result<Density> {
    let mut values = Vec::with_capacity(product.len());
    for pt in 0..product.len() {
        let coords = product.coords(pt);
        let mut base = Rat::new(1.into(), 1.into());
        for (k, b) in factor_bases.iter().enumerate() {
            base *= b.weight(coords[k]);
            if base.is_zero() {
                break;
            }
        }
        if base.is_zero() {
            if !law.weight(pt).is_zero() {
                return Err(Error::NotAbsolutelyContinuous {
                    point: coords,
                    mass: crate::rational::format_rat(law.weight(pt)),
                });
            }
            values.push(Rat::zero());
        } else {
            values.push(law.weight(pt) / base);
        }
    }
    Ok(Density {
        product,
        values,
        factor_bases,
    })
}

/// Joint law of the indexed objects on their product space, with the
/// bundling product returned alongside.
fn joint_law(
    p: &RationalMeasure,
    objects: &BTreeMap<usize, RandomObject>,
    index_set: &IndexSet,
    cap: usize,
) -> Result<(ProductSpace, RationalMeasure)> {
    let (bundled, product) = bundle_with_cap(objects, index_set, cap)?;
    require_same_space(p.space(), bundled.domain(), "density base measure")?;
    let law = pushforward(p, &bundled)?;
    Ok((product, law))
}

/// Density of the joint law with respect to the product of its own
/// marginals. Always exists on finite spaces: any marginal-null coordinate
/// nulls the joint, so the ratio is taken only where the base is positive.
pub fn density_wrt_marginals(
    p: &RationalMeasure,
    objects: &BTreeMap<usize, RandomObject>,
    index_set: &IndexSet,
) -> Result<Density> {
    density_wrt_marginals_with_cap(p, objects, index_set, DEFAULT_PRODUCT_CAP)
}

pub fn density_wrt_marginals_with_cap(
    p: &RationalMeasure,
    objects: &BTreeMap<usize, RandomObject>,
    index_set: &IndexSet,
    cap: usize,
) -> Result<Density> {
    let (product, law) = joint_law(p, objects, index_set, cap)?;
    let mut marginals = Vec::with_capacity(index_set.len());
    for i in index_set.iter() {
        let m = pushforward(p, &objects[&i])?.with_kind(MeasureKind::Base)?;
        marginals.push(m);
    }
    canonical_density(product, &law, marginals)
}

/// Density of the joint law with respect to a general product base family.
/// Fails with the witnessing point when some point carries positive
/// probability but zero base weight.
pub fn density_wrt_base(
    p: &RationalMeasure,
    objects: &BTreeMap<usize, RandomObject>,
    index_set: &IndexSet,
    bases: &BaseFamily,
) -> Result<Density> {
    if bases.index_set() != index_set {
        return Err(Error::IndexMismatch);
    }
    let (product, law) = joint_law(p, objects, index_set, DEFAULT_PRODUCT_CAP)?;
    for (k, i) in index_set.iter().enumerate() {
        require_same_space(
            bases.bases()[k].space(),
            &product.factors()[k],
            &format!("base measure at index {i}"),
        )?;
    }
    canonical_density(product, &law, bases.bases().to_vec())
}

/// Points whose marginalization sum fails to be a finite rational. With
/// exact arithmetic over finitely many terms there are none; the clamp set
/// exists so the marginalization routine keeps the shape
/// "integrate, then zero the divergent set".
fn divergence_set(_sums: &[Rat]) -> Vec<usize> {
    Vec::new()
}

/// Marginal density onto a sub-index-set: integrates the complementary
/// coordinates out against their bases, then zeroes the (empty at finite
/// scale) divergence set. Agrees with the directly computed density of the
/// sub-family almost everywhere by construction.
pub fn marginal_density(f: &Density, keep: &IndexSet) -> Result<Density> {
    if !keep.is_subset(f.index_set()) {
        let missing = keep
            .iter()
            .find(|i| !f.index_set().contains(*i))
            .expect("non-subset has a missing index");
        return Err(Error::IndexNotSubset(missing));
    }
    let dropped = f.index_set().difference(keep);
    if dropped.is_empty() {
        return Ok(f.clone());
    }
    let keep_positions: Vec<usize> = keep
        .iter()
        .map(|i| f.index_set().position(i).unwrap())
        .collect();
    let drop_positions: Vec<usize> = dropped
        .iter()
        .map(|i| f.index_set().position(i).unwrap())
        .collect();
    let kept_factors: Vec<SpaceRef> = keep_positions
        .iter()
        .map(|&k| f.product().factors()[k].clone())
        .collect();
    let kept_bases: Vec<RationalMeasure> = keep_positions
        .iter()
        .map(|&k| f.factor_bases()[k].clone())
        .collect();
    let reduced = ProductSpace::new(keep.clone(), kept_factors)?;
    let mut sums = vec![Rat::zero(); reduced.len()];
    for pt in 0..f.product().len() {
        let v = f.value(pt);
        if v.is_zero() {
            continue;
        }
        let coords = f.product().coords(pt);
        let mut weight = v.clone();
        for &k in &drop_positions {
            weight *= f.factor_bases()[k].weight(coords[k]);
            if weight.is_zero() {
                break;
            }
        }
        if weight.is_zero() {
            continue;
        }
        let kept: Vec<usize> = keep_positions.iter().map(|&k| coords[k]).collect();
        sums[reduced.point(&kept)] += weight;
    }
    for pt in divergence_set(&sums) {
        sums[pt] = Rat::zero();
    }
    Ok(Density {
        product: reduced,
        values: sums,
        factor_bases: kept_bases,
    })
}

/// Conditional kernel of the `target` coordinates given the `source`
/// coordinates, computed from the density alone: rows are the normalized
/// slices of the (complement-marginalized) density, weighted by the target
/// bases; rows whose normalizer vanishes are zero.
pub fn kernel_from_density(f: &Density, source: &IndexSet, target: &IndexSet) -> Result<Kernel> {
    if let Some(i) = source.iter().find(|i| target.contains(*i)) {
        return Err(Error::IndexOverlap(i));
    }
    if !source.is_subset(f.index_set()) {
        return Err(Error::IndexNotSubset(
            source
                .iter()
                .find(|i| !f.index_set().contains(*i))
                .unwrap(),
        ));
    }
    if !target.is_subset(f.index_set()) {
        return Err(Error::IndexNotSubset(
            target
                .iter()
                .find(|i| !f.index_set().contains(*i))
                .unwrap(),
        ));
    }
    // marginalize any leftover coordinates first
    let joint_indices = source.disjoint_union(target)?;
    let g = marginal_density(f, &joint_indices)?;
    let tgt_positions: Vec<usize> = target
        .iter()
        .map(|i| g.index_set().position(i).unwrap())
        .collect();
    let src_positions: Vec<usize> = source
        .iter()
        .map(|i| g.index_set().position(i).unwrap())
        .collect();
    let target_factors: Vec<SpaceRef> = tgt_positions
        .iter()
        .map(|&k| g.product().factors()[k].clone())
        .collect();
    let target_product = ProductSpace::new(target.clone(), target_factors)?;
    let source_factors: Vec<SpaceRef> = src_positions
        .iter()
        .map(|&k| g.product().factors()[k].clone())
        .collect();
    let source_product = ProductSpace::new(source.clone(), source_factors)?;
    let source_space = source_product.space().clone();
    let mut rows = Vec::with_capacity(source_space.size());
    let mut support = Vec::new();
    for x in 0..source_space.size() {
        let x_coords = source_product.coords(x);
        // numerator weights and the row normalizer, from the joint slice
        let mut weights = vec![Rat::zero(); target_product.len()];
        let mut normalizer = Rat::zero();
        for pt in 0..g.product().len() {
            let coords = g.product().coords(pt);
            if src_positions
                .iter()
                .zip(&x_coords)
                .any(|(&k, &xc)| coords[k] != xc)
            {
                continue;
            }
            let mut mass = g.value(pt).clone();
            if mass.is_zero() {
                continue;
            }
            for &k in &tgt_positions {
                mass *= g.factor_bases()[k].weight(coords[k]);
                if mass.is_zero() {
                    break;
                }
            }
            if mass.is_zero() {
                continue;
            }
            let tgt_coords: Vec<usize> = tgt_positions.iter().map(|&k| coords[k]).collect();
            weights[target_product.point(&tgt_coords)] += mass.clone();
            normalizer += mass;
        }
        if normalizer.is_zero() {
            rows.push(RationalMeasure::zero(target_product.space().clone()));
        } else {
            for w in weights.iter_mut() {
                *w /= normalizer.clone();
            }
            rows.push(RationalMeasure::new(
                target_product.space().clone(),
                weights,
                MeasureKind::Finite,
            )?);
            support.push(x);
        }
    }
    Ok(Kernel::assemble(
        source_space,
        target_product.space().clone(),
        rows,
        support,
        false,
    ))
}

/// Splits the density along a partition of its index set. Succeeds with
/// the per-block marginal densities when the joint factorizes as their
/// product almost everywhere; otherwise reports the first witnessing point.
pub fn factorize_if_independent(f: &Density, blocks: &[IndexSet]) -> Result<Vec<Density>> {
    // blocks must partition the index set
    let mut seen = IndexSet::maybe_empty(std::iter::empty());
    for b in blocks {
        if !b.is_disjoint(&seen) || !b.is_subset(f.index_set()) {
            return Err(Error::BadPartition);
        }
        seen = IndexSet::maybe_empty(seen.iter().chain(b.iter()));
    }
    if seen.len() != f.index_set().len() {
        return Err(Error::BadPartition);
    }
    let parts: Vec<Density> = blocks
        .iter()
        .map(|b| marginal_density(f, b))
        .collect::<Result<_>>()?;
    for pt in 0..f.product().len() {
        if f.base_weight(pt).is_zero() {
            continue;
        }
        let coords = f.product().coords(pt);
        let mut prod = Rat::new(1.into(), 1.into());
        for part in &parts {
            let sub: Vec<usize> = part
                .index_set()
                .iter()
                .map(|i| coords[f.index_set().position(i).unwrap()])
                .collect();
            prod *= part.value(part.product().point(&sub));
        }
        if *f.value(pt) != prod {
            return Err(Error::NotFactorizable { point: coords });
        }
    }
    Ok(parts)
}

/// Rebases a density taken against the product of marginals onto a general
/// product base: multiply by the per-index marginal densities and
/// re-canonicalize to zero on base-null points.
///
/// `marginal_densities` must be single-index densities of the marginals
/// with respect to the new per-index bases, in index order.
pub fn change_of_base(f_wrt_marginals: &Density, marginal_densities: &[Density]) -> Result<Density> {
    if marginal_densities.len() != f_wrt_marginals.index_set().len() {
        return Err(Error::IndexMismatch);
    }
    for (k, (i, md)) in f_wrt_marginals
        .index_set()
        .iter()
        .zip(marginal_densities)
        .enumerate()
    {
        if md.index_set().len() != 1 || !md.index_set().contains(i) {
            return Err(Error::IndexMismatch);
        }
        require_same_space(
            &md.product().factors()[0],
            &f_wrt_marginals.product().factors()[k],
            "change-of-base factor",
        )?;
    }
    let new_bases: Vec<RationalMeasure> = marginal_densities
        .iter()
        .map(|md| md.factor_bases()[0].clone())
        .collect();
    let product = f_wrt_marginals.product().clone();
    let mut values = Vec::with_capacity(product.len());
    for pt in 0..product.len() {
        let coords = product.coords(pt);
        let mut base = Rat::new(1.into(), 1.into());
        for (k, b) in new_bases.iter().enumerate() {
            base *= b.weight(coords[k]);
            if base.is_zero() {
                break;
            }
        }
        if base.is_zero() {
            values.push(Rat::zero());
            continue;
        }
        let mut v = f_wrt_marginals.value(pt).clone();
        for (k, md) in marginal_densities.iter().enumerate() {
            v *= md.value(coords[k]);
            if v.is_zero() {
                break;
            }
        }
        values.push(v);
    }
    Ok(Density {
        product,
        values,
        factor_bases: new_bases,
    })
}
