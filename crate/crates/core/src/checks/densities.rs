//! Checks for the density calculus: defining equations, absolute
//! continuity in both directions, marginalization, factorization
//! certificates, kernels from densities, and change of base.

use std::collections::BTreeMap;

use num::Zero;
use rand::Rng;

use crate::conditioning::cond_kernel;
use crate::density::{
    change_of_base, density_wrt_base, density_wrt_marginals, factorize_if_independent,
    kernel_from_density, marginal_density, BaseFamily, Density,
};
use crate::error::Error;
use crate::measure::{MeasureKind, RationalMeasure};
use crate::object::{bundle, pushforward, RandomObject};
use crate::rational::Rat;
use crate::space::IndexSet;

use super::{CheckCtx, Scenario};

fn indexed_objects(scenario: &Scenario, count: usize) -> (BTreeMap<usize, RandomObject>, IndexSet) {
    let mut objects = BTreeMap::new();
    for k in 0..count {
        objects.insert(k + 1, scenario.role(k).clone());
    }
    let idx = IndexSet::new(1..=count).unwrap();
    (objects, idx)
}

/// A base family over the objects' codomains with occasional zero weights,
/// so that absolute continuity sometimes fails on purpose.
fn random_bases(
    ctx: &mut CheckCtx,
    objects: &BTreeMap<usize, RandomObject>,
    idx: &IndexSet,
    allow_zeroes: bool,
) -> BaseFamily {
    let bases = idx
        .iter()
        .map(|i| {
            let codomain = objects[&i].codomain().clone();
            let weights = (0..codomain.size())
                .map(|_| {
                    if allow_zeroes && ctx.rng.gen_bool(0.25) {
                        Rat::zero()
                    } else {
                        Rat::new(ctx.rng.gen_range(1..=4i64).into(), ctx.rng.gen_range(1..=4i64).into())
                    }
                })
                .collect();
            RationalMeasure::new(codomain, weights, MeasureKind::Base).unwrap()
        })
        .collect();
    BaseFamily::new(idx.clone(), bases).unwrap()
}

fn density_satisfies_defining(f: &Density, law: &RationalMeasure) -> bool {
    // per-point (singleton) identity; the full space follows by additivity
    (0..f.product().len()).all(|pt| &(f.value(pt) * f.base_weight(pt)) == law.weight(pt))
        && f.total_mass() == law.total()
}

/// Density defining equation against the product of marginals, the
/// canonical zero, uniqueness, and absolute continuity in both directions.
pub(super) fn check_density_defining(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let count = 2 + (ctx.rng.gen_range(0..=1usize));
        let (objects, idx) = indexed_objects(scenario, count);
        let (bundled, _) = bundle(&objects, &idx).unwrap();
        let law = pushforward(p, &bundled).unwrap();

        let f = density_wrt_marginals(p, &objects, &idx).unwrap();
        ctx.assert_case(density_satisfies_defining(&f, &law), || {
            format!("{}: marginal-base density defining equation failed", scenario.name)
        });

        // canonical zero at base-null points
        let ok = (0..f.product().len())
            .all(|pt| !f.base_weight(pt).is_zero() || f.value(pt).is_zero());
        ctx.assert_case(ok, || {
            format!("{}: density is nonzero at a base-null point", scenario.name)
        });

        // uniqueness: any vector satisfying the defining equation agrees
        // with the canonical one on base-positive points
        let alternative: Vec<Rat> = (0..f.product().len())
            .map(|pt| {
                if f.base_weight(pt).is_zero() {
                    Rat::new(9.into(), 1.into())
                } else {
                    law.weight(pt) / f.base_weight(pt)
                }
            })
            .collect();
        let ok = (0..f.product().len())
            .all(|pt| f.base_weight(pt).is_zero() || alternative[pt] == *f.value(pt));
        ctx.assert_case(ok, || {
            format!("{}: a second defining-equation solution diverged", scenario.name)
        });

        // general bases: either the density exists and satisfies the
        // defining equation, or the failure witness genuinely has positive
        // law mass and zero base weight
        let bases = random_bases(ctx, &objects, &idx, true);
        match density_wrt_base(p, &objects, &idx, &bases) {
            Ok(g) => {
                ctx.assert_case(density_satisfies_defining(&g, &law), || {
                    format!("{}: general-base density defining equation failed", scenario.name)
                });
                // converse direction: existence means no positive-mass
                // point has zero base weight
                let ok = (0..g.product().len())
                    .all(|pt| !g.base_weight(pt).is_zero() || law.weight(pt).is_zero());
                ctx.assert_case(ok, || {
                    format!("{}: density exists despite an absolute-continuity gap", scenario.name)
                });
            }
            Err(Error::NotAbsolutelyContinuous { point, .. }) => {
                let g_product = f.product();
                let pt = g_product.point(&point);
                let base_mass: Rat = point
                    .iter()
                    .zip(bases.bases())
                    .map(|(&c, b)| b.weight(c).clone())
                    .product();
                ctx.assert_case(
                    base_mass.is_zero() && !law.weight(pt).is_zero(),
                    || format!("{}: continuity witness is not a witness", scenario.name),
                );
            }
            Err(other) => {
                ctx.fail(format!("{}: unexpected error {other:?}", scenario.name));
            }
        }
    }
}

/// Marginal densities agree with directly computed sub-family densities,
/// marginalization nests, and factorization certificates are sound in both
/// directions.
pub(super) fn check_marginals_and_factorization(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let (objects, idx) = indexed_objects(scenario, 3);
        let f = density_wrt_marginals(p, &objects, &idx).unwrap();

        // marginal onto {1,2} equals the directly computed density
        let keep = IndexSet::new([1, 2]).unwrap();
        let via_marginal = marginal_density(&f, &keep).unwrap();
        let sub_objects: BTreeMap<usize, RandomObject> = objects
            .iter()
            .filter(|(i, _)| keep.contains(**i))
            .map(|(i, o)| (*i, o.clone()))
            .collect();
        let direct = density_wrt_marginals(p, &sub_objects, &keep).unwrap();
        let ok = (0..direct.product().len()).all(|pt| {
            direct.base_weight(pt).is_zero() || via_marginal.value(pt) == direct.value(pt)
        });
        ctx.assert_case(ok, || {
            format!("{}: marginal density disagrees with the direct one", scenario.name)
        });

        // nesting commutes
        let keep1 = IndexSet::new([1]).unwrap();
        let nested = marginal_density(&via_marginal, &keep1).unwrap();
        let straight = marginal_density(&f, &keep1).unwrap();
        ctx.assert_case(nested.values() == straight.values(), || {
            format!("{}: nested marginalization disagrees", scenario.name)
        });

        // factorization: certified products must hold pointwise, failures
        // must carry a genuine witness
        let blocks = vec![IndexSet::new([1]).unwrap(), IndexSet::new([2, 3]).unwrap()];
        match factorize_if_independent(&f, &blocks) {
            Ok(parts) => {
                let ok = (0..f.product().len()).all(|pt| {
                    if f.base_weight(pt).is_zero() {
                        return true;
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
                    *f.value(pt) == prod
                });
                ctx.assert_case(ok, || {
                    format!("{}: certified factorization does not hold", scenario.name)
                });
            }
            Err(Error::NotFactorizable { point }) => {
                let pt = f.product().point(&point);
                let part1 = marginal_density(&f, &blocks[0]).unwrap();
                let part2 = marginal_density(&f, &blocks[1]).unwrap();
                let c1 = vec![point[0]];
                let c2 = vec![point[1], point[2]];
                let prod = part1.value(part1.product().point(&c1))
                    * part2.value(part2.product().point(&c2));
                ctx.assert_case(
                    !f.base_weight(pt).is_zero() && *f.value(pt) != prod,
                    || format!("{}: factorization witness is not a witness", scenario.name),
                );
            }
            Err(other) => ctx.fail(format!("{}: unexpected error {other:?}", scenario.name)),
        }
    }

    // product scenarios always factorize across the coordinate split
    for k in 0..4usize {
        let ps = super::gen::random_product_scenario(&mut ctx.rng, &format!("factor-{k}"));
        let scenario = &ps.scenario;
        let mut objects = BTreeMap::new();
        objects.insert(1usize, scenario.objects[ps.left[0]].clone());
        objects.insert(2usize, scenario.objects[ps.right[0]].clone());
        let idx = IndexSet::new([1, 2]).unwrap();
        let f = density_wrt_marginals(&scenario.base, &objects, &idx).unwrap();
        let blocks = vec![IndexSet::new([1]).unwrap(), IndexSet::new([2]).unwrap()];
        ctx.assert_case(factorize_if_independent(&f, &blocks).is_ok(), || {
            format!("{}: independent coordinates failed to factorize", scenario.name)
        });
    }
}

/// The kernel computed from the density alone coincides with the kernel
/// computed from the base measure, row by row on the support: the
/// cross-validation of the two conditioning routes.
pub(super) fn check_kernel_from_density(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let count = 3.min(scenario.objects.len().max(2)).max(2);
        let (objects, idx) = indexed_objects(scenario, count);
        let f = density_wrt_marginals(p, &objects, &idx).unwrap();

        // split indices into source/target (plus a marginalized leftover
        // when three objects are present)
        let source = IndexSet::new([1]).unwrap();
        let target = IndexSet::new([2]).unwrap();
        let from_density = kernel_from_density(&f, &source, &target).unwrap();
        let direct = cond_kernel(p, &objects[&1], &objects[&2], &[], &[]).unwrap();
        ctx.assert_case(direct.ae_eq(&from_density), || {
            format!("{}: density kernel disagrees with measure kernel", scenario.name)
        });
        ctx.assert_case(from_density.support() == direct.support(), || {
            format!("{}: density kernel support differs", scenario.name)
        });

        if count == 3 {
            // joint source (1,2) -> target 3
            let source = IndexSet::new([1, 2]).unwrap();
            let target = IndexSet::new([3]).unwrap();
            let from_density = kernel_from_density(&f, &source, &target).unwrap();
            let sub: BTreeMap<usize, RandomObject> = objects
                .iter()
                .filter(|(i, _)| source.contains(**i))
                .map(|(i, o)| (*i, o.clone()))
                .collect();
            let (bundled, _) = bundle(&sub, &source).unwrap();
            let direct = cond_kernel(p, &bundled, &objects[&3], &[], &[]).unwrap();
            ctx.assert_case(direct.ae_eq(&from_density), || {
                format!("{}: joint-source density kernel disagrees", scenario.name)
            });
        }
    }
}

/// Change of base multiplies in the marginal densities and satisfies the
/// defining equation against the new product base.
pub(super) fn check_change_of_base(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let (objects, idx) = indexed_objects(scenario, 2);
        let f = density_wrt_marginals(p, &objects, &idx).unwrap();
        let (bundled, _) = bundle(&objects, &idx).unwrap();
        let law = pushforward(p, &bundled).unwrap();

        // strictly positive per-index bases keep the marginal densities
        // existent; build their single-index densities
        let bases = random_bases(ctx, &objects, &idx, false);
        let marginal_densities: Vec<Density> = idx
            .iter()
            .map(|i| {
                let mut single = BTreeMap::new();
                single.insert(i, objects[&i].clone());
                let si = IndexSet::new([i]).unwrap();
                let family =
                    BaseFamily::new(si.clone(), vec![bases.base_at(i).unwrap().clone()]).unwrap();
                density_wrt_base(p, &single, &si, &family).unwrap()
            })
            .collect();
        let rebased = change_of_base(&f, &marginal_densities).unwrap();
        ctx.assert_case(density_satisfies_defining(&rebased, &law), || {
            format!("{}: rebased density fails its defining equation", scenario.name)
        });

        // the product of the marginal densities is the density of the
        // product of marginals with respect to the new base
        let ok = (0..f.product().len()).all(|pt| {
            let coords = f.product().coords(pt);
            let base: Rat = coords
                .iter()
                .zip(bases.bases())
                .map(|(&c, b)| b.weight(c).clone())
                .product();
            if base.is_zero() {
                return true;
            }
            let marg_product: Rat = coords
                .iter()
                .enumerate()
                .map(|(k, &c)| marginal_densities[k].value(c).clone())
                .product();
            let marginal_mass: Rat = coords
                .iter()
                .enumerate()
                .map(|(k, &c)| f.factor_bases()[k].weight(c).clone())
                .product();
            marg_product * base.clone() == marginal_mass
        });
        ctx.assert_case(ok, || {
            format!("{}: marginal densities do not multiply to the product law", scenario.name)
        });
    }
}
