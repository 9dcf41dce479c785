//! Checks for the co-occurrence substrate: measure consistency and the
//! defining integral equations of pointwise conditionals and kernels.
//!
//! The verifiers below recompute every mass directly from the base weights
//! and the raw object maps, so they are independent of the query engine's
//! own pullback plumbing.

use num::Zero;

use rand::Rng;

use crate::conditioning::{cond_kernel, cond_prob_pointwise};
use crate::cooccurrence::{cooc_measure, cond_cooc_measure, Constraint};
use crate::measure::RationalMeasure;
use crate::object::{bundle, RandomObject};
use crate::rational::Rat;
use crate::space::{Event, IndexSet};

use super::gen::{full_constraint, random_constraint, random_nonempty_constraint};
use super::{CheckCtx, Scenario};

/// Directly computed mass of {ω : every constraint holds at ω and
/// given(ω) ∈ block}: the oracle side of the defining equations.
pub(super) fn direct_mass(
    base: &RationalMeasure,
    constraints: &[Constraint],
    window: Option<(&RandomObject, &[usize])>,
) -> Rat {
    let mut total = Rat::zero();
    'outcomes: for o in 0..base.space().size() {
        let w = base.weight(o);
        if w.is_zero() {
            continue;
        }
        for c in constraints {
            if !c.event().contains(c.object().apply(o)) {
                continue 'outcomes;
            }
        }
        if let Some((given, block)) = window {
            if !block.contains(&given.apply(o)) {
                continue;
            }
        }
        total += w;
    }
    total
}

/// Verifies the pointwise-conditional defining equation for a raw value
/// vector: for every field block B (and the full space),
/// Σ_{x∈B} values[x]·reference({x}) = P(targets, conditions, given ∈ B).
pub(super) fn pointwise_defining_holds(
    base: &RationalMeasure,
    given: &RandomObject,
    targets: &[Constraint],
    conditions: &[Constraint],
    values: &[Rat],
    reference: &RationalMeasure,
) -> bool {
    let mut all: Vec<Constraint> = targets.to_vec();
    all.extend_from_slice(conditions);
    let mut full_lhs = Rat::zero();
    for block in given.codomain_field().blocks() {
        let lhs: Rat = block
            .iter()
            .map(|&x| &values[x] * reference.weight(x))
            .sum();
        let rhs = direct_mass(base, &all, Some((given, block)));
        if lhs != rhs {
            return false;
        }
        full_lhs += lhs;
    }
    full_lhs == direct_mass(base, &all, None)
}

/// Verifies the kernel defining equation for raw rows: for every source
/// block B and every target outcome z (and the full target),
/// Σ_{x∈B} rows[x]({z})·reference({x}) =
/// P(subject = z, targets, conditions, given ∈ B).
pub(super) fn kernel_defining_holds(
    base: &RationalMeasure,
    given: &RandomObject,
    subject: &RandomObject,
    conditions: &[Constraint],
    target_conditions: &[Constraint],
    rows: &[RationalMeasure],
    reference: &RationalMeasure,
) -> bool {
    let mut all: Vec<Constraint> = target_conditions.to_vec();
    all.extend_from_slice(conditions);
    for block in given.codomain_field().blocks() {
        for z in 0..subject.codomain().size() {
            let lhs: Rat = block
                .iter()
                .map(|&x| rows[x].weight(z) * reference.weight(x))
                .sum();
            let singleton =
                Constraint::new(subject.clone(), Event::singleton(subject.codomain().clone(), z).unwrap())
                    .unwrap();
            let mut with_z = all.clone();
            with_z.push(singleton);
            if lhs != direct_mass(base, &with_z, Some((given, block))) {
                return false;
            }
        }
        // full target space by additivity
        let lhs: Rat = block
            .iter()
            .map(|&x| rows[x].total() * reference.weight(x))
            .sum();
        if lhs != direct_mass(base, &all, Some((given, block))) {
            return false;
        }
    }
    true
}

/// Co-occurrence measure consistency: constraint lists agree with the
/// bundled product event, full constraints are absorbed, and conditional
/// measures normalize exactly when the condition is positive.
pub(super) fn check_cooc_consistency(ctx: &mut CheckCtx) {
    let scenarios: Vec<Scenario> = ctx.scenarios.to_vec();
    for scenario in &scenarios {
        let p = &scenario.base;
        let subject = scenario.role(0);
        let c1 = random_constraint(&mut ctx.rng, scenario.role(1));
        let c2 = random_constraint(&mut ctx.rng, scenario.role(2));

        // constraint list vs the bundled rectangle event
        let via_list = cooc_measure(p, subject, &[c1.clone(), c2.clone()]).unwrap();
        let mut objs = std::collections::BTreeMap::new();
        objs.insert(0usize, c1.object().clone());
        objs.insert(1usize, c2.object().clone());
        let (bundled, product) = bundle(&objs, &IndexSet::new([0, 1]).unwrap()).unwrap();
        let mut rect = std::collections::BTreeMap::new();
        rect.insert(0usize, c1.event().clone());
        rect.insert(1usize, c2.event().clone());
        let rect_event = product.rectangle(&rect).unwrap();
        let via_bundle = cooc_measure(
            p,
            subject,
            &[Constraint::new(bundled, rect_event).unwrap()],
        )
        .unwrap();
        ctx.assert_case(via_list.weights() == via_bundle.weights(), || {
            format!("{}: constraint list disagrees with bundled rectangle", scenario.name)
        });

        // inserting full constraints anywhere changes nothing
        let full = full_constraint(scenario.role(3));
        let padded = cooc_measure(
            p,
            subject,
            &[full.clone(), c1.clone(), full.clone(), c2.clone()],
        )
        .unwrap();
        ctx.assert_case(padded.weights() == via_list.weights(), || {
            format!("{}: full constraints were not absorbed", scenario.name)
        });

        // order insensitivity
        let swapped = cooc_measure(p, subject, &[c2.clone(), c1.clone()]).unwrap();
        ctx.assert_case(swapped.weights() == via_list.weights(), || {
            format!("{}: constraint order changed the measure", scenario.name)
        });

        // conditional measure totals one exactly when the condition is
        // positive and the subject is unconstrained
        let cond = random_constraint(&mut ctx.rng, scenario.role(1));
        let mass = p.of(&cond.pullback().unwrap()).unwrap();
        let conditional = cond_cooc_measure(p, subject, &[], std::slice::from_ref(&cond)).unwrap();
        if mass.is_zero() {
            ctx.assert_case(
                conditional.null_condition && conditional.value.is_zero(),
                || format!("{}: null condition not flagged", scenario.name),
            );
        } else {
            ctx.assert_case(
                !conditional.null_condition
                    && conditional.value.total() == Rat::new(1.into(), 1.into()),
                || format!("{}: conditional law does not normalize", scenario.name),
            );
        }

        // monotonicity: shrinking one constraint event cannot raise masses
        let small_event = c1
            .event()
            .intersect(&super::gen::random_event(&mut ctx.rng, c1.object().codomain()))
            .unwrap();
        let small = Constraint::new(c1.object().clone(), small_event).unwrap();
        let smaller = cooc_measure(p, subject, &[small, c2.clone()]).unwrap();
        let ok = smaller
            .weights()
            .iter()
            .zip(via_list.weights())
            .all(|(s, l)| s <= l);
        ctx.assert_case(ok, || {
            format!("{}: shrinking a constraint increased mass", scenario.name)
        });
    }
}

/// The defining equation, canonical zero, normalization, monotonicity and
/// almost-everywhere uniqueness of pointwise conditionals.
pub(super) fn check_pointwise_defining(ctx: &mut CheckCtx) {
    let scenarios: Vec<Scenario> = ctx.scenarios.to_vec();
    for scenario in &scenarios {
        let p = &scenario.base;
        let given = scenario.role(0);
        let targets = vec![
            random_constraint(&mut ctx.rng, scenario.role(1)),
            random_constraint(&mut ctx.rng, scenario.role(2)),
        ];
        let conditions = if ctx.rng.gen_bool(0.5) {
            vec![random_nonempty_constraint(&mut ctx.rng, scenario.role(3))]
        } else {
            Vec::new()
        };
        let pc = cond_prob_pointwise(p, given, &targets, &conditions).unwrap();
        ctx.assert_case(
            pointwise_defining_holds(p, given, &targets, &conditions, pc.values(), pc.reference()),
            || format!("{}: pointwise defining equation failed", scenario.name),
        );

        // canonical zero off the support
        let ok = (0..given.codomain().size()).all(|x| {
            let block = given.codomain_field().block_of(x);
            let mass: Rat = block.iter().map(|&b| pc.reference().weight(b).clone()).sum();
            !mass.is_zero() || pc.value(x).is_zero()
        });
        ctx.assert_case(ok, || {
            format!("{}: nonzero value off the reference support", scenario.name)
        });

        // normalization with a full target
        let full = vec![full_constraint(scenario.role(1))];
        let norm = cond_prob_pointwise(p, given, &full, &conditions).unwrap();
        let ok = norm
            .reference()
            .support()
            .into_iter()
            .all(|x| *norm.value(x) == Rat::new(1.into(), 1.into()));
        ctx.assert_case(ok, || {
            format!("{}: full-target conditional is not one on support", scenario.name)
        });

        // monotonicity in a target event
        let base_c = random_constraint(&mut ctx.rng, scenario.role(1));
        let bigger_event = base_c
            .event()
            .union(&super::gen::random_event(&mut ctx.rng, base_c.object().codomain()))
            .unwrap();
        let bigger = Constraint::new(base_c.object().clone(), bigger_event).unwrap();
        let lo = cond_prob_pointwise(p, given, &[base_c], &conditions).unwrap();
        let hi = cond_prob_pointwise(p, given, &[bigger], &conditions).unwrap();
        let ok = lo
            .reference()
            .support()
            .into_iter()
            .all(|x| lo.value(x) <= hi.value(x));
        ctx.assert_case(ok, || {
            format!("{}: enlarging the target decreased the conditional", scenario.name)
        });

        // a.e. uniqueness: perturbing values on null blocks leaves the
        // defining equation intact; perturbing on the support breaks it
        let mut perturbed = pc.values().to_vec();
        let mut touched_null = false;
        for (x, slot) in perturbed.iter_mut().enumerate() {
            let block = given.codomain_field().block_of(x);
            let mass: Rat = block.iter().map(|&b| pc.reference().weight(b).clone()).sum();
            if mass.is_zero() {
                *slot = Rat::new(7.into(), 1.into());
                touched_null = true;
            }
        }
        if touched_null {
            ctx.assert_case(
                pointwise_defining_holds(
                    p,
                    given,
                    &targets,
                    &conditions,
                    &perturbed,
                    pc.reference(),
                ),
                || format!("{}: null perturbation broke the defining equation", scenario.name),
            );
        }
        if let Some(&x) = pc.reference().support().first() {
            let mut broken = pc.values().to_vec();
            broken[x] += Rat::new(1.into(), 1.into());
            ctx.assert_case(
                !pointwise_defining_holds(p, given, &targets, &conditions, &broken, pc.reference()),
                || format!("{}: support perturbation went unnoticed", scenario.name),
            );
        }
    }
}

/// The defining equation, markov property, monotonicity and uniqueness of
/// conditional kernels.
pub(super) fn check_kernel_defining(ctx: &mut CheckCtx) {
    let scenarios: Vec<Scenario> = ctx.scenarios.to_vec();
    for scenario in &scenarios {
        let p = &scenario.base;
        let given = scenario.role(0);
        let subject = scenario.role(1);
        let conditions = if ctx.rng.gen_bool(0.5) {
            vec![random_nonempty_constraint(&mut ctx.rng, scenario.role(2))]
        } else {
            Vec::new()
        };
        let target_conditions = if ctx.rng.gen_bool(0.5) {
            vec![random_constraint(&mut ctx.rng, scenario.role(3))]
        } else {
            Vec::new()
        };
        let k = cond_kernel(p, given, subject, &conditions, &target_conditions).unwrap();
        let reference = cooc_measure(p, given, &conditions).unwrap();
        ctx.assert_case(
            kernel_defining_holds(
                p,
                given,
                subject,
                &conditions,
                &target_conditions,
                k.rows(),
                &reference,
            ),
            || format!("{}: kernel defining equation failed", scenario.name),
        );

        // rows off the support are identically zero
        let ok = (0..given.codomain().size())
            .all(|x| k.in_support(x) || k.row(x).is_zero());
        ctx.assert_case(ok, || {
            format!("{}: nonzero row off the support", scenario.name)
        });

        // with no target constraints, supported rows are probabilities
        if target_conditions.is_empty() && !k.null_condition() {
            ctx.assert_case(k.is_markov_on_support(), || {
                format!("{}: unconstrained kernel rows do not normalize", scenario.name)
            });
        }

        // monotonicity: enlarging a target constraint event never
        // decreases any entry on the support
        if let Some(tc) = target_conditions.first() {
            let bigger_event = tc
                .event()
                .union(&super::gen::random_event(&mut ctx.rng, tc.object().codomain()))
                .unwrap();
            let bigger = Constraint::new(tc.object().clone(), bigger_event).unwrap();
            let k_hi = cond_kernel(p, given, subject, &conditions, &[bigger]).unwrap();
            let ok = k.support().iter().all(|&x| {
                k.row(x)
                    .weights()
                    .iter()
                    .zip(k_hi.row(x).weights())
                    .all(|(lo, hi)| lo <= hi)
            });
            ctx.assert_case(ok, || {
                format!("{}: enlarging a target constraint shrank the kernel", scenario.name)
            });
        }

        // uniqueness: rows perturbed on null blocks still satisfy the
        // defining equation; a support perturbation must break it
        let mut rows = k.rows().to_vec();
        let mut touched_null = false;
        for (x, row) in rows.iter_mut().enumerate() {
            if !k.in_support(x) {
                *row = RationalMeasure::counting(subject.codomain().clone())
                    .with_kind(crate::measure::MeasureKind::Finite)
                    .unwrap();
                touched_null = true;
            }
        }
        if touched_null {
            ctx.assert_case(
                kernel_defining_holds(
                    p,
                    given,
                    subject,
                    &conditions,
                    &target_conditions,
                    &rows,
                    &reference,
                ),
                || format!("{}: null row perturbation broke the equation", scenario.name),
            );
        }
        if let Some(&x) = k.support().first() {
            let mut broken = k.rows().to_vec();
            broken[x] = broken[x].scaled(&Rat::new(2.into(), 1.into()));
            let still_fine = broken[x].is_zero();
            if !still_fine {
                ctx.assert_case(
                    !kernel_defining_holds(
                        p,
                        given,
                        subject,
                        &conditions,
                        &target_conditions,
                        &broken,
                        &reference,
                    ),
                    || format!("{}: support row perturbation went unnoticed", scenario.name),
                );
            }
        }
    }
}
