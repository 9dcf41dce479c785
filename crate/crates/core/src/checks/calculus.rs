//! Checks for the kernel transformation calculus: target restriction,
//! condition shifts, joint rebuilds, composition, independence propagation
//! and the six conditional-independence equivalences.

use num::Zero;

use crate::conditioning::{
    bayes_shift, check_cond_independence, cond_kernel, cond_prob_pointwise, joint_from_kernel,
    kernel_fix_target, pair_bundle, IndependencePattern, Kernel,
};
use crate::cooccurrence::{cond_cooc_measure, cooc_measure, Constraint};
use crate::object::RandomObject;
use crate::rational::Rat;
use crate::space::Event;

use super::gen::{random_constraint, random_nonempty_constraint, random_scenario_sized};
use super::CheckCtx;

/// Restricting a joint-target kernel coordinate agrees with computing the
/// restricted kernel directly, and restricting to the full factor space is
/// plain marginalization.
pub(super) fn check_fix_target(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let given = scenario.role(0);
        let s1 = scenario.role(1);
        let s2 = scenario.role(2);
        let conditions = vec![random_nonempty_constraint(&mut ctx.rng, scenario.role(3))];
        let (joint_subject, product) = pair_bundle(s1, s2).unwrap();
        let joint = cond_kernel(p, given, &joint_subject, &conditions, &[]).unwrap();

        // fix the second coordinate to a random event
        let a = super::gen::random_event(&mut ctx.rng, s2.codomain());
        let (_, restricted) = kernel_fix_target(&joint, &product, 1, &a).unwrap();
        let direct = cond_kernel(
            p,
            given,
            s1,
            &conditions,
            &[Constraint::new(s2.clone(), a.clone()).unwrap()],
        )
        .unwrap();
        ctx.assert_case(direct.ae_eq(&restricted), || {
            format!("{}: fixed-coordinate kernel disagrees with direct", scenario.name)
        });

        // the full factor gives the marginal kernel
        let full = Event::full(s2.codomain().clone());
        let (_, marginal) = kernel_fix_target(&joint, &product, 1, &full).unwrap();
        let plain = cond_kernel(p, given, s1, &conditions, &[]).unwrap();
        ctx.assert_case(plain.ae_eq(&marginal), || {
            format!("{}: full-coordinate restriction is not the marginal", scenario.name)
        });

        // restriction and shift applied to the same joint kernel satisfy
        // both identities at once: shifting the restricted kernel lands on
        // the directly conditioned one
        let divisor = cond_prob_pointwise(
            p,
            given,
            &[Constraint::new(s2.clone(), a.clone()).unwrap()],
            &conditions,
        )
        .unwrap();
        let shifted = bayes_shift(&restricted, &divisor).unwrap();
        let mut widened = conditions.clone();
        widened.push(Constraint::new(s2.clone(), a.clone()).unwrap());
        let direct_shift = cond_kernel(p, given, s1, &widened, &[]).unwrap();
        ctx.assert_case(direct_shift.ae_eq(&shifted), || {
            format!("{}: restrict-then-shift disagrees with direct conditioning", scenario.name)
        });

        // the empty factor zeroes every row
        let none = Event::empty(s2.codomain().clone());
        let (_, zeroed) = kernel_fix_target(&joint, &product, 1, &none).unwrap();
        ctx.assert_case(zeroed.rows().iter().all(|r| r.is_zero()), || {
            format!("{}: empty-coordinate restriction left mass behind", scenario.name)
        });
    }
}

/// Moving a fixed target constraint into the conditioning side and back:
/// the shifted kernel equals the directly conditioned kernel, and the
/// forward product identity reconstructs the input wherever the divisor is
/// positive (and both vanish elsewhere).
pub(super) fn check_bayes_shift(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let given = scenario.role(0);
        let subject = scenario.role(1);
        let a3 = random_constraint(&mut ctx.rng, scenario.role(2));
        let a4 = random_constraint(&mut ctx.rng, scenario.role(3));
        let c5 = random_nonempty_constraint(&mut ctx.rng, scenario.role(1));

        let joint = cond_kernel(p, given, subject, std::slice::from_ref(&c5), &[a3.clone(), a4.clone()])
            .unwrap();
        let divisor = cond_prob_pointwise(p, given, std::slice::from_ref(&a3), std::slice::from_ref(&c5)).unwrap();
        let shifted = bayes_shift(&joint, &divisor).unwrap();
        let direct =
            cond_kernel(p, given, subject, &[a3.clone(), c5.clone()], std::slice::from_ref(&a4)).unwrap();
        ctx.assert_case(direct.ae_eq(&shifted), || {
            format!("{}: shifted kernel disagrees with direct conditioning", scenario.name)
        });

        // forward identity on the whole original support
        let ok = joint.support().iter().all(|&x| {
            joint.row(x).weights() == shifted.row(x).scaled(divisor.value(x)).weights()
        });
        ctx.assert_case(ok, || {
            format!("{}: multiply-back failed to reconstruct the joint", scenario.name)
        });
    }
}

/// The two-step quotient: fixing two coordinates of a three-fold joint
/// kernel and dividing by the matching pointwise conditional equals the
/// directly computed kernel on the divisor's positivity set.
pub(super) fn check_two_step_shift(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let given = scenario.role(0);
        let s2 = scenario.role(1);
        let s3 = scenario.role(2);
        let s4 = scenario.role(3);
        let a3 = super::gen::random_event(&mut ctx.rng, s3.codomain());
        let a4 = super::gen::random_event(&mut ctx.rng, s4.codomain());
        let c6 = random_nonempty_constraint(&mut ctx.rng, scenario.role(1));

        // three-fold joint target (s2, s3, s4)
        let mut objs = std::collections::BTreeMap::new();
        objs.insert(0usize, s2.clone());
        objs.insert(1usize, s3.clone());
        objs.insert(2usize, s4.clone());
        let idx = crate::space::IndexSet::new([0, 1, 2]).unwrap();
        let (joint_subject, product) = crate::object::bundle(&objs, &idx).unwrap();
        let joint3 = cond_kernel(p, given, &joint_subject, std::slice::from_ref(&c6), &[]).unwrap();

        // fix coordinates 1 (event a3) and 2 (event a4), then divide by
        // the pointwise conditional of a4
        let (reduced, fixed3) = kernel_fix_target(&joint3, &product, 1, &a3).unwrap();
        let (_, fixed34) = kernel_fix_target(&fixed3, &reduced, 2, &a4).unwrap();
        let div = cond_prob_pointwise(
            p,
            given,
            &[Constraint::new(s4.clone(), a4.clone()).unwrap()],
            std::slice::from_ref(&c6),
        )
        .unwrap();
        let shifted = bayes_shift(&fixed34, &div).unwrap();
        let direct = cond_kernel(
            p,
            given,
            s2,
            &[Constraint::new(s4.clone(), a4.clone()).unwrap(), c6.clone()],
            &[Constraint::new(s3.clone(), a3.clone()).unwrap()],
        )
        .unwrap();
        ctx.assert_case(direct.ae_eq(&shifted), || {
            format!("{}: two-step shift disagrees with direct kernel", scenario.name)
        });
    }
}

/// Kernel × marginal rebuilds the joint co-occurrence measure exactly, and
/// marginalizing the rebuilt joint recovers both factors' measures.
pub(super) fn check_joint_rebuild(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let given = scenario.role(0);
        let subject = scenario.role(1);
        let target_cs = vec![random_constraint(&mut ctx.rng, scenario.role(2))];
        let cond_cs = vec![random_nonempty_constraint(&mut ctx.rng, scenario.role(3))];

        let k = cond_kernel(p, given, subject, &cond_cs, &target_cs).unwrap();
        let marginal = cooc_measure(p, given, &cond_cs).unwrap();
        let (product, rebuilt) = joint_from_kernel(&k, &marginal).unwrap();

        let (pair, pair_product) = pair_bundle(given, subject).unwrap();
        let mut all = target_cs.clone();
        all.extend(cond_cs.iter().cloned());
        let direct = cooc_measure(p, &pair, &all).unwrap();
        debug_assert_eq!(pair_product.len(), product.len());
        ctx.assert_case(rebuilt.weights() == direct.weights(), || {
            format!("{}: rebuilt joint disagrees with direct joint", scenario.name)
        });

        // marginalizing over the target recovers the source measure with
        // all constraints applied
        let mut source_weights = vec![Rat::zero(); given.codomain().size()];
        for pt in 0..product.len() {
            let c = product.coords(pt);
            source_weights[c[0]] += rebuilt.weight(pt);
        }
        let source_direct = cooc_measure(p, given, &all).unwrap();
        ctx.assert_case(source_weights == source_direct.weights(), || {
            format!("{}: joint does not marginalize back to the source", scenario.name)
        });

        // and over the source, the subject measure
        let mut target_weights = vec![Rat::zero(); subject.codomain().size()];
        for pt in 0..product.len() {
            let c = product.coords(pt);
            target_weights[c[1]] += rebuilt.weight(pt);
        }
        let target_direct = cooc_measure(p, subject, &all).unwrap();
        ctx.assert_case(target_weights == target_direct.weights(), || {
            format!("{}: joint does not marginalize to the subject", scenario.name)
        });
    }
}

/// Two-stage kernels compose into the joint-target kernel: integrating the
/// second-stage rows against the first stage reproduces the direct kernel.
pub(super) fn check_composition(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let x1 = scenario.role(0);
        let x2 = scenario.role(1);
        let x3 = scenario.role(2);
        let a4 = random_constraint(&mut ctx.rng, scenario.role(3));
        let a5 = random_nonempty_constraint(&mut ctx.rng, scenario.role(2));
        let a6 = random_constraint(&mut ctx.rng, scenario.role(1));

        let stage1 = cond_kernel(p, x1, x2, std::slice::from_ref(&a5), std::slice::from_ref(&a6)).unwrap();
        let (pair12, product12) = pair_bundle(x1, x2).unwrap();
        let stage2 = cond_kernel(p, &pair12, x3, &[a5.clone(), a6.clone()], std::slice::from_ref(&a4))
            .unwrap();

        let (pair23, product23) = pair_bundle(x2, x3).unwrap();
        let direct =
            cond_kernel(p, x1, &pair23, std::slice::from_ref(&a5), &[a4.clone(), a6.clone()]).unwrap();

        let ok = direct.support().iter().all(|&x1v| {
            (0..product23.len()).all(|pt| {
                let c = product23.coords(pt);
                let (z2, z3) = (c[0], c[1]);
                let composed = stage2
                    .row(product12.point(&[x1v, z2]))
                    .weight(z3)
                    * stage1.row(x1v).weight(z2);
                *direct.row(x1v).weight(pt) == composed
            })
        });
        ctx.assert_case(ok, || {
            format!("{}: composed kernels disagree with the joint kernel", scenario.name)
        });

        // pointwise form: integrating the inner conditional over a window
        // of the middle coordinate recovers the two-event conditional
        let a2 = super::gen::random_event(&mut ctx.rng, x2.codomain());
        let a3 = super::gen::random_event(&mut ctx.rng, x3.codomain());
        let lhs = cond_prob_pointwise(
            p,
            x1,
            &[
                Constraint::new(x2.clone(), a2.clone()).unwrap(),
                Constraint::new(x3.clone(), a3.clone()).unwrap(),
            ],
            std::slice::from_ref(&a5),
        )
        .unwrap();
        let middle = cond_kernel(p, x1, x2, std::slice::from_ref(&a5), &[]).unwrap();
        let inner = cond_prob_pointwise(
            p,
            &pair12,
            &[Constraint::new(x3.clone(), a3.clone()).unwrap()],
            std::slice::from_ref(&a5),
        )
        .unwrap();
        let ok = lhs.reference().support().into_iter().all(|x1v| {
            let integrated: Rat = a2
                .members()
                .map(|z2| {
                    inner.value(product12.point(&[x1v, z2])) * middle.row(x1v).weight(z2)
                })
                .sum();
            *lhs.value(x1v) == integrated
        });
        ctx.assert_case(ok, || {
            format!("{}: pointwise composition identity failed", scenario.name)
        });
    }
}

/// On product models, independence propagates through conditioning: the
/// joint measure factorizes and conditional objects collapse to
/// unconditional ones.
pub(super) fn check_independence_propagation(ctx: &mut CheckCtx) {
    for k in 0..ctx.scenarios.len().max(4) {
        let ps = super::gen::random_product_scenario(&mut ctx.rng, &format!("product-{k}"));
        let scenario = &ps.scenario;
        let p = &scenario.base;
        let x1 = &scenario.objects[ps.left[0]];
        let x2 = &scenario.objects[ps.left[1 % ps.left.len()]];
        let x3 = &scenario.objects[ps.right[0]];
        let a2 = super::gen::random_event(&mut ctx.rng, x2.codomain());
        let a3 = super::gen::random_event(&mut ctx.rng, x3.codomain());
        let c2 = Constraint::new(x2.clone(), a2).unwrap();
        let c3 = Constraint::new(x3.clone(), a3).unwrap();

        // P[X1; X2∈A2, X3∈A3] = P[X3∈A3] · P[X1, X2∈A2]
        let lhs = cooc_measure(p, x1, &[c2.clone(), c3.clone()]).unwrap();
        let scalar = p.of(&c3.pullback().unwrap()).unwrap();
        let rhs = cooc_measure(p, x1, std::slice::from_ref(&c2)).unwrap().scaled(&scalar);
        ctx.assert_case(lhs.weights() == rhs.weights(), || {
            format!("{}: joint measure does not factor", scenario.name)
        });

        // P[X1, X2∈A2 | X3∈A3] = P[X1, X2∈A2] when the condition is positive
        if !scalar.is_zero() {
            let cond = cond_cooc_measure(p, x1, std::slice::from_ref(&c2), std::slice::from_ref(&c3)).unwrap();
            let plain = cooc_measure(p, x1, std::slice::from_ref(&c2)).unwrap();
            ctx.assert_case(cond.value.weights() == plain.weights(), || {
                format!("{}: conditioning on the independent side moved mass", scenario.name)
            });
        }

        // P[X3∈A3 | X1, X2∈A2] is the constant P(X3∈A3) on its support
        let pc = cond_prob_pointwise(p, x1, std::slice::from_ref(&c3), std::slice::from_ref(&c2)).unwrap();
        let ok = pc
            .reference()
            .support()
            .into_iter()
            .all(|x| *pc.value(x) == scalar);
        ctx.assert_case(ok, || {
            format!("{}: pointwise conditional is not the constant law", scenario.name)
        });

        // pair version: P[X1,X2; A1',A2'] = P[X1,A1'] x P[X2',A2'] with
        // (X1,X3) vs (X2,X4) replaced by our left/right split
        let x4 = &scenario.objects[ps.right[1 % ps.right.len()]];
        let a1p = random_constraint(&mut ctx.rng, x2);
        let a4p = random_constraint(&mut ctx.rng, x4);
        let (pairing, product) = pair_bundle(x1, x3).unwrap();
        let joint = cooc_measure(p, &pairing, &[a1p.clone(), a4p.clone()]).unwrap();
        let left = cooc_measure(p, x1, std::slice::from_ref(&a1p)).unwrap();
        let right = cooc_measure(p, x3, std::slice::from_ref(&a4p)).unwrap();
        let ok = (0..product.len()).all(|pt| {
            let c = product.coords(pt);
            *joint.weight(pt) == left.weight(c[0]) * right.weight(c[1])
        });
        ctx.assert_case(ok, || {
            format!("{}: paired joint is not the product measure", scenario.name)
        });

        // kernel version: rows of P[X3, A4'|X1, A1'] equal P[X3, A4'] on support
        let k = cond_kernel(p, x1, x3, std::slice::from_ref(&a1p), std::slice::from_ref(&a4p)).unwrap();
        let fixed = cooc_measure(p, x3, std::slice::from_ref(&a4p)).unwrap();
        let ok = k
            .support()
            .iter()
            .all(|&x| k.row(x).weights() == fixed.weights());
        ctx.assert_case(ok, || {
            format!("{}: kernel rows differ from the unconditional law", scenario.name)
        });
    }
}

fn kernel_rows_equal_on(
    lhs: &Kernel,
    rhs: &Kernel,
    outcomes: impl Iterator<Item = usize>,
) -> bool {
    for x in outcomes {
        if lhs.row(x).weights() != rhs.row(x).weights() {
            return false;
        }
    }
    true
}

/// The six equivalences between dropped-conditioning equalities and product
/// identities, enumerated exhaustively over all events on small codomains.
pub(super) fn check_ci_equivalences(ctx: &mut CheckCtx) {
    use crate::cooccurrence::cond_prob_objects;
    // dedicated small scenarios so event enumeration stays cheap
    let count = 6.min(ctx.scenarios.len().max(3));
    for n in 0..count {
        let scenario = random_scenario_sized(&mut ctx.rng, &format!("ci-{n}"), 3..=4, 2..=3);
        let p = &scenario.base;
        let all_events = |obj: &RandomObject| Event::enumerate_all(obj.codomain());

        // pattern 1: events A2, A3 given event A1
        {
            let (x1, x2, x3) = (scenario.role(0), scenario.role(1), scenario.role(2));
            for a1 in all_events(x1) {
                let g = Constraint::new(x1.clone(), a1).unwrap();
                for a2 in all_events(x2) {
                    let l = Constraint::new(x2.clone(), a2).unwrap();
                    for a3 in all_events(x3) {
                        let r = Constraint::new(x3.clone(), a3).unwrap();
                        // precondition of the equivalence
                        let joint13 = crate::cooccurrence::prob_cooc_objects(
                            p,
                            &[g.clone(), r.clone()],
                        )
                        .unwrap();
                        if joint13.is_zero() {
                            continue;
                        }
                        let dropped = cond_prob_objects(p, std::slice::from_ref(&l), &[g.clone(), r.clone()])
                            .unwrap()
                            .value
                            == cond_prob_objects(p, std::slice::from_ref(&l), std::slice::from_ref(&g)).unwrap().value;
                        let product = check_cond_independence(
                            p,
                            &IndependencePattern::EventEvent {
                                left: l.clone(),
                                right: r.clone(),
                                given: g.clone(),
                            },
                        )
                        .unwrap();
                        ctx.assert_case(dropped == product.holds, || {
                            format!("{}: equivalence 1 broke", scenario.name)
                        });
                    }
                }
            }
        }

        // pattern 2: subject measure with residual A4 vs event A3, given A1
        {
            let (x1, x2, x3, x4) = (
                scenario.role(0),
                scenario.role(1),
                scenario.role(2),
                scenario.role(3),
            );
            for a1 in all_events(x1) {
                let g = Constraint::new(x1.clone(), a1).unwrap();
                for a3 in all_events(x3) {
                    let e3 = Constraint::new(x3.clone(), a3).unwrap();
                    for a4 in all_events(x4) {
                        let e4 = Constraint::new(x4.clone(), a4).unwrap();
                        let pre = crate::cooccurrence::prob_cooc_objects(
                            p,
                            &[g.clone(), e3.clone(), e4.clone()],
                        )
                        .unwrap();
                        if pre.is_zero() {
                            continue;
                        }
                        let lhs_a = cond_cooc_measure(
                            p,
                            x2,
                            std::slice::from_ref(&e4),
                            &[g.clone(), e3.clone()],
                        )
                        .unwrap()
                        .value;
                        let lhs_b =
                            cond_cooc_measure(p, x2, std::slice::from_ref(&e4), std::slice::from_ref(&g)).unwrap().value;
                        let dropped = lhs_a.weights() == lhs_b.weights();
                        let product = check_cond_independence(
                            p,
                            &IndependencePattern::MeasureEvent {
                                subject: x2.clone(),
                                with: e4.clone(),
                                event: e3.clone(),
                                given: g.clone(),
                            },
                        )
                        .unwrap();
                        ctx.assert_case(dropped == product.holds, || {
                            format!("{}: equivalence 2 broke", scenario.name)
                        });
                        // the alternate dropped form is equivalent as well:
                        // the event's conditional given the subject object
                        // collapses to its unconditional-of-the-subject value
                        let alt_lhs = cond_prob_pointwise(
                            p,
                            x2,
                            std::slice::from_ref(&e3),
                            &[g.clone(), e4.clone()],
                        )
                        .unwrap();
                        let alt_rhs = crate::cooccurrence::cond_prob_objects(
                            p,
                            std::slice::from_ref(&e3),
                            std::slice::from_ref(&g),
                        )
                        .unwrap()
                        .value;
                        let alt_dropped = alt_lhs
                            .reference()
                            .support()
                            .into_iter()
                            .all(|x| *alt_lhs.value(x) == alt_rhs);
                        ctx.assert_case(alt_dropped == product.holds, || {
                            format!("{}: alternate form of equivalence 2 broke", scenario.name)
                        });
                    }
                }
            }
        }

        // pattern 3: two subject measures given event A1; the dropped form
        // conditions the pair on the extra object X3
        {
            let (x1, x2, x3) = (scenario.role(0), scenario.role(1), scenario.role(2));
            for a1 in all_events(x1) {
                let g = Constraint::new(x1.clone(), a1).unwrap();
                for a4 in all_events(x2) {
                    let e4 = Constraint::new(x2.clone(), a4).unwrap();
                    for a5 in all_events(x3) {
                        let e5 = Constraint::new(x3.clone(), a5).unwrap();
                        let pre = crate::cooccurrence::prob_cooc_objects(
                            p,
                            &[g.clone(), e5.clone()],
                        )
                        .unwrap();
                        if pre.is_zero() {
                            continue;
                        }
                        // dropped: kernel of X2 with e4 given X3 and (A1, A5)
                        // equals the fixed measure P[X2, e4 | A1] on support
                        let k = cond_kernel(
                            p,
                            x3,
                            x2,
                            &[g.clone(), e5.clone()],
                            std::slice::from_ref(&e4),
                        )
                        .unwrap();
                        let fixed =
                            cond_cooc_measure(p, x2, std::slice::from_ref(&e4), std::slice::from_ref(&g)).unwrap().value;
                        let dropped = k
                            .support()
                            .iter()
                            .all(|&x| k.row(x).weights() == fixed.weights());
                        let product = check_cond_independence(
                            p,
                            &IndependencePattern::MeasureMeasure {
                                left: (x2.clone(), e4.clone()),
                                right: (x3.clone(), e5.clone()),
                                given: g.clone(),
                            },
                        )
                        .unwrap();
                        ctx.assert_case(dropped == product.holds, || {
                            format!("{}: equivalence 3 broke", scenario.name)
                        });
                    }
                }
            }
        }

        // pattern 4: events A2, A4 given object X1 and event A3
        {
            let (x1, x2, x3, x4) = (
                scenario.role(0),
                scenario.role(1),
                scenario.role(2),
                scenario.role(3),
            );
            for a3 in all_events(x3) {
                let ge = Constraint::new(x3.clone(), a3).unwrap();
                for a2 in all_events(x2) {
                    let l = Constraint::new(x2.clone(), a2).unwrap();
                    for a4 in all_events(x4) {
                        let r = Constraint::new(x4.clone(), a4).unwrap();
                        let pre = crate::cooccurrence::prob_cooc_objects(
                            p,
                            &[ge.clone(), r.clone()],
                        )
                        .unwrap();
                        if pre.is_zero() {
                            continue;
                        }
                        let lhs_a = cond_prob_pointwise(
                            p,
                            x1,
                            std::slice::from_ref(&l),
                            &[ge.clone(), r.clone()],
                        )
                        .unwrap();
                        let lhs_b =
                            cond_prob_pointwise(p, x1, std::slice::from_ref(&l), std::slice::from_ref(&ge)).unwrap();
                        let dropped = lhs_a
                            .reference()
                            .support()
                            .into_iter()
                            .all(|x| lhs_a.value(x) == lhs_b.value(x));
                        let product = check_cond_independence(
                            p,
                            &IndependencePattern::EventEventGivenObject {
                                left: l.clone(),
                                right: r.clone(),
                                given: x1.clone(),
                                given_event: ge.clone(),
                            },
                        )
                        .unwrap();
                        ctx.assert_case(dropped == product.holds, || {
                            format!("{}: equivalence 4 broke", scenario.name)
                        });
                    }
                }
            }
        }

        // pattern 5: kernel subject X2 with residual A4 vs event A5, given
        // object X1 and event A3
        {
            let (x1, x2, x3, x5) = (
                scenario.role(0),
                scenario.role(1),
                scenario.role(2),
                scenario.role(3),
            );
            let (pair12, product12) = pair_bundle(x1, x2).unwrap();
            for a3 in all_events(x3) {
                let ge = Constraint::new(x3.clone(), a3).unwrap();
                for a4 in all_events(x2) {
                    let with = Constraint::new(x2.clone(), a4).unwrap();
                    for a5 in all_events(x5) {
                        let e5 = Constraint::new(x5.clone(), a5).unwrap();
                        let pre = crate::cooccurrence::prob_cooc_objects(
                            p,
                            &[ge.clone(), with.clone(), e5.clone()],
                        )
                        .unwrap();
                        if pre.is_zero() {
                            continue;
                        }
                        let lhs_a = cond_kernel(
                            p,
                            x1,
                            x2,
                            &[ge.clone(), e5.clone()],
                            std::slice::from_ref(&with),
                        )
                        .unwrap();
                        let lhs_b =
                            cond_kernel(p, x1, x2, std::slice::from_ref(&ge), std::slice::from_ref(&with)).unwrap();
                        let dropped =
                            kernel_rows_equal_on(&lhs_a, &lhs_b, lhs_a.support().iter().copied());
                        let product = check_cond_independence(
                            p,
                            &IndependencePattern::MeasureEventGivenObject {
                                subject: x2.clone(),
                                with: with.clone(),
                                event: e5.clone(),
                                given: x1.clone(),
                                given_event: ge.clone(),
                            },
                        )
                        .unwrap();
                        ctx.assert_case(dropped == product.holds, || {
                            format!("{}: equivalence 5 broke", scenario.name)
                        });
                        // alternate dropped form: widening the conditioning
                        // to the pair (X1, X2) leaves the event's
                        // conditional untouched, compared through the pair
                        let alt_lhs = cond_prob_pointwise(
                            p,
                            &pair12,
                            std::slice::from_ref(&e5),
                            &[ge.clone(), with.clone()],
                        )
                        .unwrap();
                        let alt_rhs = cond_prob_pointwise(
                            p,
                            x1,
                            std::slice::from_ref(&e5),
                            std::slice::from_ref(&ge),
                        )
                        .unwrap();
                        let alt_dropped =
                            alt_lhs.reference().support().into_iter().all(|pt| {
                                let c = product12.coords(pt);
                                alt_lhs.value(pt) == alt_rhs.value(c[0])
                            });
                        ctx.assert_case(alt_dropped == product.holds, || {
                            format!("{}: alternate form of equivalence 5 broke", scenario.name)
                        });
                    }
                }
            }
        }

        // pattern 6: kernel subjects X2 (with A5) and X3 (with A6), given
        // object X1 and event A4
        {
            let (x1, x2, x3, x4) = (
                scenario.role(0),
                scenario.role(1),
                scenario.role(2),
                scenario.role(3),
            );
            let (pair13, product13) = pair_bundle(x1, x3).unwrap();
            for a4 in all_events(x4) {
                let ge = Constraint::new(x4.clone(), a4).unwrap();
                for a5 in all_events(x2) {
                    let e5 = Constraint::new(x2.clone(), a5).unwrap();
                    for a6 in all_events(x3) {
                        let e6 = Constraint::new(x3.clone(), a6).unwrap();
                        let pre = crate::cooccurrence::prob_cooc_objects(
                            p,
                            &[ge.clone(), e6.clone()],
                        )
                        .unwrap();
                        if pre.is_zero() {
                            continue;
                        }
                        // dropped: conditioning additionally on X3 and A6
                        // changes nothing, compared through the pair source
                        let lhs_a = cond_kernel(
                            p,
                            &pair13,
                            x2,
                            &[ge.clone(), e6.clone()],
                            std::slice::from_ref(&e5),
                        )
                        .unwrap();
                        let lhs_b =
                            cond_kernel(p, x1, x2, std::slice::from_ref(&ge), std::slice::from_ref(&e5)).unwrap();
                        let dropped = lhs_a.support().iter().all(|&pt| {
                            let c = product13.coords(pt);
                            lhs_a.row(pt).weights() == lhs_b.row(c[0]).weights()
                        });
                        let product = check_cond_independence(
                            p,
                            &IndependencePattern::MeasureMeasureGivenObject {
                                left: (x2.clone(), e5.clone()),
                                right: (x3.clone(), e6.clone()),
                                given: x1.clone(),
                                given_event: ge.clone(),
                            },
                        )
                        .unwrap();
                        ctx.assert_case(dropped == product.holds, || {
                            format!("{}: equivalence 6 broke", scenario.name)
                        });
                    }
                }
            }
        }
    }
}
