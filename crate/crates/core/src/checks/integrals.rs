//! Checks for E-integrals: reduction identities, defining equations,
//! iterated decomposition, algebraic laws, the tower property, convergence
//! of stabilizing sequences, pull-out, and the three classical
//! inequalities.

use std::collections::BTreeMap;

use num::{Signed, Zero};
use rand::Rng;

use crate::conditioning::{cond_prob_pointwise, pair_bundle};
use crate::cooccurrence::{cooc_measure, Constraint};
use crate::eintegral::{
    cond_expectation_event, cond_expectation_object, e_integral, iterated_decompose, ChainStep,
    RandomVariable,
};
use crate::measure::RationalMeasure;
use crate::object::RandomObject;
use crate::rational::{to_f64, Rat};
use crate::space::Event;

use super::gen::{
    full_constraint, random_constraint, random_convex, random_nonempty_constraint,
    random_nonnegative_variable, random_partition_pair, random_variable,
};
use super::CheckCtx;

/// Σ_ω y(subject(ω))·p(ω) over outcomes satisfying all constraints and, if
/// given, landing in the window block: the direct side of the E-integral
/// identities.
fn weighted_direct_mass(
    base: &RationalMeasure,
    y: &RandomVariable,
    subject: &RandomObject,
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
        total += y.value(subject.apply(o)) * w;
    }
    total
}

/// Restricted integrals against the identity object reduce to expectations
/// of indicator-multiplied variables, and conditional expectations given
/// events recover them by multiplying back the condition mass.
pub(super) fn check_restricted_integrals(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let id = RandomObject::identity(p.space().clone());
        let y = random_variable(&mut ctx.rng, p.space());
        let a = super::gen::random_event(&mut ctx.rng, p.space());

        // restriction to A equals the indicator-weighted expectation
        let restricted = e_integral(
            &y,
            &cooc_measure(p, &id, &[Constraint::new(id.clone(), a.clone()).unwrap()]).unwrap(),
        )
        .unwrap();
        let indicator = RandomVariable::indicator(&a);
        let direct = e_integral(&y.mul(&indicator).unwrap(), p).unwrap();
        ctx.assert_case(restricted.value == direct.value, || {
            format!("{}: restricted integral differs from indicator form", scenario.name)
        });

        // composite form over an arbitrary subject
        let subject = scenario.role(0);
        let y2 = random_variable(&mut ctx.rng, subject.codomain());
        let c1 = random_constraint(&mut ctx.rng, scenario.role(1));
        let joint = e_integral(&y2, &cooc_measure(p, subject, std::slice::from_ref(&c1)).unwrap()).unwrap();
        let composite = weighted_direct_mass(p, &y2, subject, std::slice::from_ref(&c1), None);
        ctx.assert_case(joint.value == composite, || {
            format!("{}: joint integral differs from the composite form", scenario.name)
        });

        // conditional expectation given the event, multiplied back
        let conditional = cond_expectation_event(p, &y2, subject, &[], std::slice::from_ref(&c1)).unwrap();
        let mass = p.of(&c1.pullback().unwrap()).unwrap();
        ctx.assert_case(conditional.value * mass == joint.value, || {
            format!("{}: multiply-back of the conditional failed", scenario.name)
        });

        // additivity over disjoint condition events
        let c_all = random_constraint(&mut ctx.rng, scenario.role(1));
        let split = super::gen::random_event(&mut ctx.rng, c_all.object().codomain());
        let a1 = c_all.event().intersect(&split).unwrap();
        let a2 = c_all.event().intersect(&split.complement()).unwrap();
        let obj = c_all.object().clone();
        let int_of = |e: &Event| {
            e_integral(
                &y2,
                &cooc_measure(p, subject, &[Constraint::new(obj.clone(), e.clone()).unwrap()])
                    .unwrap(),
            )
            .unwrap()
            .value
        };
        ctx.assert_case(int_of(c_all.event()) == int_of(&a1) + int_of(&a2), || {
            format!("{}: restricted integrals are not additive", scenario.name)
        });
    }
}

/// Integrating a target-coordinate variable over a source rectangle of the
/// joint co-occurrence measure equals adjoining the source event as a
/// constraint.
pub(super) fn check_rectangle_identity(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let x1 = scenario.role(0);
        let x2 = scenario.role(1);
        let c3 = random_constraint(&mut ctx.rng, scenario.role(2));
        let c4 = random_constraint(&mut ctx.rng, scenario.role(3));
        let y = random_variable(&mut ctx.rng, x2.codomain());
        let a1 = super::gen::random_event(&mut ctx.rng, x1.codomain());
        let a2 = super::gen::random_event(&mut ctx.rng, x2.codomain());

        let (pair, product) = pair_bundle(x1, x2).unwrap();
        let joint = cooc_measure(p, &pair, &[c3.clone(), c4.clone()]).unwrap();
        // integrand on the pair that reads the target coordinate through
        // indicator windows on both coordinates
        let values = (0..product.len())
            .map(|pt| {
                let c = product.coords(pt);
                if a1.contains(c[0]) && a2.contains(c[1]) {
                    y.value(c[1]).clone()
                } else {
                    Rat::zero()
                }
            })
            .collect();
        let lifted = RandomVariable::new(product.space().clone(), values).unwrap();
        let lhs = e_integral(&lifted, &joint).unwrap().value;

        let windowed = y.mul(&RandomVariable::indicator(&a2)).unwrap();
        let rhs = e_integral(
            &windowed,
            &cooc_measure(
                p,
                x2,
                &[
                    Constraint::new(x1.clone(), a1.clone()).unwrap(),
                    c3.clone(),
                    c4.clone(),
                ],
            )
            .unwrap(),
        )
        .unwrap()
        .value;
        ctx.assert_case(lhs == rhs, || {
            format!("{}: rectangle integration identity failed", scenario.name)
        });
    }
}

/// The defining equation of conditional E-integrals given objects, plus
/// canonical zeroes and almost-everywhere uniqueness.
pub(super) fn check_eintegral_defining(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let given = scenario.role(0);
        let subject = scenario.role(1);
        let y = random_variable(&mut ctx.rng, subject.codomain());
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
        let phi =
            cond_expectation_object(p, &y, subject, given, &conditions, &target_conditions)
                .unwrap();
        let mut all = target_conditions.clone();
        all.extend(conditions.iter().cloned());
        let mut full_lhs = Rat::zero();
        let mut ok = true;
        for block in given.codomain_field().blocks() {
            let lhs: Rat = block
                .iter()
                .map(|&x| phi.value(x) * phi.reference().weight(x))
                .sum();
            let rhs = weighted_direct_mass(p, &y, subject, &all, Some((given, block)));
            if lhs != rhs {
                ok = false;
            }
            full_lhs += lhs;
        }
        ok = ok && full_lhs == weighted_direct_mass(p, &y, subject, &all, None);
        ctx.assert_case(ok, || {
            format!("{}: conditional E-integral defining equation failed", scenario.name)
        });

        // canonical zero off support
        let ok = (0..given.codomain().size()).all(|x| {
            let block = given.codomain_field().block_of(x);
            let mass: Rat = block.iter().map(|&b| phi.reference().weight(b).clone()).sum();
            !mass.is_zero() || phi.value(x).is_zero()
        });
        ctx.assert_case(ok, || {
            format!("{}: conditional E-integral nonzero off support", scenario.name)
        });
    }
}

/// Nested conditional expectations along a chain reproduce the direct
/// integral, for chains of length two to four, cross-checked against a
/// base-outcome enumeration.
pub(super) fn check_iterated_decomposition(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let n = ctx.rng.gen_range(2..=4usize);
        let mut steps = BTreeMap::new();
        for k in 0..n {
            let object = scenario.role(k).clone();
            let constraint = if ctx.rng.gen_bool(0.3) {
                random_constraint(&mut ctx.rng, scenario.role(k + 1))
            } else {
                full_constraint(scenario.role(k + 1))
            };
            steps.insert(k + 1, ChainStep { object, constraint });
        }
        let index_set = crate::space::IndexSet::new(1..=n).unwrap();
        let objects: BTreeMap<usize, RandomObject> = steps
            .iter()
            .map(|(i, s)| (*i, s.object.clone()))
            .collect();
        let (bundled, product) = crate::object::bundle(&objects, &index_set).unwrap();
        let y = random_variable(&mut ctx.rng, product.space());

        // a random evaluation order
        let mut chain: Vec<usize> = (1..=n).collect();
        for i in (1..chain.len()).rev() {
            let j = ctx.rng.gen_range(0..=i);
            chain.swap(i, j);
        }
        match iterated_decompose(p, &y, &steps, &chain) {
            Ok(result) => {
                // third route: enumerate base outcomes directly
                let constraints: Vec<Constraint> =
                    steps.values().map(|s| s.constraint.clone()).collect();
                let oracle = weighted_direct_mass(p, &y, &bundled, &constraints, None);
                ctx.assert_case(result.value == oracle && result.direct == oracle, || {
                    format!("{}: decomposition differs from direct enumeration", scenario.name)
                });
            }
            Err(e) => ctx.fail(format!("{}: decomposition errored: {e}", scenario.name)),
        }
    }
}

/// E-integrals split additively over a disjoint split of one fixed
/// constraint, both unconditionally and given an object.
pub(super) fn check_constraint_additivity(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let subject = scenario.role(0);
        let y = random_variable(&mut ctx.rng, subject.codomain());
        let whole = random_constraint(&mut ctx.rng, scenario.role(1));
        let split = super::gen::random_event(&mut ctx.rng, whole.object().codomain());
        let part1 = Constraint::new(
            whole.object().clone(),
            whole.event().intersect(&split).unwrap(),
        )
        .unwrap();
        let part2 = Constraint::new(
            whole.object().clone(),
            whole.event().intersect(&split.complement()).unwrap(),
        )
        .unwrap();
        let c5 = random_constraint(&mut ctx.rng, scenario.role(2));

        let scalar = |c: &Constraint| {
            e_integral(&y, &cooc_measure(p, subject, &[c.clone(), c5.clone()]).unwrap())
                .unwrap()
                .value
        };
        ctx.assert_case(scalar(&whole) == scalar(&part1) + scalar(&part2), || {
            format!("{}: scalar constraint additivity failed", scenario.name)
        });

        // conditional version given an object and an event
        let given = scenario.role(3);
        let c3 = random_nonempty_constraint(&mut ctx.rng, scenario.role(1));
        let pointwise = |c: &Constraint| {
            cond_expectation_object(p, &y, subject, given, std::slice::from_ref(&c3), &[c.clone(), c5.clone()])
                .unwrap()
        };
        let w = pointwise(&whole);
        let p1 = pointwise(&part1);
        let p2 = pointwise(&part2);
        let ok = w
            .reference()
            .support()
            .into_iter()
            .all(|x| *w.value(x) == p1.value(x) + p2.value(x));
        ctx.assert_case(ok, || {
            format!("{}: conditional constraint additivity failed", scenario.name)
        });
    }
}

/// Moving a fixed constraint between the integral and the conditioning
/// side multiplies in the pointwise conditional probability, with the
/// quotient form holding on the positivity set.
pub(super) fn check_integral_shift(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let subject = scenario.role(0);
        let given = scenario.role(1);
        let y = random_variable(&mut ctx.rng, subject.codomain());
        let c3 = random_constraint(&mut ctx.rng, scenario.role(2));
        let c4 = random_constraint(&mut ctx.rng, scenario.role(3));
        let c5 = random_nonempty_constraint(&mut ctx.rng, scenario.role(2));

        let lhs = cond_expectation_object(p, &y, subject, given, std::slice::from_ref(&c5), &[c3.clone(), c4.clone()])
            .unwrap();
        let shifted =
            cond_expectation_object(p, &y, subject, given, &[c3.clone(), c5.clone()], std::slice::from_ref(&c4))
                .unwrap();
        let p3 = cond_prob_pointwise(p, given, std::slice::from_ref(&c3), std::slice::from_ref(&c5)).unwrap();

        // product form everywhere on the coarse support
        let ok = lhs
            .reference()
            .support()
            .into_iter()
            .all(|x| *lhs.value(x) == shifted.value(x) * p3.value(x));
        ctx.assert_case(ok, || {
            format!("{}: integral shift product form failed", scenario.name)
        });

        // quotient form on the positivity set
        let ok = lhs
            .reference()
            .support()
            .into_iter()
            .filter(|&x| !p3.value(x).is_zero())
            .all(|x| *shifted.value(x) == lhs.value(x) / p3.value(x));
        ctx.assert_case(ok, || {
            format!("{}: integral shift quotient form failed", scenario.name)
        });
    }
}

/// On product models, conditioning on the independent side drops out of
/// conditional E-integrals once the product hypothesis holds.
pub(super) fn check_independence_transfer(ctx: &mut CheckCtx) {
    for k in 0..ctx.scenarios.len().max(4) {
        let ps = super::gen::random_product_scenario(&mut ctx.rng, &format!("transfer-{k}"));
        let scenario = &ps.scenario;
        let p = &scenario.base;
        let x1 = &scenario.objects[ps.left[0]];
        let x3 = &scenario.objects[ps.left[1 % ps.left.len()]];
        let x2 = &scenario.objects[ps.right[0]];
        let c4 = random_nonempty_constraint(&mut ctx.rng, x1);
        let c6 = random_nonempty_constraint(&mut ctx.rng, x3);
        let c5 = random_constraint(&mut ctx.rng, x2);
        let y = random_variable(&mut ctx.rng, x2.codomain());

        // hypothesis: the joint kernel factorizes (left objects vs right)
        let verdict = crate::conditioning::check_cond_independence(
            p,
            &crate::conditioning::IndependencePattern::MeasureMeasureGivenObject {
                left: (x2.clone(), c5.clone()),
                right: (x3.clone(), c6.clone()),
                given: x1.clone(),
                given_event: c4.clone(),
            },
        )
        .unwrap();
        if !verdict.holds {
            ctx.fail(format!("{}: product hypothesis failed", scenario.name));
            continue;
        }
        // conclusion: conditioning additionally on (X3, A6) drops out
        let (pair13, product13) = pair_bundle(x1, x3).unwrap();
        let widened = cond_expectation_object(
            p,
            &y,
            x2,
            &pair13,
            &[c4.clone(), c6.clone()],
            std::slice::from_ref(&c5),
        )
        .unwrap();
        let plain =
            cond_expectation_object(p, &y, x2, x1, std::slice::from_ref(&c4), std::slice::from_ref(&c5)).unwrap();
        let ok = widened.reference().support().into_iter().all(|pt| {
            let c = product13.coords(pt);
            widened.value(pt) == plain.value(c[0])
        });
        ctx.assert_case(ok, || {
            format!("{}: independent conditioning did not drop", scenario.name)
        });

        // event-only form: E(...|X1; A4, A6') = E(...|X1, A4) when the
        // extra event lives on the independent side
        let widened = cond_expectation_object(
            p,
            &y,
            x2,
            x1,
            &[c4.clone(), c6.clone()],
            std::slice::from_ref(&c5),
        )
        .unwrap();
        let ok = widened
            .reference()
            .support()
            .into_iter()
            .all(|x| widened.value(x) == plain.value(x));
        ctx.assert_case(ok, || {
            format!("{}: independent event conditioning did not drop", scenario.name)
        });
    }
}

/// Scalar homogeneity, additivity, monotonicity, and the absolute-value
/// bound, in both the event-conditioned and object-conditioned forms.
pub(super) fn check_linearity_monotonicity(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let subject = scenario.role(0);
        let given = scenario.role(1);
        let y1 = random_variable(&mut ctx.rng, subject.codomain());
        let y2 = random_variable(&mut ctx.rng, subject.codomain());
        let c3 = random_nonempty_constraint(&mut ctx.rng, scenario.role(2));
        let c4 = random_constraint(&mut ctx.rng, scenario.role(3));
        let alpha = Rat::new(
            ctx.rng.gen_range(-6..=6i64).into(),
            ctx.rng.gen_range(1..=4i64).into(),
        );

        let ev = |y: &RandomVariable| {
            cond_expectation_event(p, y, subject, std::slice::from_ref(&c4), std::slice::from_ref(&c3))
                .unwrap()
                .value
        };
        ctx.assert_case(ev(&y1.scale(&alpha)) == alpha.clone() * ev(&y1), || {
            format!("{}: scalar homogeneity failed (event form)", scenario.name)
        });
        ctx.assert_case(ev(&y1.add(&y2).unwrap()) == ev(&y1) + ev(&y2), || {
            format!("{}: additivity failed (event form)", scenario.name)
        });
        let y_hi = y1.add(&random_nonnegative_variable(&mut ctx.rng, subject.codomain())).unwrap();
        ctx.assert_case(ev(&y1) <= ev(&y_hi), || {
            format!("{}: monotonicity failed (event form)", scenario.name)
        });
        ctx.assert_case(ev(&y1).abs() <= ev(&y1.abs()), || {
            format!("{}: absolute-value bound failed (event form)", scenario.name)
        });

        let ob = |y: &RandomVariable| {
            cond_expectation_object(p, y, subject, given, std::slice::from_ref(&c3), std::slice::from_ref(&c4)).unwrap()
        };
        let e1 = ob(&y1);
        let scaled = ob(&y1.scale(&alpha));
        let summed = ob(&y1.add(&y2).unwrap());
        let e2 = ob(&y2);
        let hi = ob(&y_hi);
        let abs = ob(&y1.abs());
        let support = e1.reference().support();
        let ok = support.iter().all(|&x| {
            *scaled.value(x) == alpha.clone() * e1.value(x)
                && *summed.value(x) == e1.value(x) + e2.value(x)
                && e1.value(x) <= hi.value(x)
                && e1.value(x).abs() <= *abs.value(x)
        });
        ctx.assert_case(ok, || {
            format!("{}: linearity/monotonicity failed (object form)", scenario.name)
        });
    }
}

/// The tower property over nested conditioning fields: conditioning first
/// on the finer field and then on the coarser one lands on the coarser
/// conditional expectation, exactly.
pub(super) fn check_tower(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let subject = scenario.role(0);
        let (coarse, fine) = random_partition_pair(&mut ctx.rng, subject.codomain());
        let x21 = subject.coarsen(coarse).unwrap();
        let x22 = subject.coarsen(fine).unwrap();
        let y = random_variable(&mut ctx.rng, subject.codomain());

        let inner = cond_expectation_object(p, &y, subject, &x22, &[], &[]).unwrap();
        let inner_rv =
            RandomVariable::new(subject.codomain().clone(), inner.values().to_vec()).unwrap();
        let towered = cond_expectation_object(p, &inner_rv, &x22, &x21, &[], &[]).unwrap();
        let direct = cond_expectation_object(p, &y, subject, &x21, &[], &[]).unwrap();
        ctx.assert_case(direct.ae_eq(&towered), || {
            format!("{}: tower property failed", scenario.name)
        });

        // the inner function is also integrable against the plain subject
        let towered2 = cond_expectation_object(p, &inner_rv, subject, &x21, &[], &[]).unwrap();
        ctx.assert_case(direct.ae_eq(&towered2), || {
            format!("{}: tower property failed through the full field", scenario.name)
        });
    }
}

/// A stabilizing monotone sequence: the prefix, the limit, and the index
/// from which the terms equal the limit.
struct StabilizingSeq {
    terms: Vec<RandomVariable>,
    limit: RandomVariable,
    stable_from: usize,
}

/// Increasing truncation sequence min(y, n) for nonnegative y.
fn increasing_seq(y: &RandomVariable, len: usize) -> StabilizingSeq {
    let terms: Vec<RandomVariable> = (1..=len)
        .map(|n| {
            let cap = Rat::new((n as i64).into(), 1.into());
            y.map(|v| if *v <= cap { v.clone() } else { cap.clone() })
        })
        .collect();
    let stable_from = terms
        .iter()
        .position(|t| t == y)
        .unwrap_or(len - 1);
    StabilizingSeq {
        terms,
        limit: y.clone(),
        stable_from,
    }
}

/// Decreasing sequence max(y, -n).
fn decreasing_seq(y: &RandomVariable, len: usize) -> StabilizingSeq {
    let terms: Vec<RandomVariable> = (1..=len)
        .map(|n| {
            let floor = Rat::new((-(n as i64)).into(), 1.into());
            y.map(|v| if *v >= floor { v.clone() } else { floor.clone() })
        })
        .collect();
    let stable_from = terms
        .iter()
        .position(|t| t == y)
        .unwrap_or(len - 1);
    StabilizingSeq {
        terms,
        limit: y.clone(),
        stable_from,
    }
}

/// Monotone convergence in the event-conditioned form: integrals of a
/// stabilizing monotone sequence are monotone and reach the limit's
/// integral from the stabilization index on.
pub(super) fn check_monotone_convergence_events(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let subject = scenario.role(0);
        let c3 = random_constraint(&mut ctx.rng, scenario.role(1));
        let c1 = random_nonempty_constraint(&mut ctx.rng, scenario.role(2));
        let up = increasing_seq(&random_nonnegative_variable(&mut ctx.rng, subject.codomain()), 8);
        let down = decreasing_seq(&random_variable(&mut ctx.rng, subject.codomain()), 8);

        for (seq, direction) in [(&up, "increasing"), (&down, "decreasing")] {
            let integrals: Vec<Rat> = seq
                .terms
                .iter()
                .map(|t| {
                    cond_expectation_event(p, t, subject, std::slice::from_ref(&c3), std::slice::from_ref(&c1))
                        .unwrap()
                        .value
                })
                .collect();
            let monotone = integrals.windows(2).all(|w| {
                if direction == "increasing" {
                    w[0] <= w[1]
                } else {
                    w[0] >= w[1]
                }
            });
            let limit_value =
                cond_expectation_event(p, &seq.limit, subject, std::slice::from_ref(&c3), std::slice::from_ref(&c1))
                    .unwrap()
                    .value;
            let reaches = integrals[seq.stable_from..]
                .iter()
                .all(|v| *v == limit_value);
            ctx.assert_case(monotone && reaches, || {
                format!("{}: {direction} convergence failed (event form)", scenario.name)
            });
        }
    }
}

/// Monotone convergence in the object-conditioned form, pointwise on the
/// support.
pub(super) fn check_monotone_convergence_objects(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let subject = scenario.role(0);
        let given = scenario.role(1);
        let c3 = random_nonempty_constraint(&mut ctx.rng, scenario.role(2));
        let c4 = random_constraint(&mut ctx.rng, scenario.role(3));
        let up = increasing_seq(&random_nonnegative_variable(&mut ctx.rng, subject.codomain()), 8);
        let down = decreasing_seq(&random_variable(&mut ctx.rng, subject.codomain()), 8);

        for (seq, increasing) in [(&up, true), (&down, false)] {
            let conditionals: Vec<_> = seq
                .terms
                .iter()
                .map(|t| {
                    cond_expectation_object(p, t, subject, given, std::slice::from_ref(&c3), std::slice::from_ref(&c4))
                        .unwrap()
                })
                .collect();
            let limit =
                cond_expectation_object(p, &seq.limit, subject, given, std::slice::from_ref(&c3), std::slice::from_ref(&c4))
                    .unwrap();
            let support = limit.reference().support();
            let ok = support.iter().all(|&x| {
                let monotone = conditionals.windows(2).all(|w| {
                    if increasing {
                        w[0].value(x) <= w[1].value(x)
                    } else {
                        w[0].value(x) >= w[1].value(x)
                    }
                });
                let reaches = conditionals[seq.stable_from..]
                    .iter()
                    .all(|c| c.value(x) == limit.value(x));
                monotone && reaches
            });
            ctx.assert_case(ok, || {
                format!("{}: monotone convergence failed (object form)", scenario.name)
            });
        }
    }
}

/// Tail-infimum and tail-supremum bounds: integrating a pointwise tail
/// bound never exceeds (resp. falls below) the tail bound of the
/// integrals.
pub(super) fn check_fatou(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let subject = scenario.role(0);
        let c3 = random_constraint(&mut ctx.rng, scenario.role(1));
        let c1 = random_nonempty_constraint(&mut ctx.rng, scenario.role(2));
        // a bounded sequence that alternates, then stabilizes
        let a = random_variable(&mut ctx.rng, subject.codomain());
        let b = random_variable(&mut ctx.rng, subject.codomain());
        let mut terms: Vec<RandomVariable> = Vec::new();
        for n in 0..6 {
            terms.push(if n % 2 == 0 { a.clone() } else { b.clone() });
        }
        for _ in 6..8 {
            terms.push(b.clone());
        }

        let pointwise_min = |a: &RandomVariable, b: &RandomVariable| {
            RandomVariable::new(
                a.space().clone(),
                a.values()
                    .iter()
                    .zip(b.values())
                    .map(|(x, y)| if x <= y { x.clone() } else { y.clone() })
                    .collect(),
            )
            .unwrap()
        };
        let pointwise_max = |a: &RandomVariable, b: &RandomVariable| {
            RandomVariable::new(
                a.space().clone(),
                a.values()
                    .iter()
                    .zip(b.values())
                    .map(|(x, y)| if x >= y { x.clone() } else { y.clone() })
                    .collect(),
            )
            .unwrap()
        };
        let integral = |y: &RandomVariable| {
            cond_expectation_event(p, y, subject, std::slice::from_ref(&c3), std::slice::from_ref(&c1))
                .unwrap()
                .value
        };
        let integrals: Vec<Rat> = terms.iter().map(&integral).collect();
        let mut ok = true;
        for n in 0..terms.len() {
            // pointwise tail inf / sup from position n on; the sequence is
            // constant past its prefix, so the finite fold is the real tail
            let tail = &terms[n..];
            let tail_inf = tail.iter().skip(1).fold(tail[0].clone(), |acc, t| {
                pointwise_min(&acc, t)
            });
            let tail_sup = tail.iter().skip(1).fold(tail[0].clone(), |acc, t| {
                pointwise_max(&acc, t)
            });
            let inf_of_integrals = integrals[n..].iter().min().unwrap().clone();
            let sup_of_integrals = integrals[n..].iter().max().unwrap().clone();
            if integral(&tail_inf) > inf_of_integrals || integral(&tail_sup) < sup_of_integrals {
                ok = false;
            }
        }
        ctx.assert_case(ok, || {
            format!("{}: tail bound inequalities failed", scenario.name)
        });
    }
}

/// Dominated convergence: a sequence bounded by an integrable dominator and
/// stabilizing pointwise has integrals converging to the limit's integral,
/// exactly from the stabilization index on.
pub(super) fn check_dominated_convergence(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let subject = scenario.role(0);
        let given = scenario.role(1);
        let c3 = random_nonempty_constraint(&mut ctx.rng, scenario.role(2));
        let c4 = random_constraint(&mut ctx.rng, scenario.role(3));
        let y = random_variable(&mut ctx.rng, subject.codomain());
        let dominator = y.abs();
        let stable_from = 4usize;
        let terms: Vec<RandomVariable> = (1..=8usize)
            .map(|n| {
                let t = Rat::new((n.min(stable_from) as i64).into(), (stable_from as i64).into());
                y.scale(&t)
            })
            .collect();
        // domination holds by construction: |t·y| ≤ |y|
        let ok = terms.iter().all(|t| {
            t.values()
                .iter()
                .zip(dominator.values())
                .all(|(v, g)| v.abs() <= *g)
        });
        ctx.assert_case(ok, || format!("{}: dominator violated", scenario.name));

        let limit_scalar =
            cond_expectation_event(p, &y, subject, std::slice::from_ref(&c4), std::slice::from_ref(&c3)).unwrap().value;
        let tail_ok = terms[stable_from - 1..].iter().all(|t| {
            cond_expectation_event(p, t, subject, std::slice::from_ref(&c4), std::slice::from_ref(&c3))
                .unwrap()
                .value
                == limit_scalar
        });
        ctx.assert_case(tail_ok, || {
            format!("{}: dominated convergence failed (event form)", scenario.name)
        });

        let limit_pc =
            cond_expectation_object(p, &y, subject, given, std::slice::from_ref(&c3), std::slice::from_ref(&c4)).unwrap();
        let tail_ok = terms[stable_from - 1..].iter().all(|t| {
            let pc = cond_expectation_object(p, t, subject, given, std::slice::from_ref(&c3), std::slice::from_ref(&c4))
                .unwrap();
            limit_pc.ae_eq(&pc)
        });
        ctx.assert_case(tail_ok, || {
            format!("{}: dominated convergence failed (object form)", scenario.name)
        });
    }
}

/// Factors measurable with respect to the conditioning field pull out of
/// conditional E-integrals.
pub(super) fn check_pull_out(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let subject = scenario.role(0);
        let (coarse, _) = random_partition_pair(&mut ctx.rng, subject.codomain());
        let x21 = subject.coarsen(coarse.clone()).unwrap();
        let y = random_variable(&mut ctx.rng, subject.codomain());
        // a factor constant on the conditioning blocks
        let block_values: Vec<Rat> = (0..coarse.block_count())
            .map(|_| {
                Rat::new(
                    ctx.rng.gen_range(-4..=4i64).into(),
                    ctx.rng.gen_range(1..=4i64).into(),
                )
            })
            .collect();
        let z = RandomVariable::new(
            subject.codomain().clone(),
            (0..subject.codomain().size())
                .map(|o| block_values[coarse.block_index_of(o)].clone())
                .collect(),
        )
        .unwrap();
        let c1 = random_nonempty_constraint(&mut ctx.rng, scenario.role(1));
        let c3 = random_constraint(&mut ctx.rng, scenario.role(2));

        let zy = z.mul(&y).unwrap();
        let lhs =
            cond_expectation_object(p, &zy, subject, &x21, std::slice::from_ref(&c1), std::slice::from_ref(&c3)).unwrap();
        let plain =
            cond_expectation_object(p, &y, subject, &x21, std::slice::from_ref(&c1), std::slice::from_ref(&c3)).unwrap();
        let ok = lhs
            .reference()
            .support()
            .into_iter()
            .all(|x| *lhs.value(x) == z.value(x) * plain.value(x));
        ctx.assert_case(ok, || {
            format!("{}: measurable factor did not pull out", scenario.name)
        });
    }
}

/// √a ≤ √b + √c for nonnegative rationals, settled without square roots.
fn sqrt_triangle_le(a: &Rat, b: &Rat, c: &Rat) -> bool {
    let excess = a - b - c;
    if !excess.is_positive() {
        return true;
    }
    &excess * &excess <= Rat::new(4.into(), 1.into()) * b * c
}

/// The Hoelder inequality: exact at the (2,2) and (∞,1) pairings, checked
/// in floating point with relative tolerance 1e-12 at sampled exponents.
pub(super) fn check_hoelder(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let subject = scenario.role(0);
        let given = scenario.role(1);
        let y = random_variable(&mut ctx.rng, subject.codomain());
        let z = random_variable(&mut ctx.rng, subject.codomain());
        let c3 = random_nonempty_constraint(&mut ctx.rng, scenario.role(2));
        let c4 = random_constraint(&mut ctx.rng, scenario.role(3));

        let ev = |v: &RandomVariable| {
            cond_expectation_event(p, v, subject, std::slice::from_ref(&c4), std::slice::from_ref(&c3))
                .unwrap()
                .value
        };
        let yz_abs = y.mul(&z).unwrap().abs();
        // (2,2): cross-multiplied squares stay rational
        let lhs = ev(&yz_abs);
        let y2 = ev(&y.mul(&y).unwrap());
        let z2 = ev(&z.mul(&z).unwrap());
        ctx.assert_case(&lhs * &lhs <= y2.clone() * z2.clone(), || {
            format!("{}: quadratic pairing failed (event form)", scenario.name)
        });
        // (∞,1)
        let sup_y = y.ess_sup_abs(&crate::object::pushforward(p, subject).unwrap());
        ctx.assert_case(lhs <= sup_y.clone() * ev(&z.abs()), || {
            format!("{}: sup pairing failed (event form)", scenario.name)
        });

        // object-conditioned forms, pointwise on the support
        let ob = |v: &RandomVariable| {
            cond_expectation_object(p, v, subject, given, std::slice::from_ref(&c3), std::slice::from_ref(&c4)).unwrap()
        };
        let lhs_pc = ob(&yz_abs);
        let y2_pc = ob(&y.mul(&y).unwrap());
        let z2_pc = ob(&z.mul(&z).unwrap());
        let zabs_pc = ob(&z.abs());
        let ok = lhs_pc.reference().support().into_iter().all(|x| {
            let l = lhs_pc.value(x);
            l * l <= y2_pc.value(x) * z2_pc.value(x)
                && *l <= sup_y.clone() * zabs_pc.value(x)
        });
        ctx.assert_case(ok, || {
            format!("{}: pairings failed (object form)", scenario.name)
        });

        // sampled general exponents, float-checked
        let p_exp = [1.5f64, 2.5, 4.0][ctx.rng.gen_range(0..3)];
        let q_exp = p_exp / (p_exp - 1.0);
        let measure = crate::cooccurrence::cond_cooc_measure(p, subject, std::slice::from_ref(&c4), std::slice::from_ref(&c3))
            .unwrap()
            .value;
        let float_sum = |v: &RandomVariable, e: f64| -> f64 {
            v.values()
                .iter()
                .zip(measure.weights())
                .map(|(val, w)| to_f64(&val.abs()).powf(e) * to_f64(w))
                .sum()
        };
        let lhs_f = float_sum(&y.mul(&z).unwrap(), 1.0);
        let rhs_f = float_sum(&y, p_exp).powf(1.0 / p_exp) * float_sum(&z, q_exp).powf(1.0 / q_exp);
        let tol = 1e-12 * rhs_f.abs().max(lhs_f.abs()).max(1e-30);
        ctx.assert_case(lhs_f <= rhs_f + tol, || {
            format!("{}: float pairing failed at p={p_exp}", scenario.name)
        });
    }
}

/// The Minkowski inequality: exact at p ∈ {1, 2} and for the essential
/// supremum, float-checked at sampled exponents.
pub(super) fn check_minkowski(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let subject = scenario.role(0);
        let given = scenario.role(1);
        let y = random_variable(&mut ctx.rng, subject.codomain());
        let z = random_variable(&mut ctx.rng, subject.codomain());
        let sum = y.add(&z).unwrap();
        let c3 = random_nonempty_constraint(&mut ctx.rng, scenario.role(2));
        let c4 = random_constraint(&mut ctx.rng, scenario.role(3));

        let ev = |v: &RandomVariable| {
            cond_expectation_event(p, v, subject, std::slice::from_ref(&c4), std::slice::from_ref(&c3))
                .unwrap()
                .value
        };
        // p = 1: plain triangle inequality
        ctx.assert_case(ev(&sum.abs()) <= ev(&y.abs()) + ev(&z.abs()), || {
            format!("{}: triangle inequality failed (event form)", scenario.name)
        });
        // p = 2: settled through squares
        let a = ev(&sum.mul(&sum).unwrap());
        let b = ev(&y.mul(&y).unwrap());
        let c = ev(&z.mul(&z).unwrap());
        ctx.assert_case(sqrt_triangle_le(&a, &b, &c), || {
            format!("{}: quadratic norm inequality failed (event form)", scenario.name)
        });
        // essential supremum triangle inequality
        let law = crate::object::pushforward(p, subject).unwrap();
        ctx.assert_case(
            sum.ess_sup_abs(&law) <= y.ess_sup_abs(&law) + z.ess_sup_abs(&law),
            || format!("{}: sup norm inequality failed", scenario.name),
        );

        // object-conditioned p ∈ {1, 2}, pointwise
        let ob = |v: &RandomVariable| {
            cond_expectation_object(p, v, subject, given, std::slice::from_ref(&c3), std::slice::from_ref(&c4)).unwrap()
        };
        let abs_sum = ob(&sum.abs());
        let abs_y = ob(&y.abs());
        let abs_z = ob(&z.abs());
        let sq_sum = ob(&sum.mul(&sum).unwrap());
        let sq_y = ob(&y.mul(&y).unwrap());
        let sq_z = ob(&z.mul(&z).unwrap());
        let ok = abs_sum.reference().support().into_iter().all(|x| {
            *abs_sum.value(x) <= abs_y.value(x) + abs_z.value(x)
                && sqrt_triangle_le(sq_sum.value(x), sq_y.value(x), sq_z.value(x))
        });
        ctx.assert_case(ok, || {
            format!("{}: norm inequalities failed (object form)", scenario.name)
        });

        // sampled general exponent, float-checked
        let p_exp = [1.5f64, 3.0, 5.0][ctx.rng.gen_range(0..3)];
        let measure = crate::cooccurrence::cond_cooc_measure(p, subject, std::slice::from_ref(&c4), std::slice::from_ref(&c3))
            .unwrap()
            .value;
        let norm = |v: &RandomVariable| -> f64 {
            v.values()
                .iter()
                .zip(measure.weights())
                .map(|(val, w)| to_f64(&val.abs()).powf(p_exp) * to_f64(w))
                .sum::<f64>()
                .powf(1.0 / p_exp)
        };
        let lhs_f = norm(&sum);
        let rhs_f = norm(&y) + norm(&z);
        let tol = 1e-12 * rhs_f.abs().max(lhs_f.abs()).max(1e-30);
        ctx.assert_case(lhs_f <= rhs_f + tol, || {
            format!("{}: float norm inequality failed at p={p_exp}", scenario.name)
        });
    }
}

/// The Jensen inequality for convex piecewise-linear functions with
/// rational data, exact on the support.
pub(super) fn check_jensen(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let subject = scenario.role(0);
        let given = scenario.role(1);
        let c3 = random_nonempty_constraint(&mut ctx.rng, scenario.role(2));
        for _ in 0..3 {
            let phi = random_convex(&mut ctx.rng);
            let y = random_variable(&mut ctx.rng, subject.codomain());
            let inner =
                cond_expectation_object(p, &y, subject, given, std::slice::from_ref(&c3), &[]).unwrap();
            let outer =
                cond_expectation_object(p, &phi.apply(&y), subject, given, std::slice::from_ref(&c3), &[])
                    .unwrap();
            let ok = inner
                .reference()
                .support()
                .into_iter()
                .all(|x| phi.eval(inner.value(x)) <= *outer.value(x));
            ctx.assert_case(ok, || {
                format!("{}: convex inequality failed", scenario.name)
            });

            // the event-conditioned scalar special case; the inequality
            // presupposes a condition of positive mass
            let scalar_in = cond_expectation_event(p, &y, subject, &[], std::slice::from_ref(&c3)).unwrap();
            if !scalar_in.null_condition {
                let scalar_out =
                    cond_expectation_event(p, &phi.apply(&y), subject, &[], std::slice::from_ref(&c3))
                        .unwrap()
                        .value;
                ctx.assert_case(phi.eval(&scalar_in.value) <= scalar_out, || {
                    format!("{}: convex inequality failed (scalar form)", scenario.name)
                });
            }
        }
    }
}
