//! The null-condition convention, end to end: every conditional operation
//! must return the zero of its type together with the null flag whenever
//! the conditioning mass is zero, and never set the flag otherwise.

use num::Zero;
use rand::Rng;

use crate::conditioning::{
    check_cond_independence, cond_kernel, cond_prob_pointwise, IndependencePattern,
};
use crate::cooccurrence::{
    cond_cooc_measure, cond_prob_cooc, cond_prob_objects, Constraint,
};
use crate::eintegral::{cond_expectation_event, cond_expectation_object};
use crate::space::Event;

use super::gen::{random_constraint, random_variable};
use super::CheckCtx;

/// A condition of zero mass: either the empty event or an event carried
/// entirely by null outcomes of the base, when there are any.
fn null_condition(ctx: &mut CheckCtx, scenario: &super::Scenario, role: usize) -> Constraint {
    let object = scenario.role(role).clone();
    if ctx.rng.gen_bool(0.5) {
        // codomain values never attained on the support of the base
        let attained: std::collections::BTreeSet<usize> = scenario
            .base
            .support()
            .into_iter()
            .map(|o| object.apply(o))
            .collect();
        let dead: Vec<usize> = (0..object.codomain().size())
            .filter(|v| !attained.contains(v))
            .collect();
        if !dead.is_empty() {
            let event = Event::new(object.codomain().clone(), dead).unwrap();
            return Constraint::new(object, event).unwrap();
        }
    }
    let event = Event::empty(object.codomain().clone());
    Constraint::new(object, event).unwrap()
}

pub(super) fn check_null_conventions(ctx: &mut CheckCtx) {
    let scenarios = ctx.scenarios;
    for scenario in scenarios {
        let p = &scenario.base;
        let subject = scenario.role(0);
        let given = scenario.role(1);
        let nullc = null_condition(ctx, scenario, 2);
        let target = random_constraint(&mut ctx.rng, scenario.role(3));
        let y = random_variable(&mut ctx.rng, subject.codomain());

        // scalar conditioned on raw events
        let r = cond_prob_cooc(
            p,
            &[target.pullback().unwrap()],
            &[nullc.pullback().unwrap()],
        )
        .unwrap();
        ctx.assert_case(r.null_condition && r.value.is_zero(), || {
            format!("{}: event-conditioned scalar missed the flag", scenario.name)
        });

        // scalar over objects
        let r = cond_prob_objects(p, std::slice::from_ref(&target), std::slice::from_ref(&nullc)).unwrap();
        ctx.assert_case(r.null_condition && r.value.is_zero(), || {
            format!("{}: object-conditioned scalar missed the flag", scenario.name)
        });

        // conditional co-occurrence measure
        let r = cond_cooc_measure(p, subject, std::slice::from_ref(&target), std::slice::from_ref(&nullc)).unwrap();
        ctx.assert_case(r.null_condition && r.value.is_zero(), || {
            format!("{}: conditional measure missed the flag", scenario.name)
        });

        // pointwise conditional
        let pc = cond_prob_pointwise(p, given, std::slice::from_ref(&target), std::slice::from_ref(&nullc)).unwrap();
        ctx.assert_case(
            pc.null_condition() && pc.values().iter().all(|v| v.is_zero()),
            || format!("{}: pointwise conditional missed the flag", scenario.name),
        );

        // kernel
        let k = cond_kernel(p, given, subject, std::slice::from_ref(&nullc), std::slice::from_ref(&target)).unwrap();
        ctx.assert_case(
            k.null_condition() && k.rows().iter().all(|r| r.is_zero()) && k.support().is_empty(),
            || format!("{}: kernel missed the flag", scenario.name),
        );

        // conditional expectation given the null event
        let r = cond_expectation_event(p, &y, subject, &[], std::slice::from_ref(&nullc)).unwrap();
        ctx.assert_case(r.null_condition && r.value.is_zero(), || {
            format!("{}: conditional expectation missed the flag", scenario.name)
        });

        // conditional expectation given an object with a null condition
        let pc = cond_expectation_object(p, &y, subject, given, std::slice::from_ref(&nullc), &[]).unwrap();
        ctx.assert_case(
            pc.null_condition() && pc.values().iter().all(|v| v.is_zero()),
            || format!("{}: object-conditioned expectation missed the flag", scenario.name),
        );

        // vacuous conditional independence is true plus the flag
        let verdict = check_cond_independence(
            p,
            &IndependencePattern::EventEvent {
                left: target.clone(),
                right: random_constraint(&mut ctx.rng, scenario.role(1)),
                given: nullc.clone(),
            },
        )
        .unwrap();
        ctx.assert_case(verdict.holds && verdict.vacuous, || {
            format!("{}: vacuous independence not flagged", scenario.name)
        });

        // and a positive condition must not raise the flag
        let live_outcome = p.support()[0];
        let live_event = Event::singleton(
            given.codomain().clone(),
            given.apply(live_outcome),
        )
        .unwrap();
        let live = Constraint::new(given.clone(), live_event).unwrap();
        let r = cond_prob_objects(p, std::slice::from_ref(&target), &[live]).unwrap();
        ctx.assert_case(!r.null_condition, || {
            format!("{}: genuine condition was flagged null", scenario.name)
        });
    }
}
