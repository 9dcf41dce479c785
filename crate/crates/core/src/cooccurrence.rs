//! Scalar and measure-valued probabilities of co-occurrence, plus their
//! event-conditioned versions.
//!
//! A co-occurrence query constrains several random objects at once; its
//! probability is the mass of the intersection of the pulled-back events.
//! Conditioning on a null event yields zero by convention, flagged so that
//! callers can distinguish it from a genuine zero.

use num::Zero;

use crate::error::{Error, Result};
use crate::measure::{MeasureKind, RationalMeasure};
use crate::object::RandomObject;
use crate::rational::Rat;
use crate::space::{require_same_space, Event};

/// A constraint `X ∈ A`: a random object paired with an event in its
/// codomain, measurable with respect to the object's codomain field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    object: RandomObject,
    event: Event,
}

impl Constraint {
    pub fn new(object: RandomObject, event: Event) -> Result<Constraint> {
        require_same_space(object.codomain(), event.space(), "constraint event")?;
        if !event.measurable_wrt(object.codomain_field()) {
            return Err(Error::InvalidObject(
                "constraint event is not measurable w.r.t. the object's field".into(),
            ));
        }
        Ok(Constraint { object, event })
    }

    pub fn object(&self) -> &RandomObject {
        &self.object
    }

    pub fn event(&self) -> &Event {
        &self.event
    }

    /// The event `X⁻¹(A)` on the base space.
    pub fn pullback(&self) -> Result<Event> {
        self.object.preimage(&self.event)
    }
}

/// A conditional result with the zero convention made machine-readable:
/// `null_condition` is set exactly when the conditioning mass was zero, in
/// which case the value is the zero of its type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conditioned<T> {
    pub value: T,
    pub null_condition: bool,
}

impl<T> Conditioned<T> {
    pub fn genuine(value: T) -> Conditioned<T> {
        Conditioned {
            value,
            null_condition: false,
        }
    }

    pub fn null(zero: T) -> Conditioned<T> {
        Conditioned {
            value: zero,
            null_condition: true,
        }
    }
}

/// A co-occurrence query against one base probability measure: target
/// constraints (the queried side) and condition constraints (the given
/// side). All constraint objects must share the base's space as domain.
#[derive(Debug, Clone)]
pub struct CoocQuery {
    base: RationalMeasure,
    targets: Vec<Constraint>,
    conditions: Vec<Constraint>,
}

impl CoocQuery {
    pub fn new(
        base: RationalMeasure,
        targets: Vec<Constraint>,
        conditions: Vec<Constraint>,
    ) -> Result<CoocQuery> {
        if base.kind() != MeasureKind::Probability {
            return Err(Error::InvalidMeasure(
                "query base must be a probability measure".into(),
            ));
        }
        for c in targets.iter().chain(conditions.iter()) {
            require_same_space(base.space(), c.object().domain(), "query constraint domain")?;
        }
        Ok(CoocQuery {
            base,
            targets,
            conditions,
        })
    }

    pub fn base(&self) -> &RationalMeasure {
        &self.base
    }

    pub fn targets(&self) -> &[Constraint] {
        &self.targets
    }

    pub fn conditions(&self) -> &[Constraint] {
        &self.conditions
    }

    /// P(∩ targets | ∩ conditions); see [`cond_prob_objects`].
    pub fn probability(&self) -> Result<Conditioned<Rat>> {
        cond_prob_objects(&self.base, &self.targets, &self.conditions)
    }

    /// The conditional co-occurrence measure of `subject`;
    /// see [`cond_cooc_measure`].
    pub fn measure_of(&self, subject: &RandomObject) -> Result<Conditioned<RationalMeasure>> {
        cond_cooc_measure(&self.base, subject, &self.targets, &self.conditions)
    }
}

/// Intersection of the pullbacks of a constraint list; the empty list gives
/// the full base event (the intersection over nothing is Ω).
pub fn pullback_all(p: &RationalMeasure, constraints: &[Constraint]) -> Result<Event> {
    let mut acc = Event::full(p.space().clone());
    for c in constraints {
        require_same_space(p.space(), c.object().domain(), "constraint domain")?;
        acc = acc.intersect(&c.pullback()?)?;
    }
    Ok(acc)
}

/// P(∩ events): the probability that all listed events happen at once.
/// The empty list gives 1.
pub fn prob_cooc(p: &RationalMeasure, events: &[Event]) -> Result<Rat> {
    let mut acc = Event::full(p.space().clone());
    for e in events {
        acc = acc.intersect(e)?;
    }
    p.of(&acc)
}

/// P(∩ targets | ∩ conditions) on raw events; zero with the null flag when
/// the condition mass is zero.
pub fn cond_prob_cooc(
    p: &RationalMeasure,
    targets: &[Event],
    conditions: &[Event],
) -> Result<Conditioned<Rat>> {
    let mut cond = Event::full(p.space().clone());
    for e in conditions {
        cond = cond.intersect(e)?;
    }
    let denom = p.of(&cond)?;
    if denom.is_zero() {
        return Ok(Conditioned::null(Rat::zero()));
    }
    let mut joint = cond;
    for e in targets {
        joint = joint.intersect(e)?;
    }
    Ok(Conditioned::genuine(p.of(&joint)? / denom))
}

/// P(∩ Xᵢ⁻¹(Aᵢ)) over target constraints. Equals [`prob_cooc`] on the
/// pulled-back events.
pub fn prob_cooc_objects(p: &RationalMeasure, targets: &[Constraint]) -> Result<Rat> {
    p.of(&pullback_all(p, targets)?)
}

/// Conditional probability of co-occurrence over constraints; zero with
/// the null flag on a null condition.
pub fn cond_prob_objects(
    p: &RationalMeasure,
    targets: &[Constraint],
    conditions: &[Constraint],
) -> Result<Conditioned<Rat>> {
    let cond = pullback_all(p, conditions)?;
    let denom = p.of(&cond)?;
    if denom.is_zero() {
        return Ok(Conditioned::null(Rat::zero()));
    }
    let joint = pullback_all(p, targets)?.intersect(&cond)?;
    Ok(Conditioned::genuine(p.of(&joint)? / denom))
}

/// The co-occurrence measure of `subject` under target constraints: a
/// finite measure on the subject's codomain with
/// weight(z) = P(subject⁻¹{z} ∩ ∩ targets). Sub-probability in general;
/// total mass 1 exactly when the constraints pull back to full measure.
pub fn cooc_measure(
    p: &RationalMeasure,
    subject: &RandomObject,
    targets: &[Constraint],
) -> Result<RationalMeasure> {
    require_same_space(p.space(), subject.domain(), "co-occurrence subject")?;
    let restriction = pullback_all(p, targets)?;
    let mut weights = vec![Rat::zero(); subject.codomain().size()];
    for o in restriction.members() {
        let w = p.weight(o);
        if !w.is_zero() {
            weights[subject.apply(o)] += w;
        }
    }
    RationalMeasure::new(subject.codomain().clone(), weights, MeasureKind::Finite)
}

/// The conditional co-occurrence measure of `subject`: the joint measure
/// over targets and conditions divided by the condition mass. The zero
/// measure with the null flag on a null condition.
pub fn cond_cooc_measure(
    p: &RationalMeasure,
    subject: &RandomObject,
    targets: &[Constraint],
    conditions: &[Constraint],
) -> Result<Conditioned<RationalMeasure>> {
    require_same_space(p.space(), subject.domain(), "co-occurrence subject")?;
    let denom = p.of(&pullback_all(p, conditions)?)?;
    if denom.is_zero() {
        return Ok(Conditioned::null(RationalMeasure::zero(
            subject.codomain().clone(),
        )));
    }
    let mut all = targets.to_vec();
    all.extend_from_slice(conditions);
    let joint = cooc_measure(p, subject, &all)?;
    Ok(Conditioned::genuine(joint.scaled(&(Rat::new(
        1.into(),
        1.into(),
    ) / denom))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::object::pushforward;
    use crate::rational::{int, ratio};
    use crate::space::{FiniteSpace, SpaceRef};

    fn space(n: usize) -> SpaceRef {
        FiniteSpace::unlabeled(n).unwrap()
    }

    struct M0 {
        omega: SpaceRef,
        p: RationalMeasure,
        parity: RandomObject,
        high: RandomObject,
    }

    fn m0() -> M0 {
        let omega = space(4);
        M0 {
            p: RationalMeasure::uniform(omega.clone()),
            parity: RandomObject::new(omega.clone(), space(2), vec![0, 1, 0, 1]).unwrap(),
            high: RandomObject::new(omega.clone(), space(2), vec![0, 0, 1, 1]).unwrap(),
            omega,
        }
    }

    fn ev(s: &SpaceRef, members: &[usize]) -> Event {
        Event::new(s.clone(), members.iter().copied()).unwrap()
    }

    #[test]
    fn prob_cooc_on_events() {
        let m = m0();
        let a = ev(&m.omega, &[0, 2]);
        let b = ev(&m.omega, &[2, 3]);
        assert_eq!(prob_cooc(&m.p, &[a.clone(), b]).unwrap(), ratio(1, 4));
        let full = Event::full(m.omega.clone());
        assert_eq!(prob_cooc(&m.p, &[full.clone(), full]).unwrap(), int(1));
        assert_eq!(prob_cooc(&m.p, &[]).unwrap(), int(1));
        let d0 = ev(&m.omega, &[0]);
        let d1 = ev(&m.omega, &[1]);
        assert_eq!(prob_cooc(&m.p, &[d0, d1]).unwrap(), int(0));
    }

    #[test]
    fn cond_prob_cooc_cases() {
        let m = m0();
        let a = ev(&m.omega, &[0, 2]);
        let b = ev(&m.omega, &[2, 3]);
        let r = cond_prob_cooc(&m.p, &[a.clone()], &[b]).unwrap();
        assert_eq!(r.value, ratio(1, 2));
        assert!(!r.null_condition);
        // conditioning on the sure event returns the plain probability
        let r = cond_prob_cooc(&m.p, &[a.clone()], &[Event::full(m.omega.clone())]).unwrap();
        assert_eq!(r.value, ratio(1, 2));
        // null condition: zero with the flag
        let r = cond_prob_cooc(&m.p, &[a], &[Event::empty(m.omega.clone())]).unwrap();
        assert_eq!(r.value, int(0));
        assert!(r.null_condition);
    }

    #[test]
    fn object_level_queries() {
        let m = m0();
        let e = Constraint::new(m.parity.clone(), ev(m.parity.codomain(), &[0])).unwrap();
        let hi = Constraint::new(m.high.clone(), ev(m.high.codomain(), &[1])).unwrap();
        assert_eq!(
            prob_cooc_objects(&m.p, &[e.clone(), hi.clone()]).unwrap(),
            ratio(1, 4)
        );
        // single constraint on the full codomain
        let full = Constraint::new(
            m.parity.clone(),
            Event::full(m.parity.codomain().clone()),
        )
        .unwrap();
        assert_eq!(prob_cooc_objects(&m.p, &[full]).unwrap(), int(1));
        // contradictory constraints on one object
        let o = Constraint::new(m.parity.clone(), ev(m.parity.codomain(), &[1])).unwrap();
        assert_eq!(prob_cooc_objects(&m.p, &[e.clone(), o]).unwrap(), int(0));
        // conditional: P[parity even | high] = 1/2
        let r = cond_prob_objects(&m.p, &[e.clone()], &[hi.clone()]).unwrap();
        assert_eq!(r.value, ratio(1, 2));
        // independence: parity ⟂ high in M0
        let unconditional = prob_cooc_objects(&m.p, &[e.clone()]).unwrap();
        assert_eq!(r.value, unconditional);
        // empty condition event
        let none = Constraint::new(m.high.clone(), Event::empty(m.high.codomain().clone())).unwrap();
        let r = cond_prob_objects(&m.p, &[e], &[none]).unwrap();
        assert!(r.null_condition);
        assert_eq!(r.value, int(0));
    }

    #[test]
    fn cooc_measure_cases() {
        let m = m0();
        let e = Constraint::new(m.parity.clone(), ev(m.parity.codomain(), &[0])).unwrap();
        let nu = cooc_measure(&m.p, &m.high, &[e]).unwrap();
        assert_eq!(nu.weights(), &[ratio(1, 4), ratio(1, 4)]);
        assert_eq!(nu.total(), ratio(1, 2));
        // with full constraints the measure is the plain law
        let full = Constraint::new(
            m.parity.clone(),
            Event::full(m.parity.codomain().clone()),
        )
        .unwrap();
        let nu = cooc_measure(&m.p, &m.high, &[full]).unwrap();
        assert_eq!(nu.weights(), pushforward(&m.p, &m.high).unwrap().weights());
        // empty target event: the zero measure
        let none = Constraint::new(m.parity.clone(), Event::empty(m.parity.codomain().clone()))
            .unwrap();
        let nu = cooc_measure(&m.p, &m.high, &[none]).unwrap();
        assert!(nu.is_zero());
    }

    #[test]
    fn cond_cooc_measure_cases() {
        let m = m0();
        let e = Constraint::new(m.parity.clone(), ev(m.parity.codomain(), &[0])).unwrap();
        let r = cond_cooc_measure(&m.p, &m.high, &[], &[e.clone()]).unwrap();
        assert_eq!(r.value.weights(), &[ratio(1, 2), ratio(1, 2)]);
        assert_eq!(r.value.total(), int(1));
        // independence: P[high | parity even] = P[high]
        assert_eq!(
            r.value.weights(),
            pushforward(&m.p, &m.high).unwrap().weights()
        );
        // null condition: zero measure, flagged
        let none = Constraint::new(m.parity.clone(), Event::empty(m.parity.codomain().clone()))
            .unwrap();
        let r = cond_cooc_measure(&m.p, &m.high, &[], &[none]).unwrap();
        assert!(r.null_condition);
        assert!(r.value.is_zero());
    }

    #[test]
    fn constraint_must_be_field_measurable() {
        let m = m0();
        let coarse = m
            .parity
            .coarsen(crate::space::Partition::indiscrete(m.parity.codomain().clone()))
            .unwrap();
        let e = ev(m.parity.codomain(), &[0]);
        assert!(Constraint::new(coarse, e).is_err());
    }

    #[test]
    fn query_aggregate_delegates() {
        let m = m0();
        let e = Constraint::new(m.parity.clone(), ev(m.parity.codomain(), &[0])).unwrap();
        let hi = Constraint::new(m.high.clone(), ev(m.high.codomain(), &[1])).unwrap();
        let q = CoocQuery::new(m.p.clone(), vec![e], vec![hi]).unwrap();
        let r = q.probability().unwrap();
        assert_eq!(r.value, ratio(1, 2));
        // measure of high carrying the parity target given high ∈ {hi}:
        // only the single outcome {2} survives, divided by P(hi) = 1/2
        let nu = q.measure_of(&m.high).unwrap();
        assert_eq!(nu.value.weights(), &[int(0), ratio(1, 2)]);
        // a non-probability base is rejected
        let finite = RationalMeasure::zero(m.omega.clone());
        assert!(CoocQuery::new(finite, vec![], vec![]).is_err());
    }

    #[test]
    fn queries_reject_foreign_domains() {
        let m = m0();
        let other = RandomObject::identity(space(3));
        let c = Constraint::new(other, Event::full(space(3))).unwrap();
        assert!(matches!(
            prob_cooc_objects(&m.p, &[c]).unwrap_err(),
            Error::SpaceMismatch(_)
        ));
    }
}
