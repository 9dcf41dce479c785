//! E-integrals: integrals of rational-valued random variables against
//! co-occurrence and conditional co-occurrence measures, conditional
//! expectations given random objects, and the iterated-conditioning
//! decomposition.

use std::collections::BTreeMap;

use num::{Signed, Zero};

use crate::conditioning::{cond_kernel, PointwiseConditional};
use crate::cooccurrence::{cond_cooc_measure, cooc_measure, Constraint};
use crate::error::{Error, Result};
use crate::measure::RationalMeasure;
use crate::object::{bundle, RandomObject};
use crate::rational::Rat;
use crate::space::{require_same_space, IndexSet, SpaceRef};

/// A rational-valued random variable on a finite space: one exact value per
/// outcome. Values are finite by construction, so integrability is
/// automatic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomVariable {
    space: SpaceRef,
    values: Vec<Rat>,
}

impl RandomVariable {
    pub fn new(space: SpaceRef, values: Vec<Rat>) -> Result<RandomVariable> {
        if values.len() != space.size() {
            return Err(Error::InvalidObject(format!(
                "expected {} values, got {}",
                space.size(),
                values.len()
            )));
        }
        Ok(RandomVariable { space, values })
    }

    pub fn constant(space: SpaceRef, value: Rat) -> RandomVariable {
        let values = vec![value; space.size()];
        RandomVariable { space, values }
    }

    /// Indicator of an event.
    pub fn indicator(event: &crate::space::Event) -> RandomVariable {
        let values = event
            .space()
            .outcomes()
            .map(|o| {
                if event.contains(o) {
                    Rat::new(1.into(), 1.into())
                } else {
                    Rat::zero()
                }
            })
            .collect();
        RandomVariable {
            space: event.space().clone(),
            values,
        }
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn value(&self, outcome: usize) -> &Rat {
        &self.values[outcome]
    }

    pub fn map(&self, f: impl Fn(&Rat) -> Rat) -> RandomVariable {
        RandomVariable {
            space: self.space.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &RandomVariable) -> Result<RandomVariable> {
        require_same_space(&self.space, &other.space, "variable sum")?;
        Ok(RandomVariable {
            space: self.space.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn mul(&self, other: &RandomVariable) -> Result<RandomVariable> {
        require_same_space(&self.space, &other.space, "variable product")?;
        Ok(RandomVariable {
            space: self.space.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn scale(&self, factor: &Rat) -> RandomVariable {
        self.map(|v| v * factor)
    }

    pub fn abs(&self) -> RandomVariable {
        self.map(|v| v.abs())
    }

    /// Essential supremum of |Y| with respect to a reference measure:
    /// the maximum over outcomes of positive mass.
    pub fn ess_sup_abs(&self, reference: &RationalMeasure) -> Rat {
        reference
            .support()
            .into_iter()
            .map(|o| self.values[o].abs())
            .max()
            .unwrap_or_else(Rat::zero)
    }
}

/// The value of an E-integral together with the null-condition flag and the
/// measure that was integrated against. A null condition forces the value
/// to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EIntegralResult {
    pub value: Rat,
    pub null_condition: bool,
    pub reference: RationalMeasure,
}

/// Σ_ω Y(ω)·m({ω}): the integral of a random variable against a finite
/// measure, exact.
pub fn e_integral(y: &RandomVariable, m: &RationalMeasure) -> Result<EIntegralResult> {
    require_same_space(y.space(), m.space(), "integral measure")?;
    let value = m
        .support()
        .into_iter()
        .map(|o| y.value(o) * m.weight(o))
        .sum();
    Ok(EIntegralResult {
        value,
        null_condition: false,
        reference: m.clone(),
    })
}

/// The conditional expectation of `y` over `subject`, given the condition
/// constraints and carrying the target constraints: the integral against
/// the conditional co-occurrence measure. Multiplying the value back by the
/// condition mass recovers the unconditioned E-integral exactly.
pub fn cond_expectation_event(
    p: &RationalMeasure,
    y: &RandomVariable,
    subject: &RandomObject,
    targets: &[Constraint],
    conditions: &[Constraint],
) -> Result<EIntegralResult> {
    require_same_space(y.space(), subject.codomain(), "integrand space")?;
    let measure = cond_cooc_measure(p, subject, targets, conditions)?;
    if measure.null_condition {
        return Ok(EIntegralResult {
            value: Rat::zero(),
            null_condition: true,
            reference: measure.value,
        });
    }
    let mut result = e_integral(y, &measure.value)?;
    result.reference = measure.value;
    Ok(result)
}

/// The conditional expectation of `y` over `subject` given a random object
/// (plus condition constraints and fixed target constraints), as a function
/// of the conditioning object's value: at each supported source outcome the
/// value integrates `y` against the conditional kernel row. Satisfies the
/// defining equation exactly: summing value·reference over any field event
/// of the source recovers the E-integral with the source event adjoined as
/// a constraint.
pub fn cond_expectation_object(
    p: &RationalMeasure,
    y: &RandomVariable,
    subject: &RandomObject,
    given: &RandomObject,
    conditions: &[Constraint],
    target_conditions: &[Constraint],
) -> Result<PointwiseConditional> {
    require_same_space(y.space(), subject.codomain(), "integrand space")?;
    let kernel = cond_kernel(p, given, subject, conditions, target_conditions)?;
    let reference = cooc_measure(p, given, conditions)?;
    let mut values = vec![Rat::zero(); given.codomain().size()];
    for &x in kernel.support() {
        values[x] = e_integral(y, kernel.row(x))?.value;
    }
    Ok(PointwiseConditional::assemble(
        given.codomain().clone(),
        values,
        reference,
        kernel.null_condition(),
    ))
}

/// One step of an iterated decomposition: a target object paired with the
/// constraint fixed at the same step.
#[derive(Debug, Clone)]
pub struct ChainStep {
    pub object: RandomObject,
    pub constraint: Constraint,
}

/// Result of an iterated decomposition: the nested evaluation, with the
/// directly computed value it was checked against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IteratedDecomposition {
    pub value: Rat,
    pub direct: Rat,
    pub null_condition: bool,
}

/// Evaluates the E-integral of `y` over the product of all step targets,
/// carrying every step's constraint, by nesting conditional expectations
/// innermost-to-outermost along `chain`, and checks the result against the
/// direct integral over the bundled product. Off the support of the
/// reference measures the integrand is read as zero, which is exactly what
/// the canonical zero rows implement; the two routes then agree exactly.
///
/// `steps` maps target indices to their objects and constraints; `y` lives
/// on the product of the step codomains in ascending index order; `chain`
/// is the evaluation order and must cover the step indices exactly once.
pub fn iterated_decompose(
    p: &RationalMeasure,
    y: &RandomVariable,
    steps: &BTreeMap<usize, ChainStep>,
    chain: &[usize],
) -> Result<IteratedDecomposition> {
    if steps.len() < 2 {
        return Err(Error::ChainMismatch);
    }
    {
        let mut seen = std::collections::BTreeSet::new();
        for i in chain {
            if !steps.contains_key(i) || !seen.insert(*i) {
                return Err(Error::ChainMismatch);
            }
        }
        if seen.len() != steps.len() {
            return Err(Error::ChainMismatch);
        }
    }
    let index_set = IndexSet::new(steps.keys().copied())?;
    let objects: BTreeMap<usize, RandomObject> = steps
        .iter()
        .map(|(i, s)| (*i, s.object.clone()))
        .collect();
    let (bundled, product) = bundle(&objects, &index_set)?;
    require_same_space(y.space(), product.space(), "integrand space")?;
    let constraints: Vec<Constraint> = steps.values().map(|s| s.constraint.clone()).collect();

    // direct route: integrate against the joint co-occurrence measure
    let joint = cooc_measure(p, &bundled, &constraints)?;
    let direct = e_integral(y, &joint)?.value;

    // nested route: integrate out the chain back-to-front, conditioning each
    // step on the bundle of the earlier ones
    let mut current: Vec<Rat> = y.values().to_vec();
    let mut current_product = product.clone();
    let mut null = false;
    for depth in (1..chain.len()).rev() {
        let inner_index = chain[depth];
        let prefix: Vec<usize> = chain[..depth].to_vec();
        let prefix_set = IndexSet::new(prefix.iter().copied())?;
        let prefix_objects: BTreeMap<usize, RandomObject> = prefix
            .iter()
            .map(|i| (*i, steps[i].object.clone()))
            .collect();
        let (prefix_bundle, prefix_product) = bundle(&prefix_objects, &prefix_set)?;
        let prefix_constraints: Vec<Constraint> =
            prefix.iter().map(|i| steps[i].constraint.clone()).collect();
        let kernel = cond_kernel(
            p,
            &prefix_bundle,
            &steps[&inner_index].object,
            &prefix_constraints,
            &[steps[&inner_index].constraint.clone()],
        )?;
        null = null || kernel.null_condition();
        // integrate the inner coordinate out of `current`
        let mut next = vec![Rat::zero(); prefix_product.len()];
        for (row_pt, slot) in next.iter_mut().enumerate() {
            if !kernel.in_support(row_pt) {
                continue;
            }
            let prefix_coords = prefix_product.coords(row_pt);
            let row = kernel.row(row_pt);
            let mut acc = Rat::zero();
            for (z, w) in row.weights().iter().enumerate() {
                if w.is_zero() {
                    continue;
                }
                // assemble the full current-point coordinates
                let mut full = Vec::with_capacity(current_product.index_set().len());
                for i in current_product.index_set().iter() {
                    if i == inner_index {
                        full.push(z);
                    } else {
                        let pos = prefix_set.position(i).expect("prefix covers current");
                        full.push(prefix_coords[pos]);
                    }
                }
                acc += &current[current_product.point(&full)] * w;
            }
            *slot = acc;
        }
        current = next;
        current_product = prefix_product;
    }
    // outermost step: a plain E-integral with the first constraint
    let first = chain[0];
    let outer_measure = cooc_measure(
        p,
        &steps[&first].object,
        &[steps[&first].constraint.clone()],
    )?;
    let outer_rv = RandomVariable::new(steps[&first].object.codomain().clone(), current)?;
    let value = e_integral(&outer_rv, &outer_measure)?.value;

    if value != direct {
        return Err(Error::DecompositionMismatch);
    }
    Ok(IteratedDecomposition {
        value,
        direct,
        null_condition: null,
    })
}

/// A convex piecewise-linear function with rational breakpoints and
/// non-decreasing rational slopes; `slopes` has one more entry than
/// `breakpoints`. Anchored at value zero on the first breakpoint (at the
/// origin when there are none), which is immaterial for convexity
/// inequalities and pins the serialization down exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseLinearConvex {
    breakpoints: Vec<Rat>,
    slopes: Vec<Rat>,
}

impl PiecewiseLinearConvex {
    pub fn new(breakpoints: Vec<Rat>, slopes: Vec<Rat>) -> Result<PiecewiseLinearConvex> {
        if slopes.len() != breakpoints.len() + 1 {
            return Err(Error::NotConvex);
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NotConvex);
        }
        if slopes.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::NotConvex);
        }
        Ok(PiecewiseLinearConvex {
            breakpoints,
            slopes,
        })
    }

    pub fn breakpoints(&self) -> &[Rat] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[Rat] {
        &self.slopes
    }

    /// Exact evaluation.
    pub fn eval(&self, x: &Rat) -> Rat {
        let anchor = self
            .breakpoints
            .first()
            .cloned()
            .unwrap_or_else(Rat::zero);
        if self.breakpoints.is_empty() {
            return &self.slopes[0] * (x - anchor);
        }
        if *x <= anchor {
            return &self.slopes[0] * (x - &anchor);
        }
        // walk segments left to right accumulating the exact value
        let mut value = Rat::zero();
        let mut pos = anchor.clone();
        for (k, b) in self.breakpoints.iter().enumerate().skip(1) {
            if *x <= *b {
                return value + &self.slopes[k] * (x - &pos);
            }
            value += &self.slopes[k] * (b - &pos);
            pos = b.clone();
        }
        value + self.slopes.last().unwrap() * (x - &pos)
    }

    pub fn apply(&self, y: &RandomVariable) -> RandomVariable {
        y.map(|v| self.eval(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::MeasureKind;
    use crate::object::pushforward;
    use crate::rational::{int, ratio};
    use crate::space::{Event, FiniteSpace};

    fn space(n: usize) -> SpaceRef {
        FiniteSpace::unlabeled(n).unwrap()
    }

    struct M0 {
        omega: SpaceRef,
        p: RationalMeasure,
        parity: RandomObject,
        high: RandomObject,
        y: RandomVariable,
    }

    fn m0() -> M0 {
        let omega = space(4);
        let high = RandomObject::new(omega.clone(), space(2), vec![0, 0, 1, 1]).unwrap();
        let y = RandomVariable::new(high.codomain().clone(), vec![int(0), int(1)]).unwrap();
        M0 {
            p: RationalMeasure::uniform(omega.clone()),
            parity: RandomObject::new(omega.clone(), space(2), vec![0, 1, 0, 1]).unwrap(),
            high,
            y,
            omega,
        }
    }

    fn ev(s: &SpaceRef, members: &[usize]) -> Event {
        Event::new(s.clone(), members.iter().copied()).unwrap()
    }

    #[test]
    fn plain_e_integral() {
        let m = m0();
        let law = pushforward(&m.p, &m.high).unwrap();
        assert_eq!(e_integral(&m.y, &law).unwrap().value, ratio(1, 2));
        // against a sub-probability co-occurrence measure
        let even = Constraint::new(m.parity.clone(), ev(m.parity.codomain(), &[0])).unwrap();
        let nu = cooc_measure(&m.p, &m.high, &[even]).unwrap();
        assert_eq!(e_integral(&m.y, &nu).unwrap().value, ratio(1, 4));
        // against the zero measure
        let z = RationalMeasure::zero(m.high.codomain().clone());
        assert_eq!(e_integral(&m.y, &z).unwrap().value, int(0));
    }

    #[test]
    fn conditional_expectation_given_event() {
        let m = m0();
        let even = Constraint::new(m.parity.clone(), ev(m.parity.codomain(), &[0])).unwrap();
        let r = cond_expectation_event(&m.p, &m.y, &m.high, &[], &[even.clone()]).unwrap();
        assert_eq!(r.value, ratio(1, 2));
        assert!(!r.null_condition);
        // multiplying back by the condition mass recovers the plain integral
        let mass = m.p.of(&even.pullback().unwrap()).unwrap();
        let nu = cooc_measure(&m.p, &m.high, &[even]).unwrap();
        assert_eq!(r.value * mass, e_integral(&m.y, &nu).unwrap().value);
        // conditioning on the sure event gives the plain expectation
        let sure = Constraint::new(
            m.parity.clone(),
            Event::full(m.parity.codomain().clone()),
        )
        .unwrap();
        let r = cond_expectation_event(&m.p, &m.y, &m.high, &[], &[sure]).unwrap();
        assert_eq!(r.value, ratio(1, 2));
        // null condition
        let none = Constraint::new(m.parity.clone(), Event::empty(m.parity.codomain().clone()))
            .unwrap();
        let r = cond_expectation_event(&m.p, &m.y, &m.high, &[], &[none]).unwrap();
        assert!(r.null_condition);
        assert_eq!(r.value, int(0));
    }

    #[test]
    fn conditional_expectation_given_object() {
        let m = m0();
        // parity is independent of high: the conditional expectation is the
        // constant E(Y) on the support
        let pc = cond_expectation_object(&m.p, &m.y, &m.high, &m.parity, &[], &[]).unwrap();
        for x in pc.reference().support() {
            assert_eq!(pc.value(x), &ratio(1, 2));
        }
        // conditioning on the subject itself returns the variable
        let pc = cond_expectation_object(&m.p, &m.y, &m.high, &m.high, &[], &[]).unwrap();
        for x in pc.reference().support() {
            assert_eq!(pc.value(x), m.y.value(x));
        }
        // a constant object conditions on no information
        let c = RandomObject::constant(m.omega.clone(), space(1), 0).unwrap();
        let pc = cond_expectation_object(&m.p, &m.y, &m.high, &c, &[], &[]).unwrap();
        assert_eq!(pc.value(0), &ratio(1, 2));
    }

    #[test]
    fn iterated_decomposition_on_m0() {
        let m = m0();
        let full_p = Event::full(m.parity.codomain().clone());
        let full_h = Event::full(m.high.codomain().clone());
        let mut steps = BTreeMap::new();
        steps.insert(
            1usize,
            ChainStep {
                object: m.parity.clone(),
                constraint: Constraint::new(m.parity.clone(), full_p).unwrap(),
            },
        );
        steps.insert(
            2usize,
            ChainStep {
                object: m.high.clone(),
                constraint: Constraint::new(m.high.clone(), full_h).unwrap(),
            },
        );
        // indicator of (even, hi) on the product (ascending index order)
        let product_size = 4;
        let mut values = vec![int(0); product_size];
        values[0 * 2 + 1] = int(1); // parity=0, high=1
        let y = RandomVariable::new(space(4), values).unwrap();
        let r = iterated_decompose(&m.p, &y, &steps, &[1, 2]).unwrap();
        assert_eq!(r.value, ratio(1, 4));
        assert_eq!(r.direct, ratio(1, 4));
        // reversed chain gives the same value
        let r = iterated_decompose(&m.p, &y, &steps, &[2, 1]).unwrap();
        assert_eq!(r.value, ratio(1, 4));
        // constant integrand: value = c times the joint co-occurrence mass
        let c = RandomVariable::constant(space(4), ratio(3, 2));
        let r = iterated_decompose(&m.p, &c, &steps, &[1, 2]).unwrap();
        assert_eq!(r.value, ratio(3, 2));
        // bad chains are rejected
        assert_eq!(
            iterated_decompose(&m.p, &y, &steps, &[1, 1]).unwrap_err(),
            Error::ChainMismatch
        );
        assert_eq!(
            iterated_decompose(&m.p, &y, &steps, &[1]).unwrap_err(),
            Error::ChainMismatch
        );
    }

    #[test]
    fn decomposition_with_a_null_prefix_constraint() {
        // an impossible constraint on the first chain step kills all mass:
        // both routes agree on zero and the null flag is raised
        let m = m0();
        let mut steps = BTreeMap::new();
        steps.insert(
            1usize,
            ChainStep {
                object: m.parity.clone(),
                constraint: Constraint::new(
                    m.parity.clone(),
                    Event::empty(m.parity.codomain().clone()),
                )
                .unwrap(),
            },
        );
        steps.insert(
            2usize,
            ChainStep {
                object: m.high.clone(),
                constraint: Constraint::new(
                    m.high.clone(),
                    Event::full(m.high.codomain().clone()),
                )
                .unwrap(),
            },
        );
        let y = RandomVariable::constant(space(4), int(5));
        let r = iterated_decompose(&m.p, &y, &steps, &[1, 2]).unwrap();
        assert_eq!(r.value, int(0));
        assert_eq!(r.direct, int(0));
        assert!(r.null_condition);
    }

    #[test]
    fn independent_chain_collapses_to_product() {
        let m = m0();
        let full_p = Event::full(m.parity.codomain().clone());
        let full_h = Event::full(m.high.codomain().clone());
        let mut steps = BTreeMap::new();
        steps.insert(
            1usize,
            ChainStep {
                object: m.parity.clone(),
                constraint: Constraint::new(m.parity.clone(), full_p).unwrap(),
            },
        );
        steps.insert(
            2usize,
            ChainStep {
                object: m.high.clone(),
                constraint: Constraint::new(m.high.clone(), full_h).unwrap(),
            },
        );
        // product integrand Y(a,b) = f(a) g(b) with independent coordinates
        let f = [int(1), int(3)];
        let g = [int(2), int(5)];
        let mut values = vec![int(0); 4];
        for a in 0..2 {
            for b in 0..2 {
                values[a * 2 + b] = &f[a] * &g[b];
            }
        }
        let y = RandomVariable::new(space(4), values).unwrap();
        let r = iterated_decompose(&m.p, &y, &steps, &[1, 2]).unwrap();
        let ef: Rat = ratio(1, 2) * (&f[0] + &f[1]);
        let eg: Rat = ratio(1, 2) * (&g[0] + &g[1]);
        assert_eq!(r.value, ef * eg);
    }

    #[test]
    fn piecewise_linear_convex_evaluation() {
        // |x| anchored at 0: breakpoints [0], slopes [-1, 1]
        let phi = PiecewiseLinearConvex::new(vec![int(0)], vec![int(-1), int(1)]).unwrap();
        assert_eq!(phi.eval(&int(-3)), int(3));
        assert_eq!(phi.eval(&int(2)), int(2));
        assert_eq!(phi.eval(&ratio(-1, 2)), ratio(1, 2));
        // two breakpoints
        let phi =
            PiecewiseLinearConvex::new(vec![int(0), int(1)], vec![int(0), int(1), int(4)]).unwrap();
        assert_eq!(phi.eval(&int(-5)), int(0));
        assert_eq!(phi.eval(&ratio(1, 2)), ratio(1, 2));
        assert_eq!(phi.eval(&int(2)), int(5));
        // decreasing slopes are rejected
        assert!(PiecewiseLinearConvex::new(vec![int(0)], vec![int(1), int(0)]).is_err());
        // unsorted breakpoints are rejected
        assert!(
            PiecewiseLinearConvex::new(vec![int(1), int(0)], vec![int(0), int(1), int(2)])
                .is_err()
        );
    }

    #[test]
    fn ess_sup_ignores_null_outcomes() {
        let s = space(3);
        let y = RandomVariable::new(s.clone(), vec![int(5), int(-7), int(1)]).unwrap();
        let m = RationalMeasure::new(
            s,
            vec![ratio(1, 2), int(0), ratio(1, 2)],
            MeasureKind::Probability,
        )
        .unwrap();
        assert_eq!(y.ess_sup_abs(&m), int(5));
    }
}
