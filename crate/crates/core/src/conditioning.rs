//! Pointwise conditional probabilities, conditional kernels, the
//! transformation calculus between them, and conditional independence.
//!
//! Conditioning on a random object resolves information down to the blocks
//! of its codomain field, so every result here is computed per block and is
//! constant on blocks. Values at reference-null blocks are fixed to zero:
//! conditional objects are only unique almost everywhere, and the zero
//! representative makes results reproducible and turns a.e. equality into a
//! plain comparison on the support.

use num::Zero;

use crate::cooccurrence::{cooc_measure, pullback_all, Constraint};
use crate::error::{Error, Result};
use crate::measure::{MeasureKind, RationalMeasure};
use crate::object::{bundle, RandomObject};
use crate::rational::Rat;
use crate::space::{require_same_space, Event, ProductSpace, SpaceRef};

/// A conditional probability as a function of the conditioning object's
/// value: one rational per source outcome, constant on the blocks of the
/// conditioning field, zero off the support of the reference measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointwiseConditional {
    source: SpaceRef,
    values: Vec<Rat>,
    reference: RationalMeasure,
    null_condition: bool,
}

impl PointwiseConditional {
    pub fn source(&self) -> &SpaceRef {
        &self.source
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn value(&self, outcome: usize) -> &Rat {
        &self.values[outcome]
    }

    /// The measure the almost-everywhere statements are relative to:
    /// the co-occurrence measure of the conditioning object with the
    /// condition constraints.
    pub fn reference(&self) -> &RationalMeasure {
        &self.reference
    }

    pub fn null_condition(&self) -> bool {
        self.null_condition
    }

    /// Equality on all outcomes carrying positive `reference` mass: the
    /// finite-space meaning of almost-everywhere equality.
    pub fn ae_eq_wrt(&self, other: &PointwiseConditional, reference: &RationalMeasure) -> bool {
        self.source == other.source
            && reference
                .support()
                .into_iter()
                .all(|o| self.values[o] == other.values[o])
    }

    pub fn ae_eq(&self, other: &PointwiseConditional) -> bool {
        self.ae_eq_wrt(other, &self.reference)
    }

    /// Assembles a conditional from raw parts. Crate-internal: other routes
    /// (E-integration, generators) build value vectors themselves.
    pub(crate) fn assemble(
        source: SpaceRef,
        values: Vec<Rat>,
        reference: RationalMeasure,
        null_condition: bool,
    ) -> PointwiseConditional {
        debug_assert_eq!(values.len(), source.size());
        PointwiseConditional {
            source,
            values,
            reference,
            null_condition,
        }
    }
}

/// A finite kernel: one finite measure on the target per source outcome,
/// constant on the blocks of the conditioning field. `support` lists the
/// source outcomes whose block carries positive reference mass; rows off
/// the support are identically zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Kernel {
    source: SpaceRef,
    target: SpaceRef,
    rows: Vec<RationalMeasure>,
    support: Vec<usize>,
    null_condition: bool,
}

impl Kernel {
    pub fn source(&self) -> &SpaceRef {
        &self.source
    }

    pub fn target(&self) -> &SpaceRef {
        &self.target
    }

    pub fn rows(&self) -> &[RationalMeasure] {
        &self.rows
    }

    pub fn row(&self, outcome: usize) -> &RationalMeasure {
        &self.rows[outcome]
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn in_support(&self, outcome: usize) -> bool {
        self.support.binary_search(&outcome).is_ok()
    }

    pub fn null_condition(&self) -> bool {
        self.null_condition
    }

    /// True when every supported row is a probability measure, as a
    /// conditional law of a random object must be.
    pub fn is_markov_on_support(&self) -> bool {
        use num::One;
        self.support.iter().all(|&x| self.rows[x].total().is_one())
    }

    /// Row-by-row equality on the given outcomes.
    pub fn rows_eq_on(&self, other: &Kernel, outcomes: &[usize]) -> bool {
        self.target == other.target
            && outcomes
                .iter()
                .all(|&x| self.rows[x].weights() == other.rows[x].weights())
    }

    /// Row-by-row equality on this kernel's support.
    pub fn ae_eq(&self, other: &Kernel) -> bool {
        self.source == other.source && self.rows_eq_on(other, &self.support)
    }

    /// Integrates the rows against a weighting of the source:
    /// the measure A ↦ Σ_x w(x)·row_x(A) on the target.
    pub fn integrate(&self, weights: &RationalMeasure) -> Result<RationalMeasure> {
        require_same_space(&self.source, weights.space(), "kernel integration")?;
        let mut out = vec![Rat::zero(); self.target.size()];
        for x in weights.support() {
            let w = weights.weight(x);
            for (z, rw) in self.rows[x].weights().iter().enumerate() {
                if !rw.is_zero() {
                    out[z] += w * rw;
                }
            }
        }
        RationalMeasure::new(self.target.clone(), out, MeasureKind::Finite)
    }

    fn zero(source: SpaceRef, target: SpaceRef, null: bool) -> Kernel {
        let rows = vec![RationalMeasure::zero(target.clone()); source.size()];
        Kernel {
            source,
            target,
            rows,
            support: Vec::new(),
            null_condition: null,
        }
    }

    /// Assembles a kernel from raw parts. Crate-internal: other routes to
    /// kernels (densities, generators) build rows themselves.
    pub(crate) fn assemble(
        source: SpaceRef,
        target: SpaceRef,
        rows: Vec<RationalMeasure>,
        mut support: Vec<usize>,
        null_condition: bool,
    ) -> Kernel {
        debug_assert_eq!(rows.len(), source.size());
        debug_assert!(rows.iter().all(|r| *r.space() == target));
        support.sort_unstable();
        Kernel {
            source,
            target,
            rows,
            support,
            null_condition,
        }
    }
}

/// The conditional probability of the target constraints given a random
/// object and condition constraints, as a function of the object's value.
///
/// At each block B of the conditioning field with positive reference mass:
/// value = P(targets ∩ conditions ∩ given⁻¹B) / P(conditions ∩ given⁻¹B).
/// The defining property then holds exactly: integrating the values over
/// any field event A against the reference recovers
/// P(targets, conditions, given ∈ A). A null condition yields the zero
/// conditional with the flag set.
pub fn cond_prob_pointwise(
    p: &RationalMeasure,
    given: &RandomObject,
    targets: &[Constraint],
    conditions: &[Constraint],
) -> Result<PointwiseConditional> {
    require_same_space(p.space(), given.domain(), "conditioning object")?;
    let cond_event = pullback_all(p, conditions)?;
    let reference = cooc_measure(p, given, conditions)?;
    if p.of(&cond_event)?.is_zero() {
        return Ok(PointwiseConditional {
            source: given.codomain().clone(),
            values: vec![Rat::zero(); given.codomain().size()],
            reference,
            null_condition: true,
        });
    }
    let joint_event = pullback_all(p, targets)?.intersect(&cond_event)?;
    let mut values = vec![Rat::zero(); given.codomain().size()];
    for block in given.codomain_field().blocks() {
        let denom: Rat = block.iter().map(|&x| reference.weight(x).clone()).sum();
        if denom.is_zero() {
            continue;
        }
        let num: Rat = joint_event
            .members()
            .filter(|&o| block.contains(&given.apply(o)))
            .map(|o| p.weight(o).clone())
            .sum();
        let v = num / denom;
        for &x in block {
            values[x] = v.clone();
        }
    }
    Ok(PointwiseConditional {
        source: given.codomain().clone(),
        values,
        reference,
        null_condition: false,
    })
}

/// The conditional co-occurrence kernel of `subject` (with fixed target
/// constraints) given `given` (with condition constraints).
///
/// On each supported block B: row(A) = P(subject ∈ A, targets, conditions,
/// given ∈ B) / P(conditions, given ∈ B). The kernel satisfies its defining
/// integral equation exactly on all field events of both sides (checked on
/// blocks and extended by additivity), and supported rows are probability
/// measures exactly when the target constraints are vacuous. A null
/// condition yields the zero kernel with the flag set.
pub fn cond_kernel(
    p: &RationalMeasure,
    given: &RandomObject,
    subject: &RandomObject,
    conditions: &[Constraint],
    target_conditions: &[Constraint],
) -> Result<Kernel> {
    require_same_space(p.space(), given.domain(), "conditioning object")?;
    require_same_space(p.space(), subject.domain(), "kernel subject")?;
    let cond_event = pullback_all(p, conditions)?;
    let reference = cooc_measure(p, given, conditions)?;
    let source = given.codomain().clone();
    let target = subject.codomain().clone();
    if p.of(&cond_event)?.is_zero() {
        return Ok(Kernel::zero(source, target, true));
    }
    let restricted = pullback_all(p, target_conditions)?.intersect(&cond_event)?;
    let mut rows = vec![RationalMeasure::zero(target.clone()); source.size()];
    let mut support = Vec::new();
    for block in given.codomain_field().blocks() {
        let denom: Rat = block.iter().map(|&x| reference.weight(x).clone()).sum();
        if denom.is_zero() {
            continue;
        }
        let mut weights = vec![Rat::zero(); target.size()];
        for o in restricted.members() {
            if block.contains(&given.apply(o)) {
                let w = p.weight(o);
                if !w.is_zero() {
                    weights[subject.apply(o)] += w;
                }
            }
        }
        for w in weights.iter_mut() {
            *w /= denom.clone();
        }
        let row = RationalMeasure::new(target.clone(), weights, MeasureKind::Finite)?;
        for &x in block {
            rows[x] = row.clone();
            support.push(x);
        }
    }
    support.sort_unstable();
    Ok(Kernel {
        source,
        target,
        rows,
        support,
        null_condition: false,
    })
}

/// Restricts a joint-target kernel by fixing one coordinate of its product
/// target to an event: row'(A) = row(A × event), summed out of the full
/// product. Returns the reduced product space alongside the kernel.
pub fn kernel_fix_target(
    k: &Kernel,
    target_product: &ProductSpace,
    index: usize,
    event: &Event,
) -> Result<(ProductSpace, Kernel)> {
    require_same_space(k.target(), target_product.space(), "kernel target product")?;
    let pos = target_product
        .index_set()
        .position(index)
        .ok_or(Error::CoordinateMismatch(format!(
            "index {index} not a coordinate of the target"
        )))?;
    require_same_space(
        event.space(),
        &target_product.factors()[pos],
        "fixed-coordinate event",
    )?;
    let remaining = target_product
        .index_set()
        .difference(&crate::space::IndexSet::new([index])?);
    if remaining.is_empty() {
        return Err(Error::CoordinateMismatch(
            "cannot fix the only coordinate of a kernel target".into(),
        ));
    }
    let factors: Vec<SpaceRef> = remaining
        .iter()
        .map(|i| target_product.factor(i).unwrap().clone())
        .collect();
    let reduced = ProductSpace::new(remaining.clone(), factors)?;
    let mut rows = Vec::with_capacity(k.rows().len());
    for row in k.rows() {
        let mut weights = vec![Rat::zero(); reduced.len()];
        for point in 0..target_product.len() {
            let w = row.weight(point);
            if w.is_zero() {
                continue;
            }
            let coords = target_product.coords(point);
            if !event.contains(coords[pos]) {
                continue;
            }
            let kept: Vec<usize> = coords
                .iter()
                .enumerate()
                .filter(|(c, _)| *c != pos)
                .map(|(_, &v)| v)
                .collect();
            weights[reduced.point(&kept)] += w;
        }
        rows.push(RationalMeasure::new(
            reduced.space().clone(),
            weights,
            MeasureKind::Finite,
        )?);
    }
    let kernel = Kernel {
        source: k.source().clone(),
        target: reduced.space().clone(),
        rows,
        support: k.support().to_vec(),
        null_condition: k.null_condition(),
    };
    Ok((reduced, kernel))
}

/// Moves a fixed target constraint into the conditioning side by pointwise
/// division: row'(x) = row(x) / divisor(x) where the divisor is positive,
/// and the zero row elsewhere. Multiplying back by the divisor recovers the
/// input exactly on the divisor's positivity set.
pub fn bayes_shift(k: &Kernel, divisor: &PointwiseConditional) -> Result<Kernel> {
    require_same_space(k.source(), divisor.source(), "shift divisor")?;
    let mut rows = Vec::with_capacity(k.rows().len());
    let mut support = Vec::new();
    for x in 0..k.source().size() {
        let d = divisor.value(x);
        if d.is_zero() || !k.in_support(x) {
            rows.push(RationalMeasure::zero(k.target().clone()));
        } else {
            let inv = Rat::new(1.into(), 1.into()) / d.clone();
            rows.push(k.row(x).scaled(&inv));
            support.push(x);
        }
    }
    Ok(Kernel {
        source: k.source().clone(),
        target: k.target().clone(),
        rows,
        support,
        null_condition: k.null_condition() || divisor.null_condition(),
    })
}

/// Rebuilds the joint measure from a kernel and a marginal on its source:
/// weight(x, z) = marginal(x) · row_x({z}) on the pair product
/// (source-major enumeration). Marginalizing the result over the target
/// recovers the row totals weighted by the marginal.
pub fn joint_from_kernel(
    k: &Kernel,
    marginal: &RationalMeasure,
) -> Result<(ProductSpace, RationalMeasure)> {
    require_same_space(k.source(), marginal.space(), "kernel marginal")?;
    let product = ProductSpace::pair(k.source().clone(), k.target().clone())?;
    let mut weights = vec![Rat::zero(); product.len()];
    for x in marginal.support() {
        let w = marginal.weight(x);
        for (z, rw) in k.row(x).weights().iter().enumerate() {
            if !rw.is_zero() {
                weights[product.point(&[x, z])] = w * rw;
            }
        }
    }
    let joint = RationalMeasure::new(product.space().clone(), weights, MeasureKind::Finite)?;
    Ok((product, joint))
}

/// The product kernel into the pair of the two targets:
/// row(x)(A × B) = left(x)(A) · right(x)(B). Defined on the intersection of
/// the supports; rows elsewhere are zero.
pub fn kernel_product(left: &Kernel, right: &Kernel) -> Result<(ProductSpace, Kernel)> {
    require_same_space(left.source(), right.source(), "kernel product source")?;
    let product = ProductSpace::pair(left.target().clone(), right.target().clone())?;
    let mut rows = Vec::with_capacity(left.rows().len());
    let mut support = Vec::new();
    for x in 0..left.source().size() {
        if left.in_support(x) && right.in_support(x) {
            let mut weights = vec![Rat::zero(); product.len()];
            for (u, lw) in left.row(x).weights().iter().enumerate() {
                if lw.is_zero() {
                    continue;
                }
                for (v, rw) in right.row(x).weights().iter().enumerate() {
                    if !rw.is_zero() {
                        weights[product.point(&[u, v])] = lw * rw;
                    }
                }
            }
            rows.push(RationalMeasure::new(
                product.space().clone(),
                weights,
                MeasureKind::Finite,
            )?);
            support.push(x);
        } else {
            rows.push(RationalMeasure::zero(product.space().clone()));
        }
    }
    let kernel = Kernel {
        source: left.source().clone(),
        target: product.space().clone(),
        rows,
        support,
        null_condition: left.null_condition() || right.null_condition(),
    };
    Ok((product, kernel))
}

/// Verdict of a conditional-independence check. `vacuous` is set when the
/// conditioning mass was zero: the notion is undefined there, and the check
/// reports true so that enumeration loops stay total.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CiVerdict {
    pub holds: bool,
    pub vacuous: bool,
}

/// The six shapes of conditional independence over one base measure. Each
/// pattern states that a product identity holds exactly between conditional
/// co-occurrence quantities; `check_cond_independence` evaluates both sides.
#[derive(Debug, Clone)]
pub enum IndependencePattern {
    /// Event vs event, given an event.
    EventEvent {
        left: Constraint,
        right: Constraint,
        given: Constraint,
    },
    /// Measure of `subject` carrying `with`, vs an event, given an event.
    MeasureEvent {
        subject: RandomObject,
        with: Constraint,
        event: Constraint,
        given: Constraint,
    },
    /// Two subject measures with residual constraints, given an event;
    /// compared as a product measure on the paired codomains.
    MeasureMeasure {
        left: (RandomObject, Constraint),
        right: (RandomObject, Constraint),
        given: Constraint,
    },
    /// Event vs event, given a random object and an event.
    EventEventGivenObject {
        left: Constraint,
        right: Constraint,
        given: RandomObject,
        given_event: Constraint,
    },
    /// Kernel of `subject` carrying `with`, vs an event, given an object
    /// and an event.
    MeasureEventGivenObject {
        subject: RandomObject,
        with: Constraint,
        event: Constraint,
        given: RandomObject,
        given_event: Constraint,
    },
    /// Two kernels with residual constraints, given an object and an event;
    /// compared as a product kernel row by row.
    MeasureMeasureGivenObject {
        left: (RandomObject, Constraint),
        right: (RandomObject, Constraint),
        given: RandomObject,
        given_event: Constraint,
    },
}

/// Evaluates the defining product identity of the chosen pattern exactly.
/// For measure-valued patterns equality is checked on every point of the
/// product, which by additivity settles every rectangle and hence every
/// event. Zero conditioning mass yields a vacuous true.
pub fn check_cond_independence(
    p: &RationalMeasure,
    pattern: &IndependencePattern,
) -> Result<CiVerdict> {
    use crate::cooccurrence::{cond_cooc_measure, cond_prob_objects};
    match pattern {
        IndependencePattern::EventEvent { left, right, given } => {
            let mass = p.of(&given.pullback()?)?;
            if mass.is_zero() {
                return Ok(CiVerdict {
                    holds: true,
                    vacuous: true,
                });
            }
            let joint =
                cond_prob_objects(p, &[left.clone(), right.clone()], std::slice::from_ref(given))?.value;
            let l = cond_prob_objects(p, std::slice::from_ref(left), std::slice::from_ref(given))?.value;
            let r = cond_prob_objects(p, std::slice::from_ref(right), std::slice::from_ref(given))?.value;
            Ok(CiVerdict {
                holds: joint == l * r,
                vacuous: false,
            })
        }
        IndependencePattern::MeasureEvent {
            subject,
            with,
            event,
            given,
        } => {
            let mass = p.of(&given.pullback()?)?;
            if mass.is_zero() {
                return Ok(CiVerdict {
                    holds: true,
                    vacuous: true,
                });
            }
            let lhs = cond_cooc_measure(
                p,
                subject,
                &[with.clone(), event.clone()],
                std::slice::from_ref(given),
            )?
            .value;
            let scalar = cond_prob_objects(p, std::slice::from_ref(event), std::slice::from_ref(given))?.value;
            let base = cond_cooc_measure(p, subject, std::slice::from_ref(with), std::slice::from_ref(given))?.value;
            Ok(CiVerdict {
                holds: lhs.weights() == base.scaled(&scalar).weights(),
                vacuous: false,
            })
        }
        IndependencePattern::MeasureMeasure { left, right, given } => {
            let mass = p.of(&given.pullback()?)?;
            if mass.is_zero() {
                return Ok(CiVerdict {
                    holds: true,
                    vacuous: true,
                });
            }
            let (joint_obj, product) = pair_bundle(&left.0, &right.0)?;
            let lhs = cond_cooc_measure(
                p,
                &joint_obj,
                &[left.1.clone(), right.1.clone()],
                std::slice::from_ref(given),
            )?
            .value;
            let lm = cond_cooc_measure(p, &left.0, std::slice::from_ref(&left.1), std::slice::from_ref(given))?.value;
            let rm = cond_cooc_measure(p, &right.0, std::slice::from_ref(&right.1), std::slice::from_ref(given))?.value;
            let holds = (0..product.len()).all(|pt| {
                let c = product.coords(pt);
                *lhs.weight(pt) == lm.weight(c[0]) * rm.weight(c[1])
            });
            Ok(CiVerdict {
                holds,
                vacuous: false,
            })
        }
        IndependencePattern::EventEventGivenObject {
            left,
            right,
            given,
            given_event,
        } => {
            let mass = p.of(&given_event.pullback()?)?;
            if mass.is_zero() {
                return Ok(CiVerdict {
                    holds: true,
                    vacuous: true,
                });
            }
            let both = cond_prob_pointwise(
                p,
                given,
                &[left.clone(), right.clone()],
                std::slice::from_ref(given_event),
            )?;
            let l = cond_prob_pointwise(p, given, std::slice::from_ref(left), std::slice::from_ref(given_event))?;
            let r = cond_prob_pointwise(p, given, std::slice::from_ref(right), std::slice::from_ref(given_event))?;
            let holds = both
                .reference()
                .support()
                .into_iter()
                .all(|x| *both.value(x) == l.value(x) * r.value(x));
            Ok(CiVerdict {
                holds,
                vacuous: false,
            })
        }
        IndependencePattern::MeasureEventGivenObject {
            subject,
            with,
            event,
            given,
            given_event,
        } => {
            let mass = p.of(&given_event.pullback()?)?;
            if mass.is_zero() {
                return Ok(CiVerdict {
                    holds: true,
                    vacuous: true,
                });
            }
            let lhs = cond_kernel(
                p,
                given,
                subject,
                std::slice::from_ref(given_event),
                &[with.clone(), event.clone()],
            )?;
            let scalar = cond_prob_pointwise(p, given, std::slice::from_ref(event), std::slice::from_ref(given_event))?;
            let base = cond_kernel(p, given, subject, std::slice::from_ref(given_event), std::slice::from_ref(with))?;
            let holds = lhs.support().iter().all(|&x| {
                lhs.row(x).weights() == base.row(x).scaled(scalar.value(x)).weights()
            });
            Ok(CiVerdict {
                holds,
                vacuous: false,
            })
        }
        IndependencePattern::MeasureMeasureGivenObject {
            left,
            right,
            given,
            given_event,
        } => {
            let mass = p.of(&given_event.pullback()?)?;
            if mass.is_zero() {
                return Ok(CiVerdict {
                    holds: true,
                    vacuous: true,
                });
            }
            let (joint_obj, product) = pair_bundle(&left.0, &right.0)?;
            let lhs = cond_kernel(
                p,
                given,
                &joint_obj,
                std::slice::from_ref(given_event),
                &[left.1.clone(), right.1.clone()],
            )?;
            let lk = cond_kernel(p, given, &left.0, std::slice::from_ref(given_event), std::slice::from_ref(&left.1))?;
            let rk = cond_kernel(p, given, &right.0, std::slice::from_ref(given_event), std::slice::from_ref(&right.1))?;
            let (rhs_product, rhs) = kernel_product(&lk, &rk)?;
            debug_assert_eq!(rhs_product.len(), product.len());
            let holds = lhs
                .support()
                .iter()
                .all(|&x| lhs.row(x).weights() == rhs.row(x).weights());
            Ok(CiVerdict {
                holds,
                vacuous: false,
            })
        }
    }
}

/// Bundles two objects under synthetic indices 0 and 1 (left-major).
pub fn pair_bundle(
    left: &RandomObject,
    right: &RandomObject,
) -> Result<(RandomObject, ProductSpace)> {
    let mut objects = std::collections::BTreeMap::new();
    objects.insert(0usize, left.clone());
    objects.insert(1usize, right.clone());
    bundle(&objects, &crate::space::IndexSet::new([0, 1])?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::space::{FiniteSpace, Partition};

    fn space(n: usize) -> SpaceRef {
        FiniteSpace::unlabeled(n).unwrap()
    }

    fn ev(s: &SpaceRef, members: &[usize]) -> Event {
        Event::new(s.clone(), members.iter().copied()).unwrap()
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

    #[test]
    fn pointwise_conditional_of_high_given_identity() {
        let m = m0();
        let id = RandomObject::identity(m.omega.clone());
        let hi = Constraint::new(m.high.clone(), ev(m.high.codomain(), &[1])).unwrap();
        let pc = cond_prob_pointwise(&m.p, &id, &[hi], &[]).unwrap();
        assert_eq!(pc.values(), &[int(0), int(0), int(1), int(1)]);
        assert!(!pc.null_condition());
    }

    #[test]
    fn full_target_is_one_on_support() {
        let m = m0();
        let full = Constraint::new(m.high.clone(), Event::full(m.high.codomain().clone())).unwrap();
        let pc = cond_prob_pointwise(&m.p, &m.parity, &[full], &[]).unwrap();
        for x in pc.reference().support() {
            assert_eq!(pc.value(x), &int(1));
        }
    }

    #[test]
    fn monotone_in_the_target_event() {
        let m = m0();
        let small = Constraint::new(m.high.clone(), ev(m.high.codomain(), &[1])).unwrap();
        let large =
            Constraint::new(m.high.clone(), Event::full(m.high.codomain().clone())).unwrap();
        let a = cond_prob_pointwise(&m.p, &m.parity, &[small], &[]).unwrap();
        let b = cond_prob_pointwise(&m.p, &m.parity, &[large], &[]).unwrap();
        for x in a.reference().support() {
            assert!(a.value(x) <= b.value(x));
        }
    }

    #[test]
    fn self_kernel_is_the_indicator() {
        let m = m0();
        let k = cond_kernel(&m.p, &m.parity, &m.parity, &[], &[]).unwrap();
        for &x in k.support() {
            for z in 0..2 {
                let expect = if z == x { int(1) } else { int(0) };
                assert_eq!(k.row(x).weight(z), &expect);
            }
        }
    }

    #[test]
    fn independent_kernel_rows_equal_the_law() {
        let m = m0();
        let k = cond_kernel(&m.p, &m.parity, &m.high, &[], &[]).unwrap();
        for &x in k.support() {
            assert_eq!(k.row(x).weights(), &[ratio(1, 2), ratio(1, 2)]);
        }
        assert!(k.is_markov_on_support());
    }

    #[test]
    fn null_condition_gives_zero_kernel_with_flag() {
        let m = m0();
        let none =
            Constraint::new(m.high.clone(), Event::empty(m.high.codomain().clone())).unwrap();
        let k = cond_kernel(&m.p, &m.parity, &m.high, &[none], &[]).unwrap();
        assert!(k.null_condition());
        assert!(k.support().is_empty());
        assert!(k.rows().iter().all(|r| r.is_zero()));
    }

    #[test]
    fn coarse_conditioning_is_block_constant() {
        let m = m0();
        let id = RandomObject::identity(m.omega.clone());
        let halves = Partition::new(m.omega.clone(), vec![vec![0, 1], vec![2, 3]]).unwrap();
        let coarse = id.coarsen(halves).unwrap();
        let hi = Constraint::new(m.high.clone(), ev(m.high.codomain(), &[1])).unwrap();
        let pc = cond_prob_pointwise(&m.p, &coarse, &[hi], &[]).unwrap();
        assert_eq!(pc.value(0), pc.value(1));
        assert_eq!(pc.value(2), pc.value(3));
        assert_eq!(pc.value(0), &int(0));
        assert_eq!(pc.value(2), &int(1));
    }

    #[test]
    fn fix_target_marginalizes_or_zeroes() {
        let m = m0();
        let (pair, product) = pair_bundle(&m.parity, &m.high).unwrap();
        let id = RandomObject::identity(m.omega.clone());
        let k = cond_kernel(&m.p, &id, &pair, &[], &[]).unwrap();
        // fixing the second coordinate to its full space gives the marginal kernel
        let full = Event::full(m.high.codomain().clone());
        let (_, marginal) = kernel_fix_target(&k, &product, 1, &full).unwrap();
        let direct = cond_kernel(&m.p, &id, &m.parity, &[], &[]).unwrap();
        for &x in marginal.support() {
            assert_eq!(marginal.row(x).weights(), direct.row(x).weights());
        }
        // fixing to the empty event zeroes every row
        let none = Event::empty(m.high.codomain().clone());
        let (_, zeroed) = kernel_fix_target(&k, &product, 1, &none).unwrap();
        assert!(zeroed.rows().iter().all(|r| r.is_zero()));
        // fixing to {hi}: rows become indicator(x in {2,3}) times a point mass at parity(x)
        let hi = ev(m.high.codomain(), &[1]);
        let (_, fixed) = kernel_fix_target(&k, &product, 1, &hi).unwrap();
        for x in 0..4 {
            let expect_mass = if x >= 2 { int(1) } else { int(0) };
            assert_eq!(fixed.row(x).total(), expect_mass);
            if x >= 2 {
                assert_eq!(fixed.row(x).weight(m.parity.apply(x)), &int(1));
            }
        }
    }

    #[test]
    fn fix_target_rejects_alien_coordinates() {
        let m = m0();
        let (pair, product) = pair_bundle(&m.parity, &m.high).unwrap();
        let id = RandomObject::identity(m.omega.clone());
        let k = cond_kernel(&m.p, &id, &pair, &[], &[]).unwrap();
        // an index outside the product
        let err = kernel_fix_target(&k, &product, 7, &Event::full(m.high.codomain().clone()))
            .unwrap_err();
        assert!(matches!(err, Error::CoordinateMismatch(_)));
        // an event on the wrong factor space
        let err = kernel_fix_target(&k, &product, 1, &Event::full(space(3))).unwrap_err();
        assert!(matches!(err, Error::SpaceMismatch(_)));
        // a product that is not this kernel's target
        let other = crate::space::ProductSpace::pair(space(3), space(3)).unwrap();
        let err = kernel_fix_target(&k, &other, 0, &Event::full(space(3))).unwrap_err();
        assert!(matches!(err, Error::SpaceMismatch(_)));
    }

    #[test]
    fn bayes_shift_round_trip() {
        let m = m0();
        let hi = Constraint::new(m.high.clone(), ev(m.high.codomain(), &[1])).unwrap();
        let joint = cond_kernel(&m.p, &m.parity, &m.high, &[], &[hi.clone()]).unwrap();
        let p3 = cond_prob_pointwise(&m.p, &m.parity, &[hi.clone()], &[]).unwrap();
        let shifted = bayes_shift(&joint, &p3).unwrap();
        // dividing by P[high ∈ {hi} | parity] = 1/2 doubles the weights
        for &x in shifted.support() {
            assert_eq!(
                shifted.row(x).weights(),
                joint.row(x).scaled(&int(2)).weights()
            );
        }
        // and multiplying back recovers the joint on the positivity set
        for &x in shifted.support() {
            assert_eq!(
                shifted.row(x).scaled(p3.value(x)).weights(),
                joint.row(x).weights()
            );
        }
        // divisor one is the identity
        let full = Constraint::new(m.high.clone(), Event::full(m.high.codomain().clone())).unwrap();
        let one = cond_prob_pointwise(&m.p, &m.parity, &[full], &[]).unwrap();
        let same = bayes_shift(&joint, &one).unwrap();
        assert!(same.ae_eq(&joint));
    }

    #[test]
    fn joint_from_kernel_recovers_the_joint_law() {
        let m = m0();
        let k = cond_kernel(&m.p, &m.parity, &m.high, &[], &[]).unwrap();
        let marginal = crate::object::pushforward(&m.p, &m.parity).unwrap();
        let (product, joint) = joint_from_kernel(&k, &marginal).unwrap();
        let (pair, _) = pair_bundle(&m.parity, &m.high).unwrap();
        let direct = crate::object::pushforward(&m.p, &pair).unwrap();
        assert_eq!(joint.weights(), direct.weights());
        assert_eq!(joint.total(), int(1));
        assert_eq!(product.len(), 4);
        // zero marginal gives the zero joint
        let zero = RationalMeasure::zero(m.parity.codomain().clone());
        let (_, z) = joint_from_kernel(&k, &zero).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn kernel_product_cases() {
        let m = m0();
        let id = RandomObject::identity(m.omega.clone());
        let k1 = cond_kernel(&m.p, &id, &m.parity, &[], &[]).unwrap();
        let k2 = cond_kernel(&m.p, &id, &m.high, &[], &[]).unwrap();
        let (product, k) = kernel_product(&k1, &k2).unwrap();
        // given a point of the base, parity and high are deterministic,
        // so the product rows match the joint kernel rows exactly
        let (pair, _) = pair_bundle(&m.parity, &m.high).unwrap();
        let joint = cond_kernel(&m.p, &id, &pair, &[], &[]).unwrap();
        for &x in k.support() {
            assert_eq!(k.row(x).weights(), joint.row(x).weights());
        }
        // the rectangle formula holds on every point
        for &x in k.support() {
            for u in 0..2 {
                for v in 0..2 {
                    let pt = product.point(&[u, v]);
                    assert_eq!(
                        k.row(x).weight(pt),
                        &(k1.row(x).weight(u) * k2.row(x).weight(v))
                    );
                }
            }
        }
    }

    #[test]
    fn kernel_times_fixed_measure() {
        // all right-factor rows equal to one fixed measure: K x mu
        let m = m0();
        let k1 = cond_kernel(&m.p, &m.parity, &m.high, &[], &[]).unwrap();
        let mu = crate::object::pushforward(&m.p, &m.parity).unwrap();
        let constant = Kernel {
            source: m.parity.codomain().clone(),
            target: mu.space().clone(),
            rows: vec![mu.clone(); 2],
            support: vec![0, 1],
            null_condition: false,
        };
        let (product, k) = kernel_product(&k1, &constant).unwrap();
        for &x in k.support() {
            for u in 0..2 {
                for v in 0..2 {
                    let pt = product.point(&[u, v]);
                    assert_eq!(k.row(x).weight(pt), &(k1.row(x).weight(u) * mu.weight(v)));
                }
            }
        }
        // a point-mass left factor transports the right rows
        let delta_rows: Vec<RationalMeasure> = (0..2)
            .map(|x| RationalMeasure::point_mass(m.parity.codomain().clone(), x).unwrap())
            .map(|pm| pm.with_kind(MeasureKind::Finite).unwrap())
            .collect();
        let delta = Kernel {
            source: m.parity.codomain().clone(),
            target: m.parity.codomain().clone(),
            rows: delta_rows,
            support: vec![0, 1],
            null_condition: false,
        };
        let (product, k) = kernel_product(&delta, &k1).unwrap();
        for &x in k.support() {
            for u in 0..2 {
                for v in 0..2 {
                    let pt = product.point(&[u, v]);
                    let expect = if u == x {
                        k1.row(x).weight(v).clone()
                    } else {
                        int(0)
                    };
                    assert_eq!(k.row(x).weight(pt), &expect);
                }
            }
        }
    }

    #[test]
    fn independence_pattern_event_event() {
        let m = m0();
        let id = RandomObject::identity(m.omega.clone());
        let e = Constraint::new(m.parity.clone(), ev(m.parity.codomain(), &[0])).unwrap();
        let hi = Constraint::new(m.high.clone(), ev(m.high.codomain(), &[1])).unwrap();
        let sure = Constraint::new(id.clone(), Event::full(m.omega.clone())).unwrap();
        let verdict = check_cond_independence(
            &m.p,
            &IndependencePattern::EventEvent {
                left: e.clone(),
                right: hi.clone(),
                given: sure.clone(),
            },
        )
        .unwrap();
        assert!(verdict.holds && !verdict.vacuous);
        // identity determines parity: dependent
        let odd_pts = Constraint::new(id.clone(), ev(&m.omega, &[1, 3])).unwrap();
        let verdict = check_cond_independence(
            &m.p,
            &IndependencePattern::EventEvent {
                left: e,
                right: odd_pts,
                given: sure.clone(),
            },
        )
        .unwrap();
        assert!(!verdict.holds);
        // a constant object is independent of everything
        let c = RandomObject::constant(m.omega.clone(), space(2), 0).unwrap();
        let always = Constraint::new(c, ev(&space(2), &[0])).unwrap();
        let hi2 = Constraint::new(m.high.clone(), ev(m.high.codomain(), &[1])).unwrap();
        let verdict = check_cond_independence(
            &m.p,
            &IndependencePattern::EventEvent {
                left: always,
                right: hi2,
                given: sure,
            },
        )
        .unwrap();
        assert!(verdict.holds);
    }

    #[test]
    fn vacuous_conditioning_is_flagged_true() {
        let m = m0();
        let id = RandomObject::identity(m.omega.clone());
        let e = Constraint::new(m.parity.clone(), ev(m.parity.codomain(), &[0])).unwrap();
        let hi = Constraint::new(m.high.clone(), ev(m.high.codomain(), &[1])).unwrap();
        let nothing = Constraint::new(id, Event::empty(m.omega.clone())).unwrap();
        let verdict = check_cond_independence(
            &m.p,
            &IndependencePattern::EventEvent {
                left: e,
                right: hi,
                given: nothing,
            },
        )
        .unwrap();
        assert!(verdict.holds && verdict.vacuous);
    }
}
