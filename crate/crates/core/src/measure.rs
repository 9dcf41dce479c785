//! Exact rational measures on finite spaces.

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rat;
use crate::space::{require_same_space, Event, SpaceRef};

/// What a measure claims to be. `Probability` must have total mass exactly
/// one; `Finite` is any nonnegative measure (sub-probabilities included);
/// `Base` marks reference measures for densities, where zero weights and
/// zero total are meaningful.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    Probability,
    Finite,
    Base,
}

impl MeasureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MeasureKind::Probability => "probability",
            MeasureKind::Finite => "finite",
            MeasureKind::Base => "base",
        }
    }

    pub fn parse(s: &str) -> Result<MeasureKind> {
        match s {
            "probability" => Ok(MeasureKind::Probability),
            "finite" => Ok(MeasureKind::Finite),
            "base" => Ok(MeasureKind::Base),
            other => Err(Error::InvalidMeasure(format!("unknown kind {other:?}"))),
        }
    }
}

/// One exact nonnegative rational weight per outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMeasure {
    space: SpaceRef,
    weights: Vec<Rat>,
    kind: MeasureKind,
}

impl RationalMeasure {
    pub fn new(space: SpaceRef, weights: Vec<Rat>, kind: MeasureKind) -> Result<RationalMeasure> {
        if weights.len() != space.size() {
            return Err(Error::InvalidMeasure(format!(
                "expected {} weights, got {}",
                space.size(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::InvalidMeasure("negative weight".into()));
        }
        if kind == MeasureKind::Probability {
            let total: Rat = weights.iter().sum();
            if !total.is_one() {
                return Err(Error::InvalidMeasure(format!(
                    "probability weights sum to {total}, not 1"
                )));
            }
        }
        Ok(RationalMeasure {
            space,
            weights,
            kind,
        })
    }

    /// The uniform probability measure.
    pub fn uniform(space: SpaceRef) -> RationalMeasure {
        let n = space.size();
        let w = Rat::new(1.into(), (n as i64).into());
        RationalMeasure {
            weights: vec![w; n],
            space,
            kind: MeasureKind::Probability,
        }
    }

    /// Point mass at one outcome.
    pub fn point_mass(space: SpaceRef, outcome: usize) -> Result<RationalMeasure> {
        if outcome >= space.size() {
            return Err(Error::EventOutOfRange {
                member: outcome,
                size: space.size(),
            });
        }
        let mut weights = vec![Rat::zero(); space.size()];
        weights[outcome] = Rat::one();
        Ok(RationalMeasure {
            space,
            weights,
            kind: MeasureKind::Probability,
        })
    }

    /// The zero measure (kind `Finite`).
    pub fn zero(space: SpaceRef) -> RationalMeasure {
        RationalMeasure {
            weights: vec![Rat::zero(); space.size()],
            space,
            kind: MeasureKind::Finite,
        }
    }

    /// Counting measure: weight one everywhere (kind `Base`).
    pub fn counting(space: SpaceRef) -> RationalMeasure {
        RationalMeasure {
            weights: vec![Rat::one(); space.size()],
            space,
            kind: MeasureKind::Base,
        }
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    pub fn weight(&self, outcome: usize) -> &Rat {
        &self.weights[outcome]
    }

    pub fn total(&self) -> Rat {
        self.weights.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|w| w.is_zero())
    }

    /// Mass of an event.
    pub fn of(&self, event: &Event) -> Result<Rat> {
        require_same_space(&self.space, event.space(), "measure applied to foreign event")?;
        Ok(event.members().map(|o| self.weights[o].clone()).sum())
    }

    /// Outcomes with positive mass.
    pub fn support(&self) -> Vec<usize> {
        self.space
            .outcomes()
            .filter(|&o| self.weights[o].is_positive())
            .collect()
    }

    /// Pointwise scaling by a nonnegative factor.
    pub fn scaled(&self, factor: &Rat) -> RationalMeasure {
        debug_assert!(!factor.is_negative(), "measures stay nonnegative");
        RationalMeasure {
            space: self.space.clone(),
            weights: self.weights.iter().map(|w| w * factor).collect(),
            kind: MeasureKind::Finite,
        }
    }

    /// Reinterprets the weights under another kind, revalidating.
    pub fn with_kind(&self, kind: MeasureKind) -> Result<RationalMeasure> {
        RationalMeasure::new(self.space.clone(), self.weights.clone(), kind)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::space::FiniteSpace;

    fn space(n: usize) -> SpaceRef {
        FiniteSpace::unlabeled(n).unwrap()
    }

    #[test]
    fn probability_must_sum_to_one() {
        let s = space(2);
        let bad = RationalMeasure::new(
            s.clone(),
            vec![ratio(1, 2), ratio(1, 3)],
            MeasureKind::Probability,
        );
        assert!(bad.is_err());
        let ok = RationalMeasure::new(
            s.clone(),
            vec![ratio(1, 3), ratio(2, 3)],
            MeasureKind::Probability,
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn base_measures_admit_zero_total() {
        let s = space(2);
        let zeroes = RationalMeasure::new(s, vec![int(0), int(0)], MeasureKind::Base).unwrap();
        assert!(zeroes.is_zero());
    }

    #[test]
    fn negative_weights_rejected() {
        let s = space(1);
        assert!(RationalMeasure::new(s, vec![int(-1)], MeasureKind::Finite).is_err());
    }

    #[test]
    fn event_mass() {
        let s = space(4);
        let m = RationalMeasure::uniform(s.clone());
        let e = Event::new(s.clone(), [0, 2]).unwrap();
        assert_eq!(m.of(&e).unwrap(), ratio(1, 2));
        assert_eq!(m.of(&Event::full(s.clone())).unwrap(), int(1));
        assert_eq!(m.of(&Event::empty(s)).unwrap(), int(0));
    }

    #[test]
    fn foreign_event_rejected() {
        let m = RationalMeasure::uniform(space(4));
        let e = Event::full(space(3));
        assert!(matches!(m.of(&e).unwrap_err(), Error::SpaceMismatch(_)));
    }
}
