//! Exact engine for finite measure-theoretic probability.
//!
//! Everything here runs over finite sample spaces with arbitrary-precision
//! rational weights, so probabilistic identities that hold "almost
//! everywhere" in general measure theory become decidable, exactly checkable
//! assertions. The building blocks:
//!
//! - [`space`]: finite measurable spaces, partitions (sub-σ-fields), events,
//!   index sets and lexicographic product spaces;
//! - [`measure`]: exact rational measures (probability, finite, base);
//! - [`object`]: measurable maps between finite spaces, pushforwards,
//!   bundling into product spaces;
//! - [`cooccurrence`]: scalar and measure-valued probabilities of
//!   co-occurrence and their event-conditioned versions;
//! - [`conditioning`]: pointwise conditional probabilities, conditional
//!   kernels and the transformation calculus between them, plus conditional
//!   independence checks;
//! - [`density`]: densities of joint laws with respect to product measures,
//!   marginalization, kernels from densities, change of base;
//! - [`eintegral`]: E-integrals against (conditional) co-occurrence measures
//!   and conditional expectations given random objects;
//! - [`scm`]: finite structural causal models, solutions, observational
//!   distributions and do-interventions;
//! - [`checks`]: the executable law suite that the CLI's `check` command and
//!   the acceptance tests both run;
//! - [`model`]: the JSON model-file format shared with the CLI.
//!
//! Every conditional operation follows the zero convention: when the
//! conditioning mass is zero the result is zero and carries a
//! machine-readable null flag, so callers can tell a genuine zero from a
//! vacuous one.

pub mod checks;
pub mod conditioning;
pub mod cooccurrence;
pub mod density;
pub mod eintegral;
pub mod error;
pub mod measure;
pub mod model;
pub mod object;
pub mod rational;
pub mod scm;
pub mod space;

pub use conditioning::{CiVerdict, IndependencePattern, Kernel, PointwiseConditional};
pub use cooccurrence::{Conditioned, Constraint, CoocQuery};
pub use density::{BaseFamily, Density};
pub use eintegral::{EIntegralResult, PiecewiseLinearConvex, RandomVariable};
pub use error::{Error, Result};
pub use measure::{MeasureKind, RationalMeasure};
pub use object::RandomObject;
pub use rational::Rat;
pub use scm::{Scm, SolutionMap};
pub use space::{Event, FiniteSpace, IndexSet, Partition, ProductSpace, SpaceRef};

/// Default ceiling on product-space sizes; guards against accidental
/// exponential blowup when bundling many objects.
pub const DEFAULT_PRODUCT_CAP: usize = 1_000_000;
