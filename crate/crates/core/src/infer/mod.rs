//! Bound computations for credal networks.
//!
//! Two extensions are available: the type-1 extension ([`type1_bounds`]),
//! which enumerates products of local vertices, and the natural extension
//! ([`natural_bounds`]), which optimises a linear-fractional program over
//! joint distributions, optionally after the reduction in
//! [`reduce_theorem2`].

pub mod atoms;
pub mod bn;
mod natural;
mod type1;

pub use atoms::AtomIndexer;
pub use bn::{bn_posterior, bn_weighted, joint_eval, PointSelection};
pub use natural::{
    build_fractional, generate_constraints, natural_bounds, natural_program, natural_weighted, reduce_theorem2,
    ConstraintOrigin, ConstraintRow, ConstraintSystem, ReducedProgram,
};
pub use type1::{type1_bounds, type1_weighted, Type1Options, DEFAULT_COMBINATION_CAP};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::{IrrelevancePolicy, NetworkModel, Query};
use crate::scalar::{Rational, Scalar};
use crate::solve::FractionalStatus;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundStatus {
    Exact,
    /// The evidence can have probability zero; the lower value is the
    /// minimum of the function.
    LowerEnvelopeZero,
    /// The evidence has probability zero everywhere; the bound is vacuous.
    VacuousEvidence,
    /// Supremum over distributions giving the evidence positive probability.
    SupremumPositiveEvidence,
}

impl BoundStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundStatus::Exact => "exact",
            BoundStatus::LowerEnvelopeZero => "LowerEnvelopeZero",
            BoundStatus::VacuousEvidence => "VacuousEvidence",
            BoundStatus::SupremumPositiveEvidence => "SupremumPositiveEvidence",
        }
    }
}

impl From<FractionalStatus> for BoundStatus {
    fn from(s: FractionalStatus) -> Self {
        match s {
            FractionalStatus::Optimal => BoundStatus::Exact,
            FractionalStatus::LowerEnvelopeZero => BoundStatus::LowerEnvelopeZero,
            FractionalStatus::VacuousEvidence => BoundStatus::VacuousEvidence,
            FractionalStatus::SupremumPositiveEvidence => BoundStatus::SupremumPositiveEvidence,
        }
    }
}

/// Work counters attached to a result.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub pivots: usize,
    /// Vertex combinations evaluated by the type-1 path.
    pub combinations: u128,
    /// Equality constraints, the unitary row included.
    pub equalities: usize,
    pub inequalities: usize,
    pub atoms: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalBounds<S> {
    pub lower: S,
    pub upper: S,
    pub lower_status: BoundStatus,
    pub upper_status: BoundStatus,
    pub stats: SolveStats,
}

impl<S: Scalar> IntervalBounds<S> {
    pub fn width(&self) -> S {
        self.upper.clone() - self.lower.clone()
    }

    /// `self ⊆ other` with slack `tol` on both ends.
    pub fn within(&self, other: &Self, tol: f64) -> bool {
        other.lower.to_f64() - tol <= self.lower.to_f64() && self.upper.to_f64() <= other.upper.to_f64() + tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Type1,
    Natural,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Type1 => "type1",
            Method::Natural => "natural",
        }
    }
}

/// Options shared by [`expectation_bounds`] and the CLI.
#[derive(Debug, Clone, PartialEq)]
pub struct InferenceOptions {
    pub method: Method,
    pub policy: IrrelevancePolicy,
    pub use_reduction: bool,
    pub type1: Type1Options,
}

impl Default for InferenceOptions {
    fn default() -> Self {
        Self {
            method: Method::Natural,
            policy: IrrelevancePolicy::Nondescendants,
            use_reduction: true,
            type1: Type1Options::default(),
        }
    }
}

/// Lower and upper expectation of `f(target)` given the evidence; `f` holds
/// one value per state of the target.
pub fn expectation_bounds<S: Scalar>(
    model: &NetworkModel,
    target: usize,
    f: &[Rational],
    evidence: &[(usize, usize)],
    options: &InferenceOptions,
) -> Result<IntervalBounds<S>> {
    model.dag().check(target)?;
    if f.len() != model.cardinality(target) {
        return Err(Error::InvalidQuery(format!(
            "expectation needs {} values for `{}`, got {}",
            model.cardinality(target),
            model.variable(target).name,
            f.len()
        )));
    }
    match options.method {
        Method::Type1 => type1_weighted(model, target, f, evidence, &options.type1),
        Method::Natural => natural_weighted(model, target, f, evidence, &options.policy, options.use_reduction),
    }
}

/// Probability bounds through whichever method `options` selects.
pub fn query_bounds<S: Scalar>(
    model: &NetworkModel,
    query: &Query,
    options: &InferenceOptions,
) -> Result<IntervalBounds<S>> {
    let f = indicator_weights(model.cardinality(query.target.0), query.target.1);
    expectation_bounds(model, query.target.0, &f, &query.evidence, options)
}

pub(crate) fn indicator_weights(card: usize, value: usize) -> Vec<Rational> {
    (0..card)
        .map(|j| if j == value { Rational::one() } else { Rational::zero() })
        .collect()
}

/// `[min f, max f]`, the bounds when nothing is learnt from the evidence.
pub(crate) fn function_range(f: &[Rational]) -> (Rational, Rational) {
    let lo = f.iter().min().cloned().expect("nonempty value list");
    let hi = f.iter().max().cloned().expect("nonempty value list");
    (lo, hi)
}

