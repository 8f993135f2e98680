//! Inference with locally defined credal networks.
//!
//! A network couples a DAG with one credal set per node and parent
//! configuration. Bounds on posterior probabilities and expectations come
//! either from the type-1 extension (products of local extreme points) or from
//! the natural extension (a linear-fractional program over joint
//! distributions, with constraints replicated according to the irrelevance
//! policy).

pub mod error;
pub mod geometry;
pub mod graph;
pub mod infer;
mod linalg;
pub mod model;
pub mod oracle;
pub mod random;
pub mod scalar;
pub mod solve;

pub use error::{Error, Result};
pub use graph::Dag;
pub use infer::{BoundStatus, InferenceOptions, IntervalBounds, Method};
pub use model::{parse_network, IrrelevancePolicy, NetworkModel, Query};
pub use scalar::{Rational, Scalar};
