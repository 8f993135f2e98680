//! Network schema: variables, local credal specifications and the
//! irrelevance policy attached to a DAG.
//!
//! A network file is first decoded into a [`NetworkDocument`] (syntax only),
//! then [`validate`]d, and finally turned into an immutable [`NetworkModel`]
//! whose local records are indexed by parent configuration.

mod format;
mod validate;

use std::collections::BTreeSet;

use num_traits::{One, Zero};

pub use format::{parse_document, serialize};
pub use validate::{validate, Diagnostic, Rule};

use crate::error::{Error, Result};
use crate::geometry::{dedup, enumerate_vertices, intervals_to_constraints, LinearConstraintSet, VertexSet};
use crate::graph::Dag;
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub values: Vec<String>,
}

impl Variable {
    pub fn new(name: impl Into<String>, values: &[&str]) -> Self {
        Self {
            name: name.into(),
            values: values.iter().map(|v| v.to_string()).collect(),
        }
    }

    pub fn cardinality(&self) -> usize {
        self.values.len()
    }

    pub fn value_index(&self, value: &str) -> Result<usize> {
        self.values
            .iter()
            .position(|v| v == value)
            .ok_or_else(|| Error::UnknownValue {
                variable: self.name.clone(),
                value: value.to_string(),
            })
    }
}

/// `Σ_j coefficients[j] · p(x_j | parents) ≤ bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalRow {
    pub coefficients: Vec<Rational>,
    pub bound: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalKind {
    Point,
    Vertices,
    Interval,
    Constraints,
}

impl LocalKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LocalKind::Point => "point",
            LocalKind::Vertices => "vertices",
            LocalKind::Interval => "interval",
            LocalKind::Constraints => "constraints",
        }
    }
}

/// The specification of `K(X | pa = k)` for one parent configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum LocalRecord {
    Point(Vec<Rational>),
    Vertices(Vec<Vec<Rational>>),
    Interval {
        lower: Vec<Rational>,
        upper: Vec<Rational>,
    },
    Constraints(Vec<LocalRow>),
}

/// Relation of a local constraint in `γ·p ⋈ γ0` form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Le,
    Eq,
}

impl LocalRecord {
    pub fn kind(&self) -> LocalKind {
        match self {
            LocalRecord::Point(_) => LocalKind::Point,
            LocalRecord::Vertices(_) => LocalKind::Vertices,
            LocalRecord::Interval { .. } => LocalKind::Interval,
            LocalRecord::Constraints(_) => LocalKind::Constraints,
        }
    }

    /// Whether the record pins down a single distribution.
    pub fn is_precise(&self) -> bool {
        match self {
            LocalRecord::Point(_) => true,
            LocalRecord::Vertices(v) => dedup(v.clone(), &Rational::tolerance()).len() == 1,
            LocalRecord::Interval { lower, upper } => lower == upper,
            LocalRecord::Constraints(_) => false,
        }
    }

    /// Linear description `(γ, γ0, relation)` of the local credal set.
    ///
    /// A precise record yields equality rows for all values but the last
    /// (implied by normalisation). Vertex lists with more than one distinct
    /// point have no stored facet description.
    pub fn linear_rows(&self) -> Result<Vec<(Vec<Rational>, Rational, RowKind)>> {
        let point_rows = |p: &[Rational]| {
            let n = p.len();
            (0..n.saturating_sub(1))
                .map(|j| {
                    let e = (0..n)
                        .map(|i| if i == j { Rational::one() } else { Rational::zero() })
                        .collect();
                    (e, p[j].clone(), RowKind::Eq)
                })
                .collect()
        };
        match self {
            LocalRecord::Point(p) => Ok(point_rows(p)),
            LocalRecord::Vertices(v) => {
                let distinct = dedup(v.clone(), &Rational::tolerance());
                if distinct.len() == 1 {
                    Ok(point_rows(&distinct[0]))
                } else {
                    Err(Error::Unsupported(
                        "linear constraints for a vertex-specified credal set with more than one vertex".into(),
                    ))
                }
            }
            LocalRecord::Interval { lower, upper } => Ok(intervals_to_constraints(lower, upper)
                .rows
                .into_iter()
                .map(|(a, b)| (a, b, RowKind::Le))
                .collect()),
            LocalRecord::Constraints(rows) => Ok(rows
                .iter()
                .map(|r| (r.coefficients.clone(), r.bound.clone(), RowKind::Le))
                .collect()),
        }
    }

    /// The polytope of the record inside the simplex, if it has one.
    pub(crate) fn constraint_set(&self, cardinality: usize) -> Option<LinearConstraintSet<Rational>> {
        match self {
            LocalRecord::Interval { lower, upper } => Some(intervals_to_constraints(lower, upper)),
            LocalRecord::Constraints(rows) => {
                let mut cs = LinearConstraintSet::new(cardinality);
                for r in rows {
                    cs.push_le(r.coefficients.clone(), r.bound.clone());
                }
                Some(cs)
            }
            LocalRecord::Point(_) | LocalRecord::Vertices(_) => None,
        }
    }
}

/// One record per parent configuration, in configuration-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSpec {
    pub records: Vec<LocalRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrrelevanceDeclaration {
    pub target: usize,
    pub irrelevant: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum IrrelevancePolicy {
    #[default]
    None,
    /// Every node's nondescendants are irrelevant to it given its parents.
    Nondescendants,
    Explicit(Vec<IrrelevanceDeclaration>),
}

impl IrrelevancePolicy {
    pub fn name(&self) -> &'static str {
        match self {
            IrrelevancePolicy::None => "none",
            IrrelevancePolicy::Nondescendants => "nondescendants",
            IrrelevancePolicy::Explicit(_) => "explicit",
        }
    }
}

/// A validated, immutable network.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkModel {
    dag: Dag,
    variables: Vec<Variable>,
    locals: Vec<LocalSpec>,
    policy: IrrelevancePolicy,
}

/// Parse and validate a network file.
pub fn parse_network(text: &str) -> Result<NetworkModel> {
    NetworkModel::from_document(parse_document(text)?)
}

impl NetworkModel {
    /// Validates a decoded document and indexes its local records.
    pub fn from_document(doc: NetworkDocument) -> Result<Self> {
        let diagnostics = validate(&doc);
        if let Some(d) = diagnostics.into_iter().next() {
            return Err(match d.rule {
                Rule::Cycle => Error::CycleDetected(d.cycle.clone()),
                _ => Error::Validation(d),
            });
        }
        Ok(validate::build(doc))
    }

    pub(crate) fn from_parts(
        dag: Dag,
        variables: Vec<Variable>,
        locals: Vec<LocalSpec>,
        policy: IrrelevancePolicy,
    ) -> Self {
        Self {
            dag,
            variables,
            locals,
            policy,
        }
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, node: usize) -> &Variable {
        &self.variables[node]
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn node(&self, name: &str) -> Result<usize> {
        self.dag.index_of(name)
    }

    pub fn cardinality(&self, node: usize) -> usize {
        self.variables[node].cardinality()
    }

    pub fn local(&self, node: usize) -> &LocalSpec {
        &self.locals[node]
    }

    pub fn policy(&self) -> &IrrelevancePolicy {
        &self.policy
    }

    /// Same network under a different irrelevance policy.
    pub fn with_policy(&self, policy: IrrelevancePolicy) -> Result<Self> {
        if let IrrelevancePolicy::Explicit(decls) = &policy {
            for d in decls {
                validate::check_declaration(&self.dag, d.target, &d.irrelevant).map_err(Error::Validation)?;
            }
        }
        Ok(Self {
            policy,
            ..self.clone()
        })
    }

    pub fn parents(&self, node: usize) -> &[usize] {
        self.dag.parents(node)
    }

    pub fn parent_config_count(&self, node: usize) -> usize {
        self.parents(node).iter().map(|&p| self.cardinality(p)).product()
    }

    /// Values of the parents (in parent order) for configuration `k`; the
    /// first parent varies slowest.
    pub fn parent_assignment(&self, node: usize, mut k: usize) -> Vec<usize> {
        let parents = self.parents(node);
        let mut values = vec![0; parents.len()];
        for (slot, &p) in parents.iter().enumerate().rev() {
            let card = self.cardinality(p);
            values[slot] = k % card;
            k /= card;
        }
        values
    }

    /// Configuration index of `node` under a full assignment of all nodes.
    pub fn parent_config_of(&self, node: usize, assignment: &[usize]) -> usize {
        self.parents(node)
            .iter()
            .fold(0, |acc, &p| acc * self.cardinality(p) + assignment[p])
    }

    /// `Var=value` pairs of configuration `k`, comma-joined.
    pub fn config_label(&self, node: usize, k: usize) -> String {
        self.parents(node)
            .iter()
            .zip(self.parent_assignment(node, k))
            .map(|(&p, v)| format!("{}={}", self.variables[p].name, self.variables[p].values[v]))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn record(&self, node: usize, k: usize) -> &LocalRecord {
        &self.locals[node].records[k]
    }

    /// Whether any local record of the node is imprecise.
    pub fn is_credal(&self, node: usize) -> bool {
        self.locals[node].records.iter().any(|r| !r.is_precise())
    }

    pub fn credal_nodes(&self) -> BTreeSet<usize> {
        (0..self.len()).filter(|&v| self.is_credal(v)).collect()
    }

    /// Extreme points of the local credal set at configuration `k`.
    pub fn local_vertices(&self, node: usize, k: usize) -> Result<VertexSet<Rational>> {
        self.dag.check(node)?;
        if k >= self.parent_config_count(node) {
            return Err(Error::InvalidQuery(format!(
                "parent configuration {k} out of range for `{}`",
                self.variables[node].name
            )));
        }
        let record = self.record(node, k);
        let points = match record {
            LocalRecord::Point(p) => vec![p.clone()],
            LocalRecord::Vertices(v) => dedup(v.clone(), &Rational::tolerance()),
            _ => {
                let cs = record
                    .constraint_set(self.cardinality(node))
                    .expect("interval and constraint records have a polytope");
                enumerate_vertices(&cs)?.points
            }
        };
        if points.is_empty() {
            return Err(Error::EmptyCredalSet {
                node: self.variables[node].name.clone(),
                config: self.config_label(node, k),
            });
        }
        Ok(VertexSet { points })
    }

    /// Resolves `Var=value` into (node, value index).
    pub fn parse_assignment(&self, token: &str) -> Result<(usize, usize)> {
        let (var, value) = token
            .split_once('=')
            .ok_or_else(|| Error::InvalidQuery(format!("expected Var=value, got `{token}`")))?;
        let node = self.node(var.trim())?;
        let value = self.variables[node].value_index(value.trim())?;
        Ok((node, value))
    }
}

/// The event `{X_q = x}` conditioned on value assignments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub target: (usize, usize),
    pub evidence: Vec<(usize, usize)>,
}

impl Query {
    pub fn new(model: &NetworkModel, target: (usize, usize), evidence: Vec<(usize, usize)>) -> Result<Self> {
        check_evidence(model, target.0, &evidence)?;
        if target.1 >= model.cardinality(target.0) {
            return Err(Error::InvalidQuery("target value out of range".into()));
        }
        Ok(Self { target, evidence })
    }

    /// `Query::parse(&model, "D=d", &["L=l"])`.
    pub fn parse<S: AsRef<str>>(model: &NetworkModel, target: &str, evidence: &[S]) -> Result<Self> {
        let target = model.parse_assignment(target)?;
        let evidence = evidence
            .iter()
            .map(|e| model.parse_assignment(e.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(model, target, evidence)
    }
}

/// Evidence must name distinct variables other than the target.
pub(crate) fn check_evidence(model: &NetworkModel, target: usize, evidence: &[(usize, usize)]) -> Result<()> {
    model.dag.check(target)?;
    let mut seen = BTreeSet::new();
    for &(v, x) in evidence {
        model.dag.check(v)?;
        if v == target {
            return Err(Error::InvalidQuery(format!(
                "target variable `{}` also appears in the evidence",
                model.variable(v).name
            )));
        }
        if !seen.insert(v) {
            return Err(Error::InvalidQuery(format!(
                "variable `{}` appears twice in the evidence",
                model.variable(v).name
            )));
        }
        if x >= model.cardinality(v) {
            return Err(Error::InvalidQuery("evidence value out of range".into()));
        }
    }
    Ok(())
}

/// Decoded but unvalidated network file.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkDocument {
    pub variables: Vec<Variable>,
    pub edges: Vec<(String, String)>,
    pub local: Vec<(String, RawLocal)>,
    pub irrelevance: RawPolicy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawLocal {
    pub kind: LocalKind,
    /// (row key, record) in file order.
    pub rows: Vec<(String, LocalRecord)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawPolicy {
    None,
    Nondescendants,
    Explicit(Vec<(String, Vec<String>)>),
}
