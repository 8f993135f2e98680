//! Bayesian-network kernel: one distribution per local record, evaluated by
//! the product factorisation and by variable elimination.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{check_evidence, LocalRecord, NetworkModel, Query};
use crate::scalar::Scalar;

/// A concrete conditional table for every (node, parent configuration).
#[derive(Debug, Clone, PartialEq)]
pub struct PointSelection<S> {
    /// `tables[node][config][value]`.
    pub tables: Vec<Vec<Vec<S>>>,
}

impl<S: Scalar> PointSelection<S> {
    /// Builds a selection by asking `choose` for each record's distribution.
    pub fn from_fn(model: &NetworkModel, mut choose: impl FnMut(usize, usize) -> Vec<S>) -> Self {
        let tables = (0..model.len())
            .map(|v| (0..model.parent_config_count(v)).map(|k| choose(v, k)).collect())
            .collect();
        Self { tables }
    }

    /// Selection of a model whose records are all precise.
    pub fn precise(model: &NetworkModel) -> Result<Self> {
        let mut out = Vec::with_capacity(model.len());
        for v in 0..model.len() {
            let mut node = Vec::new();
            for k in 0..model.parent_config_count(v) {
                let record = model.record(v, k);
                let p = match record {
                    LocalRecord::Point(p) => p.clone(),
                    _ if record.is_precise() => model.local_vertices(v, k)?.points.remove(0),
                    _ => {
                        return Err(Error::InvalidQuery(format!(
                            "node `{}` is not precisely specified",
                            model.variable(v).name
                        )))
                    }
                };
                node.push(p.iter().map(S::from_rational).collect());
            }
            out.push(node);
        }
        Ok(Self { tables: out })
    }

    pub fn prob(&self, model: &NetworkModel, node: usize, assignment: &[usize]) -> &S {
        &self.tables[node][model.parent_config_of(node, assignment)][assignment[node]]
    }
}

/// `Π_i p(x_i | pa_i)` at a full assignment.
pub fn joint_eval<S: Scalar>(model: &NetworkModel, sel: &PointSelection<S>, assignment: &[usize]) -> S {
    (0..model.len()).fold(S::one(), |acc, v| acc * sel.prob(model, v, assignment).clone())
}

/// Table over a set of nodes; the first node varies slowest.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Factor<S> {
    pub vars: Vec<usize>,
    pub cards: Vec<usize>,
    pub values: Vec<S>,
}

impl<S: Scalar> Factor<S> {
    pub fn scalar(v: S) -> Self {
        Self {
            vars: Vec::new(),
            cards: Vec::new(),
            values: vec![v],
        }
    }

    /// `p(node | parents)` as a factor over `parents ∪ {node}`.
    pub fn cpt(model: &NetworkModel, table: &[Vec<S>], node: usize) -> Self {
        let mut vars: Vec<usize> = model.parents(node).to_vec();
        vars.push(node);
        let cards: Vec<usize> = vars.iter().map(|&v| model.cardinality(v)).collect();
        let card = model.cardinality(node);
        let mut values = Vec::with_capacity(cards.iter().product());
        for row in table {
            values.extend(row.iter().take(card).cloned());
        }
        Self { vars, cards, values }
    }

    /// 0/1 factor selecting `value` of `node`.
    pub fn indicator(model: &NetworkModel, node: usize, value: usize) -> Self {
        let card = model.cardinality(node);
        Self {
            vars: vec![node],
            cards: vec![card],
            values: (0..card)
                .map(|j| if j == value { S::one() } else { S::zero() })
                .collect(),
        }
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.vars.len()];
        for i in (0..self.vars.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.cards[i + 1];
        }
        s
    }

    pub fn product(&self, other: &Self) -> Self {
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        for (v, c) in other.vars.iter().zip(&other.cards) {
            if !vars.contains(v) {
                vars.push(*v);
                cards.push(*c);
            }
        }
        let out = Self {
            vars,
            cards,
            values: Vec::new(),
        };
        let len: usize = out.cards.iter().product();
        let a_map = self.projection(&out.vars);
        let b_map = other.projection(&out.vars);
        let strides = out.strides();
        let mut values = Vec::with_capacity(len);
        for idx in 0..len {
            let (mut ia, mut ib) = (0, 0);
            for (i, s) in strides.iter().enumerate() {
                let x = (idx / s) % out.cards[i];
                ia += x * a_map[i];
                ib += x * b_map[i];
            }
            values.push(self.values[ia].clone() * other.values[ib].clone());
        }
        Self { values, ..out }
    }

    /// Stride of this factor for each variable of `vars` (0 when absent).
    fn projection(&self, vars: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        vars.iter()
            .map(|v| {
                self.vars
                    .iter()
                    .position(|w| w == v)
                    .map_or(0, |i| strides[i])
            })
            .collect()
    }

    pub fn sum_out(&self, var: usize) -> Self {
        let Some(pos) = self.vars.iter().position(|&v| v == var) else {
            return self.clone();
        };
        let strides = self.strides();
        let card = self.cards[pos];
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        vars.remove(pos);
        cards.remove(pos);
        let len: usize = cards.iter().product();
        let outer = strides[pos] * card;
        let inner = strides[pos];
        let mut values = vec![S::zero(); len];
        for (idx, v) in self.values.iter().enumerate() {
            let out_idx = (idx / outer) * inner + idx % inner;
            values[out_idx] = values[out_idx].clone() + v.clone();
        }
        Self { vars, cards, values }
    }

    /// Value at a model-length assignment (variables not in the factor ignored).
    pub fn at(&self, assignment: &[usize]) -> &S {
        let idx = self
            .vars
            .iter()
            .zip(self.strides())
            .map(|(&v, s)| assignment[v] * s)
            .sum::<usize>();
        &self.values[idx]
    }
}

/// Multiplies all factors, summing out every variable in `eliminate` along
/// the way (in the given order).
pub(crate) fn eliminate<S: Scalar>(mut factors: Vec<Factor<S>>, eliminate: &[usize]) -> Factor<S> {
    for &var in eliminate {
        let (touching, rest): (Vec<_>, Vec<_>) = factors.into_iter().partition(|f| f.vars.contains(&var));
        factors = rest;
        if touching.is_empty() {
            continue;
        }
        let merged = touching
            .iter()
            .skip(1)
            .fold(touching[0].clone(), |acc, f| acc.product(f));
        factors.push(merged.sum_out(var));
    }
    factors
        .iter()
        .fold(Factor::scalar(S::one()), |acc, f| acc.product(f))
}

/// Nodes whose tables matter for a query: the query variables and their
/// ancestors. Everything else is barren and sums to one.
pub(crate) fn relevant_ancestral_set(model: &NetworkModel, anchors: &[usize]) -> BTreeSet<usize> {
    let mut set = model
        .dag()
        .ancestors(anchors)
        .expect("anchors are valid nodes");
    set.extend(anchors.iter().copied());
    set
}

/// `(Σ_j weights[j] · p(target = j, e), p(e))` by variable elimination.
pub fn bn_weighted<S: Scalar>(
    model: &NetworkModel,
    sel: &PointSelection<S>,
    target: usize,
    weights: &[S],
    evidence: &[(usize, usize)],
) -> Result<(S, S)> {
    check_evidence(model, target, evidence)?;
    let mut anchors: Vec<usize> = evidence.iter().map(|e| e.0).collect();
    anchors.push(target);
    let keep = relevant_ancestral_set(model, &anchors);
    let mut factors: Vec<Factor<S>> = keep.iter().map(|&v| Factor::cpt(model, &sel.tables[v], v)).collect();
    factors.extend(evidence.iter().map(|&(v, x)| Factor::indicator(model, v, x)));
    let order: Vec<usize> = model
        .dag()
        .topological_order()
        .iter()
        .rev()
        .copied()
        .filter(|v| keep.contains(v) && *v != target)
        .collect();
    let joint = eliminate(factors, &order);
    debug_assert_eq!(joint.vars, vec![target]);
    let mut num = S::zero();
    let mut den = S::zero();
    for (w, p) in weights.iter().zip(&joint.values) {
        num = num + w.clone() * p.clone();
        den = den + p.clone();
    }
    Ok((num, den))
}

/// `p(target | evidence)` under a point selection.
pub fn bn_posterior<S: Scalar>(model: &NetworkModel, sel: &PointSelection<S>, query: &Query) -> Result<S> {
    let (target, value) = query.target;
    let weights: Vec<S> = (0..model.cardinality(target))
        .map(|j| if j == value { S::one() } else { S::zero() })
        .collect();
    let (num, den) = bn_weighted(model, sel, target, &weights, &query.evidence)?;
    if !den.is_pos() {
        return Err(Error::ZeroEvidence);
    }
    Ok(num / den)
}
