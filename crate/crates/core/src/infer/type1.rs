use std::collections::BTreeSet;

use super::bn::{bn_weighted, relevant_ancestral_set, PointSelection};
use super::{function_range, indicator_weights, BoundStatus, IntervalBounds, SolveStats};
use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::model::{check_evidence, NetworkModel, Query};
use crate::scalar::{Rational, Scalar};

pub const DEFAULT_COMBINATION_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Type1Options {
    /// Largest number of vertex combinations that will be enumerated.
    pub combination_cap: u128,
    /// Only vary the records whose tables can influence the query.
    pub prune: bool,
}

impl Default for Type1Options {
    fn default() -> Self {
        Self {
            combination_cap: DEFAULT_COMBINATION_CAP,
            prune: true,
        }
    }
}

pub fn type1_bounds<S: Scalar>(model: &NetworkModel, query: &Query, options: &Type1Options) -> Result<IntervalBounds<S>> {
    let f = indicator_weights(model.cardinality(query.target.0), query.target.1);
    type1_weighted(model, query.target.0, &f, &query.evidence, options)
}

/// Type-1 bounds on `E[f(target) | evidence]`.
pub fn type1_weighted<S: Scalar>(
    model: &NetworkModel,
    target: usize,
    f: &[Rational],
    evidence: &[(usize, usize)],
    options: &Type1Options,
) -> Result<IntervalBounds<S>> {
    check_evidence(model, target, evidence)?;
    let mut anchors: Vec<usize> = evidence.iter().map(|e| e.0).collect();
    anchors.push(target);
    let ancestral = relevant_ancestral_set(model, &anchors);

    let mut vertices: Vec<Vec<Vec<Vec<S>>>> = Vec::with_capacity(model.len());
    for v in 0..model.len() {
        let mut node = Vec::new();
        for k in 0..model.parent_config_count(v) {
            let vs = model.local_vertices(v, k)?;
            node.push(
                vs.points
                    .iter()
                    .map(|p| p.iter().map(S::from_rational).collect())
                    .collect(),
            );
        }
        vertices.push(node);
    }

    let weights: Vec<S> = f.iter().map(S::from_rational).collect();
    let pruned = if options.prune {
        requisite_nodes(model, target, evidence)?
            .intersection(&ancestral)
            .copied()
            .collect()
    } else {
        ancestral.clone()
    };
    let first = enumerate(model, &vertices, &pruned, target, &weights, evidence, options.combination_cap)?;
    let run = if first.zero > 0 && pruned != ancestral {
        enumerate(model, &vertices, &ancestral, target, &weights, evidence, options.combination_cap)?
    } else {
        first
    };

    let stats = SolveStats {
        combinations: run.count,
        ..SolveStats::default()
    };
    match run.extrema {
        Some((lower, upper)) => Ok(IntervalBounds {
            lower,
            upper,
            lower_status: BoundStatus::Exact,
            upper_status: BoundStatus::Exact,
            stats,
        }),
        None => {
            let (lo, hi) = function_range(f);
            Ok(IntervalBounds {
                lower: S::from_rational(&lo),
                upper: S::from_rational(&hi),
                lower_status: BoundStatus::VacuousEvidence,
                upper_status: BoundStatus::VacuousEvidence,
                stats,
            })
        }
    }
}

struct Run<S> {
    extrema: Option<(S, S)>,
    count: u128,
    zero: u128,
}

/// Walks the Cartesian product of the vertex lists of every record of the
/// `varied` nodes; the other records stay at their first vertex.
fn enumerate<S: Scalar>(
    model: &NetworkModel,
    vertices: &[Vec<Vec<Vec<S>>>],
    varied: &BTreeSet<usize>,
    target: usize,
    weights: &[S],
    evidence: &[(usize, usize)],
    cap: u128,
) -> Result<Run<S>> {
    let slots: Vec<(usize, usize, usize)> = varied
        .iter()
        .flat_map(|&v| (0..vertices[v].len()).map(move |k| (v, k)))
        .map(|(v, k)| (v, k, vertices[v][k].len()))
        .filter(|s| s.2 > 1)
        .collect();
    let mut count: u128 = 1;
    for s in &slots {
        count = count.saturating_mul(s.2 as u128);
        if count > cap {
            let total = slots.iter().fold(1u128, |acc, s| acc.saturating_mul(s.2 as u128));
            return Err(Error::CombinationCap { count: total, cap });
        }
    }

    let mut sel = PointSelection::from_fn(model, |v, k| vertices[v][k][0].clone());
    let mut choice = vec![0usize; slots.len()];
    let mut extrema: Option<(S, S)> = None;
    let mut zero = 0u128;
    loop {
        let (num, den) = bn_weighted(model, &sel, target, weights, evidence)?;
        if den.is_pos() {
            let r = num / den;
            extrema = Some(match extrema {
                None => (r.clone(), r),
                Some((lo, hi)) => {
                    let lo = if r < lo { r.clone() } else { lo };
                    let hi = if r > hi { r } else { hi };
                    (lo, hi)
                }
            });
        } else {
            zero += 1;
        }

        // odometer step, last slot fastest
        let mut i = slots.len();
        loop {
            if i == 0 {
                return Ok(Run { extrema, count, zero });
            }
            i -= 1;
            let (v, k, n) = slots[i];
            choice[i] += 1;
            if choice[i] < n {
                sel.tables[v][k] = vertices[v][k][choice[i]].clone();
                break;
            }
            choice[i] = 0;
            sel.tables[v][k] = vertices[v][k][0].clone();
        }
    }
}

/// Nodes whose conditional tables can change `p(target | evidence)`: those
/// whose added parameter parent is d-connected to the target given the
/// evidence.
fn requisite_nodes(model: &NetworkModel, target: usize, evidence: &[(usize, usize)]) -> Result<BTreeSet<usize>> {
    let n = model.len();
    let mut names: Vec<String> = model.dag().names().to_vec();
    names.extend((0..n).map(|v| format!("\u{3b8}#{v}")));
    let mut edges: Vec<(String, String)> = model
        .dag()
        .edges()
        .iter()
        .map(|&(a, b)| (names[a].clone(), names[b].clone()))
        .collect();
    edges.extend((0..n).map(|v| (names[n + v].clone(), names[v].clone())));
    let augmented = Dag::new(&names, &edges)?;
    let given: Vec<usize> = evidence.iter().map(|e| e.0).collect();
    let mut out = BTreeSet::new();
    for v in 0..n {
        if !augmented.d_separated(&[n + v], &[target], &given)? {
            out.insert(v);
        }
    }
    Ok(out)
}
