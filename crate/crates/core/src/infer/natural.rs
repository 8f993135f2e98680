use std::collections::{BTreeSet, HashSet};

use num_traits::{Signed, Zero};

use super::atoms::AtomIndexer;
use super::bn::{eliminate, Factor};
use super::{function_range, indicator_weights, IntervalBounds, SolveStats};
use crate::error::{Error, Result};
use crate::geometry::LinearConstraintSet;
use crate::model::{check_evidence, IrrelevancePolicy, NetworkModel, Query, RowKind};
use crate::scalar::{Rational, Scalar};
use crate::solve::{solve_fractional, FractionalProgram, FractionalStatus, Sense};

/// Largest joint atom space a program is built over.
const MAX_ATOMS: usize = 1 << 16;

/// Where a generated row came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintOrigin {
    pub node: usize,
    /// Parent configuration index of the local record.
    pub config: usize,
    /// Values of the replicating variables for this copy.
    pub replication: Vec<(usize, usize)>,
    /// Index into the record's linear rows.
    pub row: usize,
}

/// Homogeneous row `coefficients · w ⋈ 0` over the atoms of a scope.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintRow {
    pub coefficients: Vec<Rational>,
    pub kind: RowKind,
    pub origin: ConstraintOrigin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSystem {
    pub scope: AtomIndexer,
    pub rows: Vec<ConstraintRow>,
}

impl ConstraintSystem {
    /// Equality constraints, counting the unitary row.
    pub fn equalities(&self) -> usize {
        1 + self.rows.iter().filter(|r| r.kind == RowKind::Eq).count()
    }

    pub fn inequalities(&self) -> usize {
        self.rows.iter().filter(|r| r.kind == RowKind::Le).count()
    }

    /// The polytope of joint distributions over the scope.
    pub fn constraint_set(&self) -> LinearConstraintSet<Rational> {
        let mut cs = LinearConstraintSet::new(self.scope.len());
        for r in &self.rows {
            match r.kind {
                RowKind::Le => cs.push_le(r.coefficients.clone(), Rational::zero()),
                RowKind::Eq => cs.push_eq(r.coefficients.clone(), Rational::zero()),
            }
        }
        cs
    }

    fn fractional(&self, numerator: Vec<Rational>, denominator: Vec<Rational>) -> FractionalProgram<Rational> {
        let mut fp = FractionalProgram::new(numerator, denominator);
        for r in &self.rows {
            match r.kind {
                RowKind::Le => fp.le_rows.push(r.coefficients.clone()),
                RowKind::Eq => fp.eq_rows.push(r.coefficients.clone()),
            }
        }
        fp
    }
}

/// Variables over which the constraints of `node` are replicated.
fn replicating_set(model: &NetworkModel, policy: &IrrelevancePolicy, node: usize, scope: &BTreeSet<usize>) -> Result<Vec<usize>> {
    let nd = model.dag().nondescendants(node)?;
    let allowed = |v: &usize| scope.contains(v) && nd.contains(v) && !model.parents(node).contains(v);
    let set: BTreeSet<usize> = match policy {
        IrrelevancePolicy::None => BTreeSet::new(),
        IrrelevancePolicy::Nondescendants => nd.iter().copied().filter(allowed).collect(),
        IrrelevancePolicy::Explicit(decls) => decls
            .iter()
            .filter(|d| d.target == node)
            .flat_map(|d| d.irrelevant.iter().copied())
            .filter(allowed)
            .collect(),
    };
    Ok(set.into_iter().collect())
}

/// Row scaled so its largest magnitude is one; equality rows additionally
/// start with a positive entry. `None` for the zero row.
fn normal_form(coefficients: &[Rational], kind: RowKind) -> Option<Vec<Rational>> {
    let scale = coefficients.iter().map(Signed::abs).max()?;
    if scale.is_zero() {
        return None;
    }
    let mut scale = scale;
    if kind == RowKind::Eq && coefficients.iter().find(|c| !c.is_zero())?.is_negative() {
        scale = -scale;
    }
    Some(coefficients.iter().map(|c| c / &scale).collect())
}

/// Linear constraints on the joint distribution of `scope`, which must
/// contain the parents of each of its nodes.
///
/// Every local row `γ·p(X | pa_k) ≤ γ0` becomes `Σ_j γ_j p(x_j, pa_k, r) −
/// γ0 p(pa_k, r) ≤ 0` for each configuration `r` of the replicating set.
/// Rows that are positive multiples of an earlier row are dropped.
pub fn generate_constraints(model: &NetworkModel, policy: &IrrelevancePolicy, scope: &[usize]) -> Result<ConstraintSystem> {
    let members: BTreeSet<usize> = scope.iter().copied().collect();
    for &v in &members {
        model.dag().check(v)?;
        if let Some(p) = model.parents(v).iter().find(|p| !members.contains(p)) {
            return Err(Error::InvalidQuery(format!(
                "scope contains `{}` but not its parent `{}`",
                model.variable(v).name,
                model.variable(*p).name
            )));
        }
    }
    let atoms = checked_indexer(model, &members)?;
    let mut rows = Vec::new();
    let mut seen: HashSet<(bool, Vec<Rational>)> = HashSet::new();
    for &v in atoms.nodes() {
        let repl = AtomIndexer::new(model, replicating_set(model, policy, v, &members)?);
        for k in 0..model.parent_config_count(v) {
            let local = model.record(v, k).linear_rows()?;
            let parents: Vec<(usize, usize)> = model
                .parents(v)
                .iter()
                .copied()
                .zip(model.parent_assignment(v, k))
                .collect();
            for r in 0..repl.len() {
                let replication: Vec<(usize, usize)> = repl.nodes().iter().map(|&u| (u, repl.value(r, u))).collect();
                let mut event = parents.clone();
                event.extend(replication.iter().copied());
                for (l, (gamma, gamma0, kind)) in local.iter().enumerate() {
                    let coefficients: Vec<Rational> = (0..atoms.len())
                        .map(|a| {
                            if atoms.matches(a, &event) {
                                &gamma[atoms.value(a, v)] - gamma0
                            } else {
                                Rational::zero()
                            }
                        })
                        .collect();
                    let Some(key) = normal_form(&coefficients, *kind) else {
                        continue;
                    };
                    if seen.insert((*kind == RowKind::Eq, key)) {
                        rows.push(ConstraintRow {
                            coefficients,
                            kind: *kind,
                            origin: ConstraintOrigin {
                                node: v,
                                config: k,
                                replication: replication.clone(),
                                row: l,
                            },
                        });
                    }
                }
            }
        }
    }
    Ok(ConstraintSystem { scope: atoms, rows })
}

fn checked_indexer(model: &NetworkModel, members: &BTreeSet<usize>) -> Result<AtomIndexer> {
    let size = members
        .iter()
        .try_fold(1usize, |acc, &v| acc.checked_mul(model.cardinality(v)));
    match size {
        Some(n) if n <= MAX_ATOMS => Ok(AtomIndexer::new(model, members.iter().copied())),
        _ => Err(Error::TooLarge(format!("joint atom space over {} variables", members.len()))),
    }
}

/// `(Σ_j f_j · [target = j ∧ evidence]) / [evidence]` over the atoms of the
/// system, with the system's rows.
pub fn build_fractional(
    model: &NetworkModel,
    system: &ConstraintSystem,
    query: &Query,
) -> Result<FractionalProgram<Rational>> {
    let f = indicator_weights(model.cardinality(query.target.0), query.target.1);
    build_weighted(system, query.target.0, &f, &query.evidence)
}

fn build_weighted(
    system: &ConstraintSystem,
    target: usize,
    f: &[Rational],
    evidence: &[(usize, usize)],
) -> Result<FractionalProgram<Rational>> {
    let atoms = &system.scope;
    if !atoms.contains(target) || evidence.iter().any(|e| !atoms.contains(e.0)) {
        return Err(Error::InvalidQuery("query variable outside the program scope".into()));
    }
    let mut numerator = Vec::with_capacity(atoms.len());
    let mut denominator = Vec::with_capacity(atoms.len());
    for a in 0..atoms.len() {
        if atoms.matches(a, evidence) {
            numerator.push(f[atoms.value(a, target)].clone());
            denominator.push(Rational::from_integer(1.into()));
        } else {
            numerator.push(Rational::zero());
            denominator.push(Rational::zero());
        }
    }
    Ok(system.fractional(numerator, denominator))
}

/// Program over the credal nodes and their ancestors only.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedProgram {
    /// Credal nodes and their ancestors, in atom order.
    pub free: Vec<usize>,
    /// Point-specified nodes outside `free`.
    pub fixed: Vec<usize>,
    pub numerator: Vec<Rational>,
    pub denominator: Vec<Rational>,
    pub system: ConstraintSystem,
}

impl ReducedProgram {
    pub fn fractional(&self) -> FractionalProgram<Rational> {
        self.system.fractional(self.numerator.clone(), self.denominator.clone())
    }
}

/// Reduced program for `query` under the model's own policy, which must be
/// the nondescendants policy.
pub fn reduce_theorem2(model: &NetworkModel, query: &Query) -> Result<ReducedProgram> {
    let f = indicator_weights(model.cardinality(query.target.0), query.target.1);
    reduce_weighted(model, model.policy(), query.target.0, &f, &query.evidence)
}

fn reduce_weighted(
    model: &NetworkModel,
    policy: &IrrelevancePolicy,
    target: usize,
    f: &[Rational],
    evidence: &[(usize, usize)],
) -> Result<ReducedProgram> {
    if *policy != IrrelevancePolicy::Nondescendants {
        return Err(Error::ReductionNotApplicable(format!(
            "policy `{}` (the reduction needs `nondescendants`)",
            policy.name()
        )));
    }
    check_evidence(model, target, evidence)?;
    let credal: Vec<usize> = model.credal_nodes().into_iter().collect();
    let mut free = model.dag().ancestors(&credal)?;
    free.extend(credal.iter().copied());
    let fixed: Vec<usize> = model
        .dag()
        .topological_order()
        .iter()
        .copied()
        .filter(|v| !free.contains(v))
        .collect();

    let mut cpts = Vec::with_capacity(fixed.len());
    for &v in &fixed {
        let mut table = Vec::with_capacity(model.parent_config_count(v));
        for k in 0..model.parent_config_count(v) {
            let mut points = model.local_vertices(v, k)?.points;
            if points.len() != 1 {
                return Err(Error::ReductionNotApplicable(format!(
                    "`{}` is outside the credal ancestral set but not precise",
                    model.variable(v).name
                )));
            }
            table.push(points.remove(0));
        }
        cpts.push(Factor::cpt(model, &table, v));
    }

    let system = generate_constraints(model, policy, &free.iter().copied().collect::<Vec<_>>())?;
    let atoms = &system.scope;
    let order: Vec<usize> = fixed.iter().rev().copied().collect();
    // Σ over the fixed nodes of Π q(w | pa(w)) on the event `pairs`, per atom
    let coefficients = |pairs: &[(usize, usize)]| -> Vec<Rational> {
        let mut factors = cpts.clone();
        let mut on_free = Vec::new();
        for &(v, x) in pairs {
            if free.contains(&v) {
                on_free.push((v, x));
            } else {
                factors.push(Factor::indicator(model, v, x));
            }
        }
        let marginal = eliminate(factors, &order);
        let mut assignment = vec![0; model.len()];
        (0..atoms.len())
            .map(|a| {
                if atoms.matches(a, &on_free) {
                    atoms.decode_into(a, &mut assignment);
                    marginal.at(&assignment).clone()
                } else {
                    Rational::zero()
                }
            })
            .collect()
    };

    let denominator = coefficients(evidence);
    let mut numerator = vec![Rational::zero(); atoms.len()];
    for (j, weight) in f.iter().enumerate() {
        if weight.is_zero() {
            continue;
        }
        let mut pairs = evidence.to_vec();
        pairs.push((target, j));
        for (n, c) in numerator.iter_mut().zip(coefficients(&pairs)) {
            *n += weight * c;
        }
    }
    Ok(ReducedProgram {
        free: atoms.nodes().to_vec(),
        fixed,
        numerator,
        denominator,
        system,
    })
}

/// The fractional program answering a query, with the rows it came from.
pub fn natural_program(
    model: &NetworkModel,
    query: &Query,
    policy: &IrrelevancePolicy,
    use_reduction: bool,
) -> Result<(FractionalProgram<Rational>, ConstraintSystem)> {
    let f = indicator_weights(model.cardinality(query.target.0), query.target.1);
    weighted_program(model, query.target.0, &f, &query.evidence, policy, use_reduction)
}

fn weighted_program(
    model: &NetworkModel,
    target: usize,
    f: &[Rational],
    evidence: &[(usize, usize)],
    policy: &IrrelevancePolicy,
    use_reduction: bool,
) -> Result<(FractionalProgram<Rational>, ConstraintSystem)> {
    if use_reduction {
        let reduced = reduce_weighted(model, policy, target, f, evidence)?;
        return Ok((reduced.fractional(), reduced.system));
    }
    check_evidence(model, target, evidence)?;
    let all: Vec<usize> = (0..model.len()).collect();
    let system = generate_constraints(model, policy, &all)?;
    let fp = build_weighted(&system, target, f, evidence)?;
    Ok((fp, system))
}

pub fn natural_bounds<S: Scalar>(
    model: &NetworkModel,
    query: &Query,
    policy: &IrrelevancePolicy,
    use_reduction: bool,
) -> Result<IntervalBounds<S>> {
    let f = indicator_weights(model.cardinality(query.target.0), query.target.1);
    natural_weighted(model, query.target.0, &f, &query.evidence, policy, use_reduction)
}

/// Natural-extension bounds on `E[f(target) | evidence]`.
pub fn natural_weighted<S: Scalar>(
    model: &NetworkModel,
    target: usize,
    f: &[Rational],
    evidence: &[(usize, usize)],
    policy: &IrrelevancePolicy,
    use_reduction: bool,
) -> Result<IntervalBounds<S>> {
    let (fp, system) = weighted_program(model, target, f, evidence, policy, use_reduction)?;
    let fp = map_program(&fp);
    let low = solve_fractional(&fp, Sense::Min)?;
    let high = solve_fractional(&fp, Sense::Max)?;
    let (f_min, f_max) = function_range(f);
    let lower = match low.status {
        FractionalStatus::Optimal | FractionalStatus::SupremumPositiveEvidence => low.value,
        FractionalStatus::LowerEnvelopeZero | FractionalStatus::VacuousEvidence => S::from_rational(&f_min),
    };
    let upper = match high.status {
        FractionalStatus::VacuousEvidence => S::from_rational(&f_max),
        _ => high.value,
    };
    Ok(IntervalBounds {
        lower,
        upper,
        lower_status: low.status.into(),
        upper_status: high.status.into(),
        stats: SolveStats {
            pivots: low.pivots + high.pivots,
            combinations: 0,
            equalities: system.equalities(),
            inequalities: system.inequalities(),
            atoms: system.scope.len(),
        },
    })
}

fn map_program<S: Scalar>(fp: &FractionalProgram<Rational>) -> FractionalProgram<S> {
    let conv = |v: &[Rational]| v.iter().map(S::from_rational).collect::<Vec<S>>();
    FractionalProgram {
        numerator: conv(&fp.numerator),
        denominator: conv(&fp.denominator),
        le_rows: fp.le_rows.iter().map(|r| conv(r)).collect(),
        eq_rows: fp.eq_rows.iter().map(|r| conv(r)).collect(),
        extra_rows: fp
            .extra_rows
            .iter()
            .map(|(a, b)| (conv(a), S::from_rational(b)))
            .collect(),
    }
}
