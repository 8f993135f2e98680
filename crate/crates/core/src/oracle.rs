//! Slow reference implementations used to cross-check the main paths.
//!
//! Everything here is written the naive way: literal path enumeration for
//! d-separation, explicit sums over every joint atom, and evaluation of a
//! ratio at every vertex of a polytope.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{enumerate_vertices, VertexSet};
use crate::graph::Dag;
use crate::infer::{BoundStatus, ConstraintSystem, IntervalBounds, PointSelection, SolveStats};
use crate::model::{IrrelevancePolicy, NetworkModel, Query, RowKind};
use crate::scalar::{rational_to_f64, Rational, Scalar};
use crate::solve::FractionalProgram;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckFailure {
    pub context: String,
    pub expected: f64,
    pub got: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckReport {
    pub checks: usize,
    /// Conditioning events of probability zero that were not checked.
    pub skipped: usize,
    pub failures: Vec<CheckFailure>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Records one comparison `|expected − got| ≤ tolerance`.
    pub fn compare(&mut self, context: impl FnOnce() -> String, expected: f64, got: f64, tolerance: f64) {
        self.checks += 1;
        if (expected - got).abs() > tolerance {
            self.fail(context(), expected, got, tolerance);
        }
    }

    /// Records one comparison `got ≤ bound + tolerance`.
    pub fn at_most(&mut self, context: impl FnOnce() -> String, bound: f64, got: f64, tolerance: f64) {
        self.checks += 1;
        if got > bound + tolerance {
            self.fail(context(), bound, got, tolerance);
        }
    }

    fn fail(&mut self, context: String, expected: f64, got: f64, tolerance: f64) {
        self.failures.push(CheckFailure {
            context,
            expected,
            got,
            tolerance,
        });
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checks += other.checks;
        self.skipped += other.skipped;
        self.failures.extend(other.failures);
    }
}

/// d-separation by listing every simple undirected path.
pub fn dsep_bruteforce(dag: &Dag, x: &[usize], z: &[usize], given: &[usize]) -> Result<bool> {
    let n = dag.len();
    if n > 10 {
        return Err(Error::TooLarge(format!("{n} nodes (path enumeration handles at most 10)")));
    }
    let mut seen = vec![false; n];
    for &v in x.iter().chain(z).chain(given) {
        if v >= n {
            return Err(Error::UnknownNode(format!("#{v}")));
        }
        if seen[v] {
            return Err(Error::OverlappingSets);
        }
        seen[v] = true;
    }
    let observed: Vec<bool> = (0..n).map(|v| given.contains(&v)).collect();
    // a collider is open when it or one of its descendants is observed
    let open_collider: Vec<bool> = (0..n)
        .map(|v| {
            let mut stack = vec![v];
            let mut visited = vec![false; n];
            while let Some(u) = stack.pop() {
                if observed[u] {
                    return true;
                }
                for &c in dag.children(u) {
                    if !visited[c] {
                        visited[c] = true;
                        stack.push(c);
                    }
                }
            }
            false
        })
        .collect();
    let edge = |a: usize, b: usize| dag.children(a).contains(&b);
    let neighbours = |v: usize| -> Vec<usize> { (0..n).filter(|&u| edge(u, v) || edge(v, u)).collect() };
    let is_target: Vec<bool> = (0..n).map(|v| z.contains(&v)).collect();

    fn walk(
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        passes: &dyn Fn(usize, usize, usize) -> bool,
        neighbours: &dyn Fn(usize) -> Vec<usize>,
        is_target: &[bool],
    ) -> bool {
        let last = *path.last().expect("path is never empty");
        for next in neighbours(last) {
            if on_path[next] {
                continue;
            }
            // `last` becomes interior once `next` is appended
            if path.len() >= 2 && !passes(path[path.len() - 2], last, next) {
                continue;
            }
            if is_target[next] {
                return true;
            }
            path.push(next);
            on_path[next] = true;
            let found = walk(path, on_path, passes, neighbours, is_target);
            on_path[next] = false;
            path.pop();
            if found {
                return true;
            }
        }
        false
    }

    // whether interior node m (between a and b) lets the path through
    let passes = |a: usize, m: usize, b: usize| {
        if edge(a, m) && edge(b, m) {
            open_collider[m]
        } else {
            !observed[m]
        }
    };
    for &start in x {
        let mut path = vec![start];
        let mut on_path = vec![false; n];
        on_path[start] = true;
        if walk(&mut path, &mut on_path, &passes, &neighbours, &is_target) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Extrema of `c·w / d·w` over the vertices of the program's polytope that
/// give the denominator positive weight.
pub fn vertex_ratio_extrema<S: Scalar>(fp: &FractionalProgram<S>) -> Result<IntervalBounds<S>> {
    let vertices = enumerate_vertices(&fp.constraint_set())?;
    if vertices.is_empty() {
        return Err(Error::EmptyPolytope);
    }
    let mut extrema: Option<(S, S)> = None;
    for w in vertices.iter() {
        let mut num = S::zero();
        let mut den = S::zero();
        for ((c, d), x) in fp.numerator.iter().zip(&fp.denominator).zip(w) {
            num = num + c.clone() * x.clone();
            den = den + d.clone() * x.clone();
        }
        if !den.is_pos() {
            continue;
        }
        let r = num / den;
        extrema = Some(match extrema {
            None => (r.clone(), r),
            Some((lo, hi)) => (
                if r < lo { r.clone() } else { lo },
                if r > hi { r } else { hi },
            ),
        });
    }
    let (lower, upper) = extrema.ok_or(Error::AllDenominatorsZero)?;
    Ok(IntervalBounds {
        lower,
        upper,
        lower_status: BoundStatus::Exact,
        upper_status: BoundStatus::Exact,
        stats: SolveStats {
            atoms: fp.dimension(),
            ..SolveStats::default()
        },
    })
}

/// Every joint assignment of the model, first node slowest.
fn all_assignments(model: &NetworkModel) -> Result<Vec<Vec<usize>>> {
    let total = (0..model.len()).try_fold(1usize, |acc, v| acc.checked_mul(model.cardinality(v)));
    match total {
        Some(t) if t <= 1 << 20 => {}
        _ => return Err(Error::TooLarge("more than 2^20 joint atoms".into())),
    }
    let mut out = vec![Vec::new()];
    for v in 0..model.len() {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..model.cardinality(v)).map(move |x| {
                    let mut a = prefix.clone();
                    a.push(x);
                    a
                })
            })
            .collect();
    }
    Ok(out)
}

fn product_at<S: Scalar>(model: &NetworkModel, sel: &PointSelection<S>, a: &[usize]) -> S {
    let mut p = S::one();
    for (v, table) in sel.tables.iter().enumerate() {
        let mut k = 0;
        for &u in model.parents(v) {
            k = k * model.cardinality(u) + a[u];
        }
        p = p * table[k][a[v]].clone();
    }
    p
}

/// `p(target | evidence)` as a ratio of two explicit sums over all atoms.
pub fn joint_enumeration_posterior<S: Scalar>(model: &NetworkModel, sel: &PointSelection<S>, query: &Query) -> Result<S> {
    let mut num = S::zero();
    let mut den = S::zero();
    for a in all_assignments(model)? {
        if query.evidence.iter().any(|&(v, x)| a[v] != x) {
            continue;
        }
        let p = product_at(model, sel, &a);
        if a[query.target.0] == query.target.1 {
            num = num + p.clone();
        }
        den = den + p;
    }
    if !den.is_pos() {
        return Err(Error::ZeroEvidence);
    }
    Ok(num / den)
}

/// Vertex choices per combination, with the matching joint tables.
type Joints = (Vec<Vec<usize>>, Vec<Vec<f64>>);

/// Joint tables (in floating point) of every type-1 vertex combination.
fn type1_joints(model: &NetworkModel, cap: usize) -> Result<Joints> {
    let mut records = Vec::new();
    for v in 0..model.len() {
        for k in 0..model.parent_config_count(v) {
            let pts: Vec<Vec<f64>> = model
                .local_vertices(v, k)?
                .points
                .iter()
                .map(|p| p.iter().map(rational_to_f64).collect())
                .collect();
            records.push((v, k, pts));
        }
    }
    let count = records.iter().try_fold(1usize, |acc, r| acc.checked_mul(r.2.len()));
    match count {
        Some(c) if c <= cap => {}
        _ => return Err(Error::TooLarge("too many vertex combinations".into())),
    }
    let atoms = all_assignments(model)?;
    let mut joints = Vec::new();
    let mut choice = vec![0usize; records.len()];
    loop {
        let mut sel = PointSelection::<f64> {
            tables: (0..model.len())
                .map(|v| vec![Vec::new(); model.parent_config_count(v)])
                .collect(),
        };
        for ((v, k, pts), &c) in records.iter().zip(&choice) {
            sel.tables[*v][*k] = pts[c].clone();
        }
        joints.push(atoms.iter().map(|a| product_at(model, &sel, a)).collect());
        let mut i = records.len();
        loop {
            if i == 0 {
                return Ok((atoms, joints));
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < records[i].2.len() {
                break;
            }
            choice[i] = 0;
        }
    }
}

/// Subsets of `items`, smallest first.
fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0..1usize << items.len())
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &v)| v)
                .collect()
        })
        .collect();
    out.sort_by_key(Vec::len);
    out
}

/// Value configurations of `nodes`.
fn configurations(model: &NetworkModel, nodes: &[usize]) -> Vec<Vec<(usize, usize)>> {
    let mut out = vec![Vec::new()];
    for &v in nodes {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<(usize, usize)>| {
                (0..model.cardinality(v)).map(move |x| {
                    let mut c = prefix.clone();
                    c.push((v, x));
                    c
                })
            })
            .collect();
    }
    out
}

/// For d-separations `X ⊥ Z | Y` reported by the graph (single-node `X`),
/// checks that the type-1 bounds on `p(x | y, z)` do not depend on `z` and
/// equal those on `p(x | y)`. At most `trials` triples are checked, drawn in
/// a seeded random order.
pub fn check_theorem1(model: &NetworkModel, seed: u64, trials: usize) -> Result<CheckReport> {
    let n = model.len();
    if n > 8 {
        return Err(Error::TooLarge(format!("{n} nodes")));
    }
    let (atoms, joints) = type1_joints(model, 1 << 14)?;
    let mut triples = Vec::new();
    for x in 0..n {
        let rest: Vec<usize> = (0..n).filter(|&v| v != x).collect();
        for z in subsets(&rest).into_iter().filter(|s| !s.is_empty()) {
            let others: Vec<usize> = rest.iter().copied().filter(|v| !z.contains(v)).collect();
            for y in subsets(&others) {
                if model.dag().d_separated(&[x], &z, &y)? {
                    triples.push((x, z.clone(), y));
                }
            }
        }
    }
    triples.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    triples.truncate(trials);

    let bounds = |event: &[(usize, usize)], x: (usize, usize)| -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for joint in &joints {
            let mut num = 0.0;
            let mut den = 0.0;
            for (a, p) in atoms.iter().zip(joint) {
                if event.iter().all(|&(v, val)| a[v] == val) {
                    den += p;
                    if a[x.0] == x.1 {
                        num += p;
                    }
                }
            }
            if den <= 0.0 {
                return None;
            }
            lo = lo.min(num / den);
            hi = hi.max(num / den);
        }
        Some((lo, hi))
    };

    let name = |v: usize| model.variable(v).name.clone();
    let mut report = CheckReport::default();
    for (x, z, y) in triples {
        for xv in 0..model.cardinality(x) {
            for yc in configurations(model, &y) {
                let Some(base) = bounds(&yc, (x, xv)) else {
                    report.skipped += 1;
                    continue;
                };
                for zc in configurations(model, &z) {
                    let mut event = yc.clone();
                    event.extend(zc.iter().copied());
                    let Some(cond) = bounds(&event, (x, xv)) else {
                        report.skipped += 1;
                        continue;
                    };
                    let ctx = || {
                        format!(
                            "{}={} | Y={:?} Z={:?}",
                            name(x),
                            model.variable(x).values[xv],
                            yc.iter().map(|&(v, _)| name(v)).collect::<Vec<_>>(),
                            zc
                        )
                    };
                    report.compare(|| format!("lower {}", ctx()), base.0, cond.0, 1e-6);
                    report.compare(|| format!("upper {}", ctx()), base.1, cond.1, 1e-6);
                }
            }
        }
    }
    Ok(report)
}

/// Evaluates every local constraint, conditioned on each configuration of
/// every subset (up to `max_subset` variables) of the node's replicating
/// set, at every vertex. Conditioning events of probability zero are
/// skipped. The empty subset gives the unreplicated constraints.
pub fn check_lemma2(
    model: &NetworkModel,
    policy: &IrrelevancePolicy,
    system: &ConstraintSystem,
    vertices: &VertexSet<Rational>,
    max_subset: usize,
) -> Result<CheckReport> {
    let atoms = &system.scope;
    let scope: BTreeSet<usize> = atoms.nodes().iter().copied().collect();
    let mut report = CheckReport::default();
    for &v in atoms.nodes() {
        let nd = model.dag().nondescendants(v)?;
        let candidates: Vec<usize> = match policy {
            IrrelevancePolicy::None => Vec::new(),
            IrrelevancePolicy::Nondescendants => nd.iter().copied().collect(),
            IrrelevancePolicy::Explicit(decls) => decls
                .iter()
                .filter(|d| d.target == v)
                .flat_map(|d| d.irrelevant.iter().copied())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
        }
        .into_iter()
        .filter(|u| scope.contains(u) && nd.contains(u) && !model.parents(v).contains(u))
        .collect();
        let subsets: Vec<Vec<usize>> = subsets(&candidates)
            .into_iter()
            .filter(|s| s.len() <= max_subset)
            .collect();
        for k in 0..model.parent_config_count(v) {
            let rows = model.record(v, k).linear_rows()?;
            let parents: Vec<(usize, usize)> = model
                .parents(v)
                .iter()
                .copied()
                .zip(model.parent_assignment(v, k))
                .collect();
            for subset in &subsets {
                for wc in configurations(model, subset) {
                    let mut event = parents.clone();
                    event.extend(wc.iter().copied());
                    for (vi, w) in vertices.iter().enumerate() {
                        let mut mass = Rational::zero();
                        let mut by_value = vec![Rational::zero(); model.cardinality(v)];
                        for (a, p) in w.iter().enumerate() {
                            if event.iter().all(|&(u, x)| atoms.value(a, u) == x) {
                                mass += p;
                                by_value[atoms.value(a, v)] += p;
                            }
                        }
                        if mass.is_zero() {
                            report.skipped += 1;
                            continue;
                        }
                        for (l, (gamma, gamma0, kind)) in rows.iter().enumerate() {
                            let lhs: Rational = gamma
                                .iter()
                                .zip(&by_value)
                                .map(|(g, p)| g * p)
                                .fold(Rational::zero(), |s, t| s + t)
                                / &mass;
                            let ctx = || {
                                format!(
                                    "{} row {l} at {} given {:?}, vertex {vi}",
                                    model.variable(v).name,
                                    model.config_label(v, k),
                                    wc
                                )
                            };
                            let (lhs, bound) = (rational_to_f64(&lhs), rational_to_f64(gamma0));
                            match kind {
                                RowKind::Le => report.at_most(ctx, bound, lhs, 1e-9),
                                RowKind::Eq => report.compare(ctx, bound, lhs, 1e-9),
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Whether every point of `vertices` lies in the probability simplex.
pub fn all_distributions(vertices: &VertexSet<Rational>) -> bool {
    vertices.iter().all(|w| {
        w.iter().all(|x| *x >= Rational::zero()) && w.iter().fold(Rational::zero(), |s, x| s + x) == Rational::one()
    })
}
