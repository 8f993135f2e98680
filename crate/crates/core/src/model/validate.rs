use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{
    IrrelevanceDeclaration, IrrelevancePolicy, LocalRecord, LocalSpec, NetworkDocument, NetworkModel, RawPolicy,
    Variable,
};
use crate::error::Error;
use crate::graph::Dag;
use crate::scalar::{ratio, Rational};
use crate::solve::{solve_lp, LinearProgram, LpStatus, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Structure,
    Cycle,
    Coverage,
    SeparateSpecification,
    RowKey,
    Length,
    Negative,
    Normalization,
    IntervalBounds,
    EmptyCredalSet,
    Irrelevance,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::Structure => "structure",
            Rule::Cycle => "cycle",
            Rule::Coverage => "coverage",
            Rule::SeparateSpecification => "separate-specification",
            Rule::RowKey => "row-key",
            Rule::Length => "length",
            Rule::Negative => "negative",
            Rule::Normalization => "normalization",
            Rule::IntervalBounds => "interval-bounds",
            Rule::EmptyCredalSet => "empty-credal-set",
            Rule::Irrelevance => "irrelevance",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub rule: Rule,
    pub node: Option<String>,
    /// Row key of the offending record, when there is one.
    pub config: Option<String>,
    pub message: String,
    /// Offending cycle for [`Rule::Cycle`].
    pub cycle: Vec<String>,
}

impl Diagnostic {
    fn new(rule: Rule, node: Option<&str>, config: Option<&str>, message: impl Into<String>) -> Self {
        Self {
            rule,
            node: node.map(str::to_string),
            config: config.map(str::to_string),
            message: message.into(),
            cycle: Vec::new(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.rule.as_str())?;
        if let Some(node) = &self.node {
            write!(f, " node {node}")?;
        }
        if let Some(config) = &self.config {
            write!(f, " at `{config}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

const SUM_TOL: (i64, i64) = (1, 1_000_000_000);

/// Checks every model invariant; an empty list means the document is valid.
pub fn validate(doc: &NetworkDocument) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let mut names = BTreeSet::new();
    for v in &doc.variables {
        if v.name.is_empty() || v.name.contains([',', '=']) {
            out.push(Diagnostic::new(
                Rule::Structure,
                Some(&v.name),
                None,
                "variable names must be nonempty and free of `,` and `=`",
            ));
        }
        if !names.insert(v.name.as_str()) {
            out.push(Diagnostic::new(Rule::Structure, Some(&v.name), None, "duplicate variable"));
        }
        if v.values.is_empty() {
            out.push(Diagnostic::new(Rule::Structure, Some(&v.name), None, "variable has no values"));
        }
        let mut seen = BTreeSet::new();
        for value in &v.values {
            if !seen.insert(value) {
                out.push(Diagnostic::new(
                    Rule::Structure,
                    Some(&v.name),
                    None,
                    format!("duplicate value `{value}`"),
                ));
            }
        }
    }
    if !out.is_empty() {
        return out;
    }

    let node_names: Vec<&str> = doc.variables.iter().map(|v| v.name.as_str()).collect();
    let edges: Vec<(&str, &str)> = doc.edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let dag = match Dag::new(&node_names, &edges) {
        Ok(d) => d,
        Err(Error::CycleDetected(cycle)) => {
            let mut d = Diagnostic::new(Rule::Cycle, None, None, format!("directed cycle {}", cycle.join(" -> ")));
            d.cycle = cycle;
            out.push(d);
            return out;
        }
        Err(e) => {
            out.push(Diagnostic::new(Rule::Structure, None, None, e.to_string()));
            return out;
        }
    };

    let locals: BTreeMap<&str, &super::RawLocal> = doc.local.iter().map(|(n, l)| (n.as_str(), l)).collect();
    for name in locals.keys() {
        if dag.index_of(name).is_err() {
            out.push(Diagnostic::new(
                Rule::Structure,
                Some(name),
                None,
                "local specification for an undeclared variable",
            ));
        }
    }

    for (node, var) in doc.variables.iter().enumerate() {
        let Some(spec) = locals.get(var.name.as_str()) else {
            out.push(Diagnostic::new(
                Rule::Coverage,
                Some(&var.name),
                None,
                "missing local specification",
            ));
            continue;
        };
        let parents = dag.parents(node);
        let configs: usize = parents.iter().map(|&p| doc.variables[p].values.len()).product();
        let mut covered = vec![false; configs];
        for (key, record) in &spec.rows {
            let assignment = match parse_key(&dag, &doc.variables, node, key) {
                Ok(a) => a,
                Err(d) => {
                    out.push(d);
                    continue;
                }
            };
            if assignment.iter().any(Option::is_none) {
                let spanned: usize = parents
                    .iter()
                    .zip(&assignment)
                    .filter(|(_, a)| a.is_none())
                    .map(|(&p, _)| doc.variables[p].values.len())
                    .product();
                out.push(Diagnostic::new(
                    Rule::SeparateSpecification,
                    Some(&var.name),
                    Some(key),
                    format!("row spans {spanned} parent configurations; each record must fix every parent"),
                ));
                continue;
            }
            let k = parents.iter().zip(&assignment).fold(0, |acc, (&p, a)| {
                acc * doc.variables[p].values.len() + a.expect("full assignment")
            });
            if covered[k] {
                out.push(Diagnostic::new(
                    Rule::RowKey,
                    Some(&var.name),
                    Some(key),
                    "duplicate record for this parent configuration",
                ));
                continue;
            }
            covered[k] = true;
            check_record(&mut out, &var.name, key, record, var.values.len());
        }
        for (k, done) in covered.iter().enumerate() {
            if !done {
                out.push(Diagnostic::new(
                    Rule::Coverage,
                    Some(&var.name),
                    Some(&label(&dag, &doc.variables, node, k)),
                    "no record for this parent configuration",
                ));
            }
        }
    }

    if let RawPolicy::Explicit(decls) = &doc.irrelevance {
        for (target, irrelevant) in decls {
            let Ok(t) = dag.index_of(target) else {
                out.push(Diagnostic::new(
                    Rule::Irrelevance,
                    Some(target),
                    None,
                    "declaration targets an undeclared variable",
                ));
                continue;
            };
            let mut ws = Vec::new();
            for w in irrelevant {
                match dag.index_of(w) {
                    Ok(i) => ws.push(i),
                    Err(_) => out.push(Diagnostic::new(
                        Rule::Irrelevance,
                        Some(target),
                        None,
                        format!("unknown variable `{w}` in declaration"),
                    )),
                }
            }
            if let Err(d) = check_declaration(&dag, t, &ws) {
                out.push(d);
            }
        }
    }
    out
}

/// Declared irrelevant variables must be nondescendants that are not parents.
pub(crate) fn check_declaration(dag: &Dag, target: usize, irrelevant: &[usize]) -> Result<(), Diagnostic> {
    let nd = dag.nondescendants(target).map_err(|e| {
        Diagnostic::new(Rule::Irrelevance, None, None, e.to_string())
    })?;
    for &w in irrelevant {
        if !nd.contains(&w) || dag.parents(target).contains(&w) {
            return Err(Diagnostic::new(
                Rule::Irrelevance,
                Some(dag.name(target)),
                None,
                format!(
                    "`{}` is not a nondescendant outside the parents; only such declarations are supported",
                    dag.name(w)
                ),
            ));
        }
    }
    Ok(())
}

/// Value per parent (in parent order); `None` for parents the key omits.
fn parse_key(dag: &Dag, vars: &[Variable], node: usize, key: &str) -> Result<Vec<Option<usize>>, Diagnostic> {
    let name = vars[node].name.as_str();
    let parents = dag.parents(node);
    let mut out = vec![None; parents.len()];
    if key.trim().is_empty() {
        return Ok(out);
    }
    for part in key.split(',') {
        let bad = |msg: String| Diagnostic::new(Rule::RowKey, Some(name), Some(key), msg);
        let (var, value) = part
            .split_once('=')
            .ok_or_else(|| bad(format!("`{part}` is not a Var=value assignment")))?;
        let (var, value) = (var.trim(), value.trim());
        let p = dag
            .index_of(var)
            .map_err(|_| bad(format!("unknown variable `{var}`")))?;
        let slot = parents
            .iter()
            .position(|&q| q == p)
            .ok_or_else(|| bad(format!("`{var}` is not a parent")))?;
        let v = vars[p]
            .values
            .iter()
            .position(|x| x == value)
            .ok_or_else(|| bad(format!("`{value}` is not a value of `{var}`")))?;
        if out[slot].replace(v).is_some() {
            return Err(bad(format!("`{var}` assigned twice")));
        }
    }
    Ok(out)
}

fn label(dag: &Dag, vars: &[Variable], node: usize, mut k: usize) -> String {
    let parents = dag.parents(node);
    let mut parts = vec![String::new(); parents.len()];
    for (slot, &p) in parents.iter().enumerate().rev() {
        let card = vars[p].values.len();
        parts[slot] = format!("{}={}", vars[p].name, vars[p].values[k % card]);
        k /= card;
    }
    parts.join(",")
}

fn check_distribution(out: &mut Vec<Diagnostic>, node: &str, key: &str, p: &[Rational], card: usize) {
    if p.len() != card {
        out.push(Diagnostic::new(
            Rule::Length,
            Some(node),
            Some(key),
            format!("expected {card} entries, found {}", p.len()),
        ));
        return;
    }
    if p.iter().any(Signed::is_negative) {
        out.push(Diagnostic::new(Rule::Negative, Some(node), Some(key), "negative probability"));
    }
    let total: Rational = p.iter().sum();
    if (total.clone() - Rational::one()).abs() > ratio(SUM_TOL.0, SUM_TOL.1) {
        out.push(Diagnostic::new(
            Rule::Normalization,
            Some(node),
            Some(key),
            format!("probabilities sum to {total}, not 1"),
        ));
    }
}

fn check_record(out: &mut Vec<Diagnostic>, node: &str, key: &str, record: &LocalRecord, card: usize) {
    match record {
        LocalRecord::Point(p) => check_distribution(out, node, key, p, card),
        LocalRecord::Vertices(vs) => {
            if vs.is_empty() {
                out.push(Diagnostic::new(Rule::EmptyCredalSet, Some(node), Some(key), "no vertices"));
            }
            for v in vs {
                check_distribution(out, node, key, v, card);
            }
        }
        LocalRecord::Interval { lower, upper } => {
            if lower.len() != card || upper.len() != card {
                out.push(Diagnostic::new(
                    Rule::Length,
                    Some(node),
                    Some(key),
                    format!("expected {card} lower and upper bounds"),
                ));
                return;
            }
            let zero = Rational::zero();
            let one = Rational::one();
            if lower.iter().zip(upper).any(|(l, u)| *l < zero || l > u || *u > one) {
                out.push(Diagnostic::new(
                    Rule::IntervalBounds,
                    Some(node),
                    Some(key),
                    "bounds must satisfy 0 <= lower <= upper <= 1",
                ));
            }
            let lo: Rational = lower.iter().sum();
            let hi: Rational = upper.iter().sum();
            if lo > one || hi < one {
                out.push(Diagnostic::new(
                    Rule::EmptyCredalSet,
                    Some(node),
                    Some(key),
                    format!("sum of lower bounds {lo} and of upper bounds {hi} must bracket 1"),
                ));
            }
        }
        LocalRecord::Constraints(rows) => {
            if rows.iter().any(|r| r.coefficients.len() != card) {
                out.push(Diagnostic::new(
                    Rule::Length,
                    Some(node),
                    Some(key),
                    format!("every constraint needs {card} coefficients"),
                ));
                return;
            }
            let mut lp = LinearProgram::new(vec![Rational::zero(); card], Sense::Max)
                .with_eq(vec![Rational::one(); card], Rational::one());
            for r in rows {
                lp = lp.with_le(r.coefficients.clone(), r.bound.clone());
            }
            if solve_lp(&lp).status == LpStatus::Infeasible {
                out.push(Diagnostic::new(
                    Rule::EmptyCredalSet,
                    Some(node),
                    Some(key),
                    "constraints admit no distribution",
                ));
            }
        }
    }
}

/// Indexes a document that passed [`validate`].
pub(crate) fn build(doc: NetworkDocument) -> NetworkModel {
    let node_names: Vec<&str> = doc.variables.iter().map(|v| v.name.as_str()).collect();
    let edges: Vec<(&str, &str)> = doc.edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let dag = Dag::new(&node_names, &edges).expect("validated graph");
    let mut locals = Vec::with_capacity(doc.variables.len());
    for (node, var) in doc.variables.iter().enumerate() {
        let (_, spec) = doc
            .local
            .iter()
            .find(|(n, _)| *n == var.name)
            .expect("validated coverage");
        let parents = dag.parents(node);
        let configs: usize = parents.iter().map(|&p| doc.variables[p].values.len()).product();
        let mut records: Vec<Option<LocalRecord>> = vec![None; configs];
        for (key, record) in &spec.rows {
            let assignment = parse_key(&dag, &doc.variables, node, key).expect("validated key");
            let k = parents.iter().zip(&assignment).fold(0, |acc, (&p, a)| {
                acc * doc.variables[p].values.len() + a.expect("validated key")
            });
            records[k] = Some(record.clone());
        }
        locals.push(LocalSpec {
            records: records.into_iter().map(|r| r.expect("validated coverage")).collect(),
        });
    }
    let policy = match doc.irrelevance {
        RawPolicy::None => IrrelevancePolicy::None,
        RawPolicy::Nondescendants => IrrelevancePolicy::Nondescendants,
        RawPolicy::Explicit(decls) => IrrelevancePolicy::Explicit(
            decls
                .into_iter()
                .map(|(t, ws)| IrrelevanceDeclaration {
                    target: dag.index_of(&t).expect("validated"),
                    irrelevant: ws.iter().map(|w| dag.index_of(w).expect("validated")).collect(),
                })
                .collect(),
        ),
    };
    NetworkModel::from_parts(dag, doc.variables, locals, policy)
}
