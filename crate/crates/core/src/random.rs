//! Seeded generators of random graphs, networks and fractional programs
//! for property tests.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Dag;
use crate::model::{LocalKind, LocalRecord, NetworkDocument, NetworkModel, RawLocal, RawPolicy, Variable};
use crate::scalar::{ratio, Rational};
use crate::solve::FractionalProgram;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Edges `(parent, child)` over `n` nodes: a random order, then each
/// forward pair independently with probability `density`, keeping at most
/// `max_parents` parents per node.
pub fn random_edges(rng: &mut TestRng, n: usize, density: f64, max_parents: usize) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for j in 1..n {
        let mut parents: Vec<usize> = (0..j).filter(|_| rng.gen_bool(density)).collect();
        parents.shuffle(rng);
        parents.truncate(max_parents);
        parents.sort_unstable();
        edges.extend(parents.into_iter().map(|i| (order[i], order[j])));
    }
    edges
}

pub fn random_dag(rng: &mut TestRng, n: usize, density: f64) -> Dag {
    let names: Vec<String> = (0..n).map(node_name).collect();
    let edges: Vec<(String, String)> = random_edges(rng, n, density, n)
        .into_iter()
        .map(|(a, b)| (names[a].clone(), names[b].clone()))
        .collect();
    Dag::new(&names, &edges).expect("forward edges form a DAG")
}

fn node_name(i: usize) -> String {
    format!("V{i}")
}

/// Shape of a random network.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkShape {
    pub nodes: usize,
    pub cardinality: usize,
    pub density: f64,
    pub max_parents: usize,
    /// Chance that a node gets interval records rather than point records.
    pub credal: f64,
    /// Every probability stays at or above `floor` hundredths.
    pub floor: i64,
}

impl Default for NetworkShape {
    fn default() -> Self {
        Self {
            nodes: 4,
            cardinality: 2,
            density: 0.5,
            max_parents: 2,
            credal: 1.0,
            floor: 5,
        }
    }
}

/// A random distribution in hundredths with every entry `≥ floor`.
fn hundredths(rng: &mut TestRng, card: usize, floor: i64) -> Vec<i64> {
    let spare = 100 - floor * card as i64;
    assert!(spare >= 0, "floor too high for the cardinality");
    let mut cuts: Vec<i64> = (0..card - 1).map(|_| rng.gen_range(0..=spare)).collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(card);
    let mut prev = 0;
    for c in cuts.into_iter().chain([spare]) {
        out.push(floor + c - prev);
        prev = c;
    }
    out
}

/// Interval record around a random distribution, never below `floor`.
fn random_interval(rng: &mut TestRng, card: usize, floor: i64) -> LocalRecord {
    let centre = hundredths(rng, card, floor + 5);
    let lower = centre
        .iter()
        .map(|&c| ratio(c - rng.gen_range(0..=5), 100))
        .collect();
    let upper = centre
        .iter()
        .map(|&c| ratio(c + rng.gen_range(0..=5), 100))
        .collect();
    LocalRecord::Interval { lower, upper }
}

pub fn random_network(rng: &mut TestRng, shape: &NetworkShape, policy: RawPolicy) -> NetworkModel {
    let n = shape.nodes;
    let values: Vec<String> = (0..shape.cardinality).map(|j| format!("s{j}")).collect();
    let variables: Vec<Variable> = (0..n)
        .map(|i| Variable {
            name: node_name(i),
            values: values.clone(),
        })
        .collect();
    let edges = random_edges(rng, n, shape.density, shape.max_parents);
    let mut local = Vec::with_capacity(n);
    for v in 0..n {
        let mut parents: Vec<usize> = edges.iter().filter(|e| e.1 == v).map(|e| e.0).collect();
        parents.sort_unstable();
        let credal = rng.gen_bool(shape.credal);
        let configs = shape.cardinality.pow(parents.len() as u32);
        let mut rows = Vec::with_capacity(configs);
        for mut k in 0..configs {
            let mut assignment = vec![0; parents.len()];
            for slot in (0..parents.len()).rev() {
                assignment[slot] = k % shape.cardinality;
                k /= shape.cardinality;
            }
            let key = parents
                .iter()
                .zip(&assignment)
                .map(|(&p, &x)| format!("{}={}", node_name(p), values[x]))
                .collect::<Vec<_>>()
                .join(",");
            let record = if credal {
                random_interval(rng, shape.cardinality, shape.floor)
            } else {
                LocalRecord::Point(
                    hundredths(rng, shape.cardinality, shape.floor)
                        .into_iter()
                        .map(|c| ratio(c, 100))
                        .collect(),
                )
            };
            rows.push((key, record));
        }
        let kind = if credal { LocalKind::Interval } else { LocalKind::Point };
        local.push((node_name(v), RawLocal { kind, rows }));
    }
    let doc = NetworkDocument {
        variables,
        edges: edges
            .into_iter()
            .map(|(a, b)| (node_name(a), node_name(b)))
            .collect(),
        local,
        irrelevance: policy,
    };
    NetworkModel::from_document(doc).expect("generated networks are valid")
}

/// A feasible fractional program over `dimension` weights with a strictly
/// positive denominator: random homogeneous rows oriented to hold at a
/// random interior point, plus one upper bound on a coordinate.
pub fn random_fractional(rng: &mut TestRng, dimension: usize, rows: usize) -> FractionalProgram<Rational> {
    let interior: Vec<i64> = (0..dimension).map(|_| rng.gen_range(1..=9)).collect();
    let denominator: Vec<Rational> = (0..dimension).map(|_| ratio(rng.gen_range(1..=10), 10)).collect();
    let numerator: Vec<Rational> = denominator
        .iter()
        .map(|d| d * ratio(rng.gen_range(0..=10), 10))
        .collect();
    let mut fp = FractionalProgram::new(numerator, denominator);
    for _ in 0..rows {
        let mut a: Vec<i64> = (0..dimension).map(|_| rng.gen_range(-3..=3)).collect();
        let at: i64 = a.iter().zip(&interior).map(|(x, y)| x * y).sum();
        if at > 0 {
            a.iter_mut().for_each(|x| *x = -*x);
        }
        fp.le_rows.push(a.into_iter().map(|x| ratio(x, 1)).collect());
    }
    let j = rng.gen_range(0..dimension);
    let total: i64 = interior.iter().sum();
    let mut e = vec![ratio(0, 1); dimension];
    e[j] = ratio(1, 1);
    fp.extra_rows.push((e, ratio(interior[j] + rng.gen_range(0..=total), total)));
    fp
}
