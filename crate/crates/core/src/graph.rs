//! Directed acyclic graphs with ancestry queries and d-separation.
//!
//! Nodes are addressed by their position in the declaration order. That order
//! is also the tie-breaker for the topological order, so everything derived
//! from a [`Dag`] is deterministic.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    order: Vec<usize>,
}

impl Dag {
    /// Builds a graph, rejecting unknown endpoints, self-loops, duplicate
    /// edges and directed cycles.
    pub fn new<S: AsRef<str>>(nodes: &[S], edges: &[(S, S)]) -> Result<Self> {
        let names: Vec<String> = nodes.iter().map(|n| n.as_ref().to_string()).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate node `{name}`")));
            }
        }
        let mut parents = vec![Vec::new(); names.len()];
        let mut children = vec![Vec::new(); names.len()];
        let mut edge_list = Vec::with_capacity(edges.len());
        for (from, to) in edges {
            let (from, to) = (from.as_ref(), to.as_ref());
            let p = *index
                .get(from)
                .ok_or_else(|| Error::UnknownNode(from.to_string()))?;
            let c = *index
                .get(to)
                .ok_or_else(|| Error::UnknownNode(to.to_string()))?;
            if p == c {
                return Err(Error::InvalidGraph(format!("self-loop on `{from}`")));
            }
            if parents[c].contains(&p) {
                return Err(Error::InvalidGraph(format!("duplicate edge {from} -> {to}")));
            }
            parents[c].push(p);
            children[p].push(c);
            edge_list.push((p, c));
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }
        let order = kahn_order(&parents, &children).map_err(|cycle| {
            Error::CycleDetected(cycle.into_iter().map(|i| names[i].clone()).collect())
        })?;
        Ok(Self {
            names,
            index,
            edges: edge_list,
            parents,
            children,
            order,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, node: usize) -> &str {
        &self.names[node]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    /// Edges in the order they were declared.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Parents in declaration order.
    pub fn parents(&self, node: usize) -> &[usize] {
        &self.parents[node]
    }

    pub fn children(&self, node: usize) -> &[usize] {
        &self.children[node]
    }

    /// Every parent precedes its children; ties go to the earlier declaration.
    pub fn topological_order(&self) -> &[usize] {
        &self.order
    }

    /// Position of each node in the topological order.
    pub fn topological_rank(&self) -> Vec<usize> {
        let mut rank = vec![0; self.len()];
        for (pos, &node) in self.order.iter().enumerate() {
            rank[node] = pos;
        }
        rank
    }

    /// Nodes reachable from `node` along directed paths (excluding itself).
    pub fn descendants(&self, node: usize) -> Result<BTreeSet<usize>> {
        self.check(node)?;
        Ok(self.closure(&[node], |v| &self.children[v]))
    }

    /// Nodes with a directed path into any of `nodes` (excluding the nodes
    /// themselves unless one is an ancestor of another).
    pub fn ancestors(&self, nodes: &[usize]) -> Result<BTreeSet<usize>> {
        for &n in nodes {
            self.check(n)?;
        }
        Ok(self.closure(nodes, |v| &self.parents[v]))
    }

    /// All nodes that are neither `node` nor one of its descendants.
    pub fn nondescendants(&self, node: usize) -> Result<BTreeSet<usize>> {
        let desc = self.descendants(node)?;
        Ok((0..self.len())
            .filter(|&v| v != node && !desc.contains(&v))
            .collect())
    }

    /// `true` iff every path between `x` and `z` is blocked by `given`.
    ///
    /// Runs a reachability sweep over (node, direction) states, so the cost is
    /// linear in the size of the graph.
    pub fn d_separated(&self, x: &[usize], z: &[usize], given: &[usize]) -> Result<bool> {
        self.check_disjoint(x, z, given)?;
        let reachable = self.active_reachable(x, given);
        Ok(z.iter().all(|v| !reachable[*v]))
    }

    /// Name-based convenience wrapper around [`Dag::d_separated`].
    pub fn d_separated_by_name<S: AsRef<str>>(&self, x: &[S], z: &[S], given: &[S]) -> Result<bool> {
        let resolve = |set: &[S]| -> Result<Vec<usize>> {
            set.iter().map(|n| self.index_of(n.as_ref())).collect()
        };
        self.d_separated(&resolve(x)?, &resolve(z)?, &resolve(given)?)
    }

    /// Nodes connected to `sources` by an active trail given `given`.
    pub(crate) fn active_reachable(&self, sources: &[usize], given: &[usize]) -> Vec<bool> {
        let n = self.len();
        let mut observed = vec![false; n];
        for &g in given {
            observed[g] = true;
        }
        // observed nodes and their ancestors open colliders
        let mut opens_collider = observed.clone();
        let mut stack: Vec<usize> = given.to_vec();
        while let Some(v) = stack.pop() {
            for &p in &self.parents[v] {
                if !opens_collider[p] {
                    opens_collider[p] = true;
                    stack.push(p);
                }
            }
        }

        // direction 0: arrived from a child (moving up), 1: arrived from a parent
        let mut visited = vec![[false; 2]; n];
        let mut reachable = vec![false; n];
        let mut queue: Vec<(usize, usize)> = sources.iter().map(|&s| (s, 0)).collect();
        while let Some((v, dir)) = queue.pop() {
            if visited[v][dir] {
                continue;
            }
            visited[v][dir] = true;
            if !observed[v] {
                reachable[v] = true;
            }
            if dir == 0 {
                if !observed[v] {
                    queue.extend(self.parents[v].iter().map(|&p| (p, 0)));
                    queue.extend(self.children[v].iter().map(|&c| (c, 1)));
                }
            } else {
                if !observed[v] {
                    queue.extend(self.children[v].iter().map(|&c| (c, 1)));
                }
                if opens_collider[v] {
                    queue.extend(self.parents[v].iter().map(|&p| (p, 0)));
                }
            }
        }
        reachable
    }

    pub(crate) fn check(&self, node: usize) -> Result<()> {
        if node < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownNode(format!("#{node}")))
        }
    }

    pub(crate) fn check_disjoint(&self, x: &[usize], z: &[usize], given: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.len()];
        for &v in x.iter().chain(z).chain(given) {
            self.check(v)?;
            if seen[v] {
                return Err(Error::OverlappingSets);
            }
            seen[v] = true;
        }
        Ok(())
    }

    fn closure<'a, F>(&'a self, start: &[usize], next: F) -> BTreeSet<usize>
    where
        F: Fn(usize) -> &'a [usize],
    {
        let mut out = BTreeSet::new();
        let mut stack: Vec<usize> = start.to_vec();
        while let Some(v) = stack.pop() {
            for &w in next(v) {
                if out.insert(w) {
                    stack.push(w);
                }
            }
        }
        out
    }
}

/// Kahn elimination picking the lowest declared index among ready nodes.
/// On failure returns one directed cycle (first node repeated at the end).
fn kahn_order(parents: &[Vec<usize>], children: &[Vec<usize>]) -> std::result::Result<Vec<usize>, Vec<usize>> {
    let n = parents.len();
    let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop_first() {
        order.push(v);
        for &c in &children[v] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.insert(c);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // every remaining node has a remaining parent; walk parents until a repeat
    let remaining: Vec<bool> = (0..n).map(|v| indegree[v] > 0).collect();
    let start = (0..n).find(|&v| remaining[v]).expect("a node is left over");
    let mut path = vec![start];
    let mut pos = vec![usize::MAX; n];
    pos[start] = 0;
    let mut v = start;
    loop {
        let p = *parents[v]
            .iter()
            .find(|&&p| remaining[p])
            .expect("remaining node has a remaining parent");
        if pos[p] != usize::MAX {
            let mut cycle: Vec<usize> = path[pos[p]..].to_vec();
            cycle.reverse();
            cycle.push(cycle[0]);
            return Err(cycle);
        }
        pos[p] = path.len();
        path.push(p);
        v = p;
    }
}
