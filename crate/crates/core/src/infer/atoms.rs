use crate::model::NetworkModel;

/// Bijection between joint assignments of a node subset and flat indices.
///
/// Nodes are taken in topological order and each node's values in declared
/// order; the first node varies slowest. For the two roots `F, B` of a
/// binary network this gives atoms `(fb, fb^c, f^cb, f^cb^c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomIndexer {
    nodes: Vec<usize>,
    cards: Vec<usize>,
    strides: Vec<usize>,
    slot: Vec<Option<usize>>,
    len: usize,
}

impl AtomIndexer {
    pub fn new(model: &NetworkModel, scope: impl IntoIterator<Item = usize>) -> Self {
        let rank = model.dag().topological_rank();
        let mut nodes: Vec<usize> = scope.into_iter().collect();
        nodes.sort_unstable_by_key(|&v| rank[v]);
        nodes.dedup();
        let cards: Vec<usize> = nodes.iter().map(|&v| model.cardinality(v)).collect();
        let mut strides = vec![1; nodes.len()];
        for i in (0..nodes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * cards[i + 1];
        }
        let mut slot = vec![None; model.len()];
        for (i, &v) in nodes.iter().enumerate() {
            slot[v] = Some(i);
        }
        let len = cards.iter().product();
        Self {
            nodes,
            cards,
            strides,
            slot,
            len,
        }
    }

    /// Indexer over every node of the model.
    pub fn full(model: &NetworkModel) -> Self {
        Self::new(model, 0..model.len())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Nodes covered, in atom order.
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn contains(&self, node: usize) -> bool {
        self.slot.get(node).is_some_and(Option::is_some)
    }

    /// Index of the atom matching a full (model-length) assignment.
    pub fn index(&self, assignment: &[usize]) -> usize {
        self.nodes
            .iter()
            .zip(&self.strides)
            .map(|(&v, s)| assignment[v] * s)
            .sum()
    }

    /// Value of `node` in atom `atom`; the node must be in scope.
    pub fn value(&self, atom: usize, node: usize) -> usize {
        let i = self.slot[node].expect("node outside the atom scope");
        (atom / self.strides[i]) % self.cards[i]
    }

    /// Writes the atom's values into a model-length assignment.
    pub fn decode_into(&self, atom: usize, assignment: &mut [usize]) {
        for (i, &v) in self.nodes.iter().enumerate() {
            assignment[v] = (atom / self.strides[i]) % self.cards[i];
        }
    }

    pub fn matches(&self, atom: usize, pairs: &[(usize, usize)]) -> bool {
        pairs.iter().all(|&(v, x)| self.value(atom, v) == x)
    }

    /// `F=f,B=b`-style label of an atom.
    pub fn label(&self, model: &NetworkModel, atom: usize) -> String {
        self.nodes
            .iter()
            .map(|&v| {
                let var = model.variable(v);
                format!("{}={}", var.name, var.values[self.value(atom, v)])
            })
            .collect::<Vec<_>>()
            .join(",")
    }
}
