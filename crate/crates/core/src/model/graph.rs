use serde::{Deserialize, Serialize};

use super::{InterconnectionMatrix, ModelError};

/// Undirected simple graph on `order` nodes, stored as sorted neighbour lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Wire", into = "Wire")]
pub struct AdjacencyMatrix {
    neighbors: Vec<Vec<usize>>,
}

impl AdjacencyMatrix {
    pub fn from_edges(
        order: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, ModelError> {
        let mut neighbors = vec![Vec::new(); order];
        for (i, j) in edges {
            if i >= order || j >= order {
                return Err(ModelError::InvalidAdjacency(format!(
                    "edge ({i}, {j}) outside {order} nodes"
                )));
            }
            if i == j {
                return Err(ModelError::InvalidAdjacency(format!("self loop at {i}")));
            }
            neighbors[i].push(j);
            neighbors[j].push(i);
        }
        for (i, n) in neighbors.iter_mut().enumerate() {
            n.sort_unstable();
            if n.windows(2).any(|w| w[0] == w[1]) {
                return Err(ModelError::InvalidAdjacency(format!(
                    "repeated edge at node {i}"
                )));
            }
        }
        Ok(Self { neighbors })
    }

    /// From a dense 0-1 matrix; must be symmetric with zero diagonal.
    pub fn from_dense(rows: &[Vec<u8>]) -> Result<Self, ModelError> {
        let n = rows.len();
        let mut edges = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(ModelError::InvalidAdjacency("matrix is not square".into()));
            }
            for (j, &a) in row.iter().enumerate() {
                match a {
                    0 => {}
                    1 if i == j => {
                        return Err(ModelError::InvalidAdjacency(format!(
                            "nonzero diagonal at {i}"
                        )))
                    }
                    1 => {
                        if rows[j][i] != 1 {
                            return Err(ModelError::InvalidAdjacency(format!(
                                "asymmetric at ({i}, {j})"
                            )));
                        }
                        if i < j {
                            edges.push((i, j));
                        }
                    }
                    v => {
                        return Err(ModelError::InvalidAdjacency(format!(
                            "entry ({i}, {j}) = {v} is not 0 or 1"
                        )))
                    }
                }
            }
        }
        Self::from_edges(n, edges)
    }

    pub fn path(order: usize) -> Self {
        Self::from_edges(order, (1..order).map(|i| (i - 1, i))).expect("path graph is simple")
    }

    pub fn order(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::with_capacity(self.edge_count());
        for (i, n) in self.neighbors.iter().enumerate() {
            e.extend(n.iter().filter(|&&j| j > i).map(|&j| (i, j)));
        }
        e
    }

    pub fn is_connected(&self) -> bool {
        let n = self.order();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in &self.neighbors[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == n
    }

    pub fn is_tree(&self) -> bool {
        self.order() > 0 && self.edge_count() + 1 == self.order() && self.is_connected()
    }
}

/// Scans the adjacency matrix row by row. For every `A_ij = 1` the next free
/// input of `i` is wired to the next free output of `j`. Subsystem `i` gets
/// `degree(i)` inputs and outputs; isolated nodes get none.
pub fn build_interconnection(adj: &AdjacencyMatrix) -> InterconnectionMatrix {
    let deg = adj.degrees();
    let mut input_next = vec![0usize; adj.order()];
    let mut output_next = vec![0usize; adj.order()];
    let mut offset = 0;
    let offsets: Vec<usize> = deg
        .iter()
        .map(|&d| {
            offset += d;
            offset - d
        })
        .collect();
    let mut entries = Vec::with_capacity(offset);
    for i in 0..adj.order() {
        // Neighbour lists are sorted, matching a column scan of row i.
        for &j in adj.neighbors(i) {
            entries.push((offsets[i] + input_next[i], offsets[j] + output_next[j]));
            input_next[i] += 1;
            output_next[j] += 1;
        }
    }
    InterconnectionMatrix::new(deg.clone(), deg, entries)
        .expect("each input is assigned exactly once")
}

/// Chain with scalar end channels and two channels for interior subsystems:
/// `w^i_1 = z^{i-1}_2`, `w^i_2 = z^{i+1}_1`, `w^1 = z^2_1`, `w^N = z^{N-1}_last`.
pub fn chain_interconnection(n: usize) -> Result<InterconnectionMatrix, ModelError> {
    if n < 2 {
        return Err(ModelError::ChainTooShort(n));
    }
    let dims: Vec<usize> = (0..n)
        .map(|i| if i == 0 || i == n - 1 { 1 } else { 2 })
        .collect();
    let mut off = vec![0; n + 1];
    for i in 0..n {
        off[i + 1] = off[i] + dims[i];
    }
    // Channel of subsystem i facing its left (resp. right) neighbour.
    let left = |i: usize| off[i];
    let right = |i: usize| off[i + 1] - 1;
    let mut entries = Vec::with_capacity(2 * n - 2);
    for i in 0..n {
        if i > 0 {
            entries.push((left(i), right(i - 1)));
        }
        if i + 1 < n {
            entries.push((right(i), left(i + 1)));
        }
    }
    InterconnectionMatrix::new(dims.clone(), dims, entries)
}

#[derive(Serialize, Deserialize)]
struct Wire {
    order: usize,
    edges: Vec<(usize, usize)>,
}

impl From<AdjacencyMatrix> for Wire {
    fn from(a: AdjacencyMatrix) -> Self {
        Wire {
            order: a.order(),
            edges: a.edges(),
        }
    }
}

impl TryFrom<Wire> for AdjacencyMatrix {
    type Error = ModelError;

    fn try_from(w: Wire) -> Result<Self, ModelError> {
        AdjacencyMatrix::from_edges(w.order, w.edges)
    }
}
