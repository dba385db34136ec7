use std::collections::BTreeSet;

use super::{Permutation, SparsityPattern};

/// Minimum-degree fill-reducing ordering on the explicit elimination graph.
///
/// At every step the vertex of smallest current degree is eliminated and its
/// neighbours are joined into a clique. Ties go to the smallest original index,
/// so the result depends only on the pattern.
pub fn min_degree_order(pattern: &SparsityPattern) -> Permutation {
    let n = pattern.order();
    let mut adj: Vec<BTreeSet<usize>> = pattern
        .adjacency()
        .into_iter()
        .map(|a| a.into_iter().collect())
        .collect();
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (adj[v].len(), v)).collect();
    let mut order = Vec::with_capacity(n);

    while let Some((_, v)) = queue.pop_first() {
        order.push(v);
        let nbrs: Vec<usize> = std::mem::take(&mut adj[v]).into_iter().collect();
        for &u in &nbrs {
            queue.remove(&(adj[u].len(), u));
            adj[u].remove(&v);
        }
        for (k, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[k + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        for &u in &nbrs {
            queue.insert((adj[u].len(), u));
        }
    }

    Permutation::new(order).expect("elimination visits every vertex once")
}
