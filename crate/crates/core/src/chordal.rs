//! Chordality by maximum cardinality search.

use crate::graph::{Graph, Vertex};

/// Visit order of maximum cardinality search, ties to the smallest id.
pub fn maximum_cardinality_search(g: &Graph) -> Vec<Vertex> {
    let n = g.n();
    let mut weight = vec![0usize; n];
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n).filter(|&v| !done[v]).max_by_key(|&v| (weight[v], std::cmp::Reverse(v))).unwrap();
        done[v] = true;
        order.push(v);
        for &w in g.neighbors(v) {
            if !done[w] {
                weight[w] += 1;
            }
        }
    }
    order
}

/// True when `order` is a perfect elimination ordering: the neighbours of
/// each vertex that come after it form a clique.
pub fn is_perfect_elimination_ordering(g: &Graph, order: &[Vertex]) -> bool {
    let n = g.n();
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    if order.len() != n || pos.contains(&usize::MAX) {
        return false;
    }
    for &v in order {
        let later: Vec<Vertex> = g.neighbors(v).iter().copied().filter(|&w| pos[w] > pos[v]).collect();
        // Enough to check that the first later neighbour sees all others;
        // its own check then propagates the clique.
        if let Some(&u) = later.iter().min_by_key(|&&w| pos[w]) {
            if !later.iter().all(|&w| w == u || g.has_edge(u, w)) {
                return false;
            }
        }
    }
    true
}

pub fn is_chordal(g: &Graph) -> bool {
    let mut order = maximum_cardinality_search(g);
    order.reverse();
    is_perfect_elimination_ordering(g, &order)
}
