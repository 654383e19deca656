use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{Graph, Vertex};

/// Path on `n` vertices, 0-1-...-(n-1).
pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    Graph::from_edges(n, &edges).expect("valid path")
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "cycle needs at least 3 vertices");
    let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    edges.push((n - 1, 0));
    Graph::from_edges(n, &edges).expect("valid cycle")
}

pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    Graph::from_edges(n, &edges).expect("valid clique")
}

/// Star with centre 0 and `leaves` leaves.
pub fn star(leaves: usize) -> Graph {
    let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
    Graph::from_edges(leaves + 1, &edges).expect("valid star")
}

pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..a {
        for v in a..a + b {
            edges.push((u, v));
        }
    }
    Graph::from_edges(a + b, &edges).expect("valid biclique")
}

/// Uniform random labelled tree via a random parent attachment.
pub fn random_tree<R: Rng>(n: usize, rng: &mut R) -> Graph {
    let mut order: Vec<Vertex> = (0..n).collect();
    order.shuffle(rng);
    let mut g = Graph::new(n);
    for i in 1..n {
        let p = order[rng.gen_range(0..i)];
        g.add_edge(order[i], p).expect("tree edge");
    }
    g
}

/// Random tree plus each remaining pair independently with probability `p`.
pub fn random_connected<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut g = random_tree(n, rng);
    for u in 0..n {
        for v in u + 1..n {
            if !g.has_edge(u, v) && rng.gen_bool(p) {
                g.add_edge(u, v).expect("fresh edge");
            }
        }
    }
    g
}

/// Random forest: a random tree with each edge dropped with probability `p_cut`.
pub fn random_forest<R: Rng>(n: usize, p_cut: f64, rng: &mut R) -> Graph {
    let t = random_tree(n, rng);
    let kept: Vec<_> = t.edges().filter(|_| !rng.gen_bool(p_cut)).collect();
    Graph::from_edges(n, &kept).expect("subforest")
}
