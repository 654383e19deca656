//! Isomorphism-free enumeration of small connected graphs.
//!
//! Canonical forms come from partition refinement plus individualization,
//! taking the least adjacency code over the search leaves. Twin vertices
//! are interchangeable, so only one of each twin class is individualized.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::graph::{Graph, Vertex};

/// Largest vertex count whose upper triangle fits the 128-bit code.
pub const MAX_CATALOG_N: usize = 16;

fn refine(g: &Graph, mut cells: Vec<Vec<Vertex>>) -> Vec<Vec<Vertex>> {
    'again: loop {
        for s in 0..cells.len() {
            let mut in_splitter = vec![false; g.n()];
            for &v in &cells[s] {
                in_splitter[v] = true;
            }
            let mut next = Vec::with_capacity(cells.len() + 1);
            let mut split = false;
            for cell in &cells {
                if cell.len() == 1 {
                    next.push(cell.clone());
                    continue;
                }
                let mut keyed: Vec<(usize, Vertex)> = cell
                    .iter()
                    .map(|&v| (g.neighbors(v).iter().filter(|&&u| in_splitter[u]).count(), v))
                    .collect();
                keyed.sort_unstable();
                let mut start = 0;
                for i in 1..=keyed.len() {
                    if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                        next.push(keyed[start..i].iter().map(|&(_, v)| v).collect());
                        split |= start > 0 || i < keyed.len();
                        start = i;
                    }
                }
            }
            if split {
                cells = next;
                continue 'again;
            }
        }
        return cells;
    }
}

fn twins(g: &Graph, u: Vertex, v: Vertex) -> bool {
    let a = g.neighbors(u).iter().filter(|&&x| x != v);
    let b = g.neighbors(v).iter().filter(|&&x| x != u);
    a.eq(b)
}

fn code_of(g: &Graph, order: &[Vertex]) -> u128 {
    let mut code = 0u128;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            code = (code << 1) | g.has_edge(order[i], order[j]) as u128;
        }
    }
    code
}

fn search(g: &Graph, cells: Vec<Vec<Vertex>>, best: &mut Option<(u128, Vec<Vertex>)>) {
    let cells = refine(g, cells);
    let Some(ci) = cells.iter().position(|c| c.len() > 1) else {
        let order: Vec<Vertex> = cells.iter().map(|c| c[0]).collect();
        let code = code_of(g, &order);
        if best.as_ref().is_none_or(|(b, _)| code < *b) {
            *best = Some((code, order));
        }
        return;
    };
    let mut tried: Vec<Vertex> = Vec::new();
    for &v in &cells[ci] {
        if tried.iter().any(|&u| twins(g, u, v)) {
            continue;
        }
        tried.push(v);
        let mut next = cells[..ci].to_vec();
        next.push(vec![v]);
        next.push(cells[ci].iter().copied().filter(|&u| u != v).collect());
        next.extend_from_slice(&cells[ci + 1..]);
        search(g, next, best);
    }
}

/// Canonical code and the labelling realizing it (`order[i]` gets new id `i`).
pub fn canonical_form(g: &Graph) -> (u128, Vec<Vertex>) {
    assert!(g.n() <= MAX_CATALOG_N, "canonical code limited to {MAX_CATALOG_N} vertices");
    if g.n() == 0 {
        return (0, Vec::new());
    }
    let mut best = None;
    search(g, vec![(0..g.n()).collect()], &mut best);
    best.expect("at least one leaf")
}

pub fn canonical_code(g: &Graph) -> u128 {
    canonical_form(g).0
}

pub fn canonical_graph(g: &Graph) -> Graph {
    graph_from_code(g.n(), canonical_code(g))
}

pub fn graph_from_code(n: usize, code: u128) -> Graph {
    let total = n * n.saturating_sub(1) / 2;
    let mut g = Graph::new(n);
    let mut bit = total;
    for i in 0..n {
        for j in i + 1..n {
            bit -= 1;
            if code >> bit & 1 == 1 {
                g.add_edge(i, j).expect("code edge");
            }
        }
    }
    g
}

fn extend_level(parents: &[Graph], keep: &(dyn Fn(&Graph) -> bool + Sync)) -> Vec<Graph> {
    let Some(first) = parents.first() else {
        return Vec::new();
    };
    let n = first.n() + 1;
    let codes: BTreeSet<u128> = parents
        .par_iter()
        .flat_map_iter(|p| {
            let mut local = BTreeSet::new();
            for mask in 1u32..(1 << p.n()) {
                let mut h = Graph::new(n);
                for (u, v) in p.edges() {
                    h.add_edge(u, v).expect("parent edge");
                }
                for u in 0..p.n() {
                    if mask >> u & 1 == 1 {
                        h.add_edge(u, n - 1).expect("new edge");
                    }
                }
                let code = canonical_code(&h);
                if !local.contains(&code) && keep(&graph_from_code(n, code)) {
                    local.insert(code);
                }
            }
            local
        })
        .collect();
    codes.into_iter().map(|c| graph_from_code(n, c)).collect()
}

/// Every connected graph on exactly `n` vertices, one per isomorphism class,
/// in canonical labelling and ascending code order.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    connected_graphs_where(n, &|_| true)
}

/// Connected graphs on `n` vertices satisfying `keep`, which must be closed
/// under taking connected induced subgraphs. Every connected graph has a
/// vertex whose removal leaves it connected, so growing one vertex at a
/// time from survivors reaches all of them.
pub fn connected_graphs_where(n: usize, keep: &(dyn Fn(&Graph) -> bool + Sync)) -> Vec<Graph> {
    if n == 0 {
        return Vec::new();
    }
    let mut level = vec![Graph::new(1)];
    level.retain(|g| keep(g));
    for _ in 1..n {
        level = extend_level(&level, keep);
    }
    level
}

/// Connected graphs with 1..=max_n vertices.
pub fn connected_graphs_up_to(max_n: usize) -> Vec<Graph> {
    connected_graphs_up_to_where(max_n, &|_| true)
}

pub fn connected_graphs_up_to_where(
    max_n: usize,
    keep: &(dyn Fn(&Graph) -> bool + Sync),
) -> Vec<Graph> {
    let mut out = Vec::new();
    let mut level = vec![Graph::new(1)];
    level.retain(|g| keep(g));
    for n in 1..=max_n {
        if n > 1 {
            level = extend_level(&level, keep);
        }
        out.extend(level.iter().cloned());
    }
    out
}
