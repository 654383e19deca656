//! Deletion sets to forests, disjoint paths and split graphs, found by
//! iterative deepening over small obstructions.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{EspError, Result};
use crate::graph::{Graph, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeletionKind {
    Fvs,
    Dpd,
    Svd,
}

impl std::str::FromStr for DeletionKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "fvs" => Ok(DeletionKind::Fvs),
            "dpd" => Ok(DeletionKind::Dpd),
            "svd" => Ok(DeletionKind::Svd),
            _ => Err(format!("unknown deletion kind {s:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeletionSet {
    pub kind: DeletionKind,
    pub vertices: Vec<Vertex>,
    pub verified: bool,
}

impl DeletionSet {
    /// Checks a user supplied set.
    pub fn checked(g: &Graph, kind: DeletionKind, vertices: &[Vertex]) -> Result<DeletionSet> {
        if let Some(&v) = vertices.iter().find(|&&v| v >= g.n()) {
            return Err(EspError::VertexOutOfRange(v));
        }
        let mut vertices = vertices.to_vec();
        vertices.sort_unstable();
        vertices.dedup();
        if !verify_deletion_set(g, kind, &vertices) {
            return Err(EspError::InvalidDeletionSet(format!(
                "{vertices:?} is not a {kind:?} deletion set"
            )));
        }
        Ok(DeletionSet { kind, vertices, verified: true })
    }

    pub fn k(&self) -> usize {
        self.vertices.len()
    }
}

/// Hammer and Simeone: with degrees `d1 >= d2 >= ...` and `m` the largest
/// `i` with `d_i >= i - 1`, the graph is split iff
/// `sum_{i<=m} d_i = m(m-1) + sum_{i>m} d_i`.
pub fn is_split(h: &Graph) -> bool {
    let mut deg: Vec<usize> = (0..h.n()).map(|v| h.degree(v)).collect();
    deg.sort_unstable_by(|a, b| b.cmp(a));
    let m = (1..=deg.len()).filter(|&i| deg[i - 1] + 1 >= i).max().unwrap_or(0);
    let head: usize = deg[..m].iter().sum();
    let tail: usize = deg[m..].iter().sum();
    head == m * m.saturating_sub(1) + tail
}

/// `(clique, independent set)` of a split graph: the `m` vertices of
/// largest degree (ties by id) form a maximum clique.
pub fn split_bipartition(h: &Graph) -> Option<(Vec<Vertex>, Vec<Vertex>)> {
    let mut order: Vec<Vertex> = (0..h.n()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(h.degree(v)), v));
    let m = (1..=order.len()).filter(|&i| h.degree(order[i - 1]) + 1 >= i).max().unwrap_or(0);
    let mut clique = order[..m].to_vec();
    let mut indep = order[m..].to_vec();
    clique.sort_unstable();
    indep.sort_unstable();
    let is_clique = clique.iter().enumerate().all(|(i, &u)| clique[i + 1..].iter().all(|&v| h.has_edge(u, v)));
    let is_indep = indep.iter().enumerate().all(|(i, &u)| indep[i + 1..].iter().all(|&v| !h.has_edge(u, v)));
    (is_clique && is_indep).then_some((clique, indep))
}

pub fn has_shape(h: &Graph, kind: DeletionKind) -> bool {
    match kind {
        DeletionKind::Fvs => h.is_forest(),
        DeletionKind::Dpd => h.is_forest() && (0..h.n()).all(|v| h.degree(v) <= 2),
        DeletionKind::Svd => is_split(h),
    }
}

pub fn verify_deletion_set(g: &Graph, kind: DeletionKind, s: &[Vertex]) -> bool {
    if s.iter().any(|&v| v >= g.n()) {
        return false;
    }
    has_shape(&g.remove_vertices(s).0, kind)
}

/// Vertices of a shortest closed walk through a cycle of the graph induced
/// by `alive`. Any cycle inside it must be hit, so branching on these is safe.
fn short_cycle(g: &Graph, alive: &[bool], max_len: u32) -> Option<Vec<Vertex>> {
    let n = g.n();
    let mut best: Option<(u32, Vertex, Vertex, Vec<Vertex>)> = None;
    for r in (0..n).filter(|&r| alive[r]) {
        let mut dist = vec![u32::MAX; n];
        let mut parent = vec![usize::MAX; n];
        dist[r] = 0;
        let mut q = VecDeque::from([r]);
        while let Some(u) = q.pop_front() {
            for &w in g.neighbors(u) {
                if !alive[w] {
                    continue;
                }
                if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    q.push_back(w);
                } else if parent[u] != w && parent[w] != u && u < w {
                    let len = dist[u] + dist[w] + 1;
                    if len <= max_len && best.as_ref().is_none_or(|b| len < b.0) {
                        best = Some((len, u, w, parent.clone()));
                    }
                }
            }
        }
    }
    let (_, u, w, parent) = best?;
    let mut out = Vec::new();
    for mut x in [u, w] {
        while x != usize::MAX {
            out.push(x);
            x = parent[x];
        }
    }
    out.sort_unstable();
    out.dedup();
    Some(out)
}

fn induced_edges(g: &Graph, vs: &[Vertex]) -> u32 {
    let mut m = 0;
    for (i, &u) in vs.iter().enumerate() {
        for &v in &vs[i + 1..] {
            m += g.has_edge(u, v) as u32;
        }
    }
    m
}

/// First induced 2K2, C4 or C5 among alive vertices, in lexicographic order
/// of vertex sets, four-vertex sets first.
fn split_obstruction(g: &Graph, alive: &[bool]) -> Option<Vec<Vertex>> {
    let vs: Vec<Vertex> = (0..g.n()).filter(|&v| alive[v]).collect();
    let deg_in = |set: &[Vertex], v: Vertex| set.iter().filter(|&&u| g.has_edge(u, v)).count();
    let n = vs.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let set = [vs[a], vs[b], vs[c], vs[d]];
                    let m = induced_edges(g, &set);
                    // 2K2 and C4 are the 4-vertex graphs with all degrees
                    // equal to 1 or all equal to 2.
                    if (m == 2 || m == 4) && set.iter().all(|&v| deg_in(&set, v) as u32 == m / 2) {
                        return Some(set.to_vec());
                    }
                }
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    for e in d + 1..n {
                        let set = [vs[a], vs[b], vs[c], vs[d], vs[e]];
                        if induced_edges(g, &set) == 5 && set.iter().all(|&v| deg_in(&set, v) == 2) {
                            return Some(set.to_vec());
                        }
                    }
                }
            }
        }
    }
    None
}

fn obstruction(g: &Graph, alive: &[bool], kind: DeletionKind) -> Option<Vec<Vertex>> {
    match kind {
        DeletionKind::Fvs => short_cycle(g, alive, u32::MAX),
        DeletionKind::Dpd => short_cycle(g, alive, 4)
            .or_else(|| {
                (0..g.n()).filter(|&v| alive[v]).find_map(|v| {
                    let nb: Vec<Vertex> = g.neighbors(v).iter().copied().filter(|&u| alive[u]).take(3).collect();
                    (nb.len() == 3).then(|| {
                        let mut claw = vec![v];
                        claw.extend(nb);
                        claw.sort_unstable();
                        claw
                    })
                })
            })
            .or_else(|| short_cycle(g, alive, u32::MAX)),
        DeletionKind::Svd => split_obstruction(g, alive),
    }
}

fn branch(g: &Graph, kind: DeletionKind, alive: &mut Vec<bool>, left: usize, chosen: &mut Vec<Vertex>) -> bool {
    let Some(obs) = obstruction(g, alive, kind) else {
        return true;
    };
    if left == 0 {
        return false;
    }
    for v in obs {
        alive[v] = false;
        chosen.push(v);
        if branch(g, kind, alive, left - 1, chosen) {
            return true;
        }
        chosen.pop();
        alive[v] = true;
    }
    false
}

/// A smallest deletion set of size at most `kmax`, if one exists.
pub fn find_deletion_set(g: &Graph, kind: DeletionKind, kmax: usize) -> Option<DeletionSet> {
    for k in 0..=kmax.min(g.n()) {
        let mut alive = vec![true; g.n()];
        let mut chosen = Vec::new();
        if branch(g, kind, &mut alive, k, &mut chosen) {
            chosen.sort_unstable();
            debug_assert!(verify_deletion_set(g, kind, &chosen));
            return Some(DeletionSet { kind, vertices: chosen, verified: true });
        }
    }
    None
}

/// Reference minimum by trying subsets in order of size, then lexicographically.
pub fn minimum_deletion_set_exhaustive(g: &Graph, kind: DeletionKind) -> Vec<Vertex> {
    let n = g.n();
    for k in 0..=n {
        let mut comb: Vec<Vertex> = (0..k).collect();
        loop {
            if verify_deletion_set(g, kind, &comb) {
                return comb;
            }
            let Some(i) = (0..k).rev().find(|&i| comb[i] < n - k + i) else {
                break;
            };
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
        }
    }
    unreachable!("deleting every vertex leaves the empty graph")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::connected_graphs_up_to;
    use crate::generators::{complete, cycle, path, random_connected, random_tree};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn verify_examples() {
        assert!(verify_deletion_set(&cycle(4), DeletionKind::Fvs, &[0]));
        assert!(!verify_deletion_set(&cycle(4), DeletionKind::Fvs, &[]));
        assert!(verify_deletion_set(&cycle(4), DeletionKind::Svd, &[2]));
        assert!(!verify_deletion_set(&cycle(4), DeletionKind::Svd, &[]));
        let claw = crate::generators::star(3);
        assert!(verify_deletion_set(&claw, DeletionKind::Fvs, &[]));
        assert!(!verify_deletion_set(&claw, DeletionKind::Dpd, &[]));
        assert!(verify_deletion_set(&claw, DeletionKind::Dpd, &[1]));
        assert!(!verify_deletion_set(&path(3), DeletionKind::Fvs, &[7]));
    }

    #[test]
    fn checked_rejects_wrong_sets() {
        assert!(matches!(
            DeletionSet::checked(&cycle(5), DeletionKind::Fvs, &[]),
            Err(EspError::InvalidDeletionSet(_))
        ));
        let ds = DeletionSet::checked(&cycle(5), DeletionKind::Fvs, &[3, 3]).unwrap();
        assert_eq!(ds.vertices, vec![3]);
    }

    #[test]
    fn find_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = random_tree(9, &mut rng);
        assert_eq!(find_deletion_set(&t, DeletionKind::Fvs, 3).unwrap().k(), 0);
        assert_eq!(find_deletion_set(&cycle(6), DeletionKind::Dpd, 3).unwrap().k(), 1);
        assert_eq!(find_deletion_set(&cycle(5), DeletionKind::Svd, 3).unwrap().k(), 1);
        assert_eq!(find_deletion_set(&complete(6), DeletionKind::Fvs, 5).unwrap().k(), 4);
        assert!(find_deletion_set(&complete(6), DeletionKind::Fvs, 3).is_none());
        assert_eq!(find_deletion_set(&complete(6), DeletionKind::Svd, 0).unwrap().k(), 0);
    }

    #[test]
    fn split_recognition() {
        // A triangle with pendant vertices on two corners.
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (0, 3), (1, 4)]).unwrap();
        assert!(is_split(&g));
        let (c, i) = split_bipartition(&g).unwrap();
        assert_eq!(c, vec![0, 1, 2]);
        assert_eq!(i, vec![3, 4]);
        assert!(is_split(&path(4)));
        assert!(!is_split(&cycle(4)));
        assert!(!is_split(&cycle(5)));
        assert!(split_bipartition(&cycle(4)).is_none());
    }

    #[test]
    fn split_test_matches_obstructions() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..300 {
            let n = rand::Rng::gen_range(&mut rng, 1..=9);
            let g = random_connected(n, 0.5, &mut rng);
            let alive = vec![true; n];
            assert_eq!(is_split(&g), split_obstruction(&g, &alive).is_none());
            assert_eq!(is_split(&g), split_bipartition(&g).is_some());
        }
    }

    #[test]
    fn minimum_on_small_catalog() {
        for g in connected_graphs_up_to(6) {
            for kind in [DeletionKind::Fvs, DeletionKind::Dpd, DeletionKind::Svd] {
                let want = minimum_deletion_set_exhaustive(&g, kind).len();
                let got = find_deletion_set(&g, kind, g.n()).unwrap();
                assert_eq!(got.k(), want, "{kind:?} {g:?}");
                assert!(verify_deletion_set(&g, kind, &got.vertices));
            }
        }
    }
}
