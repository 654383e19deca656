//! Exhaustive ESP solver. For every endpoint pair it walks the shortest-path
//! DAG depth first, carrying the set of vertices the prefix has not yet
//! covered as a bit mask, and remembers failed `(vertex, mask)` states.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{EspError, Result};
use crate::graph::{all_pairs_distances, DistanceMatrix, Graph, Path, Vertex, INF};

pub const DEFAULT_ORACLE_BUDGET: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EspAnswer {
    pub feasible: bool,
    pub certificate: Option<Path>,
    pub ell_used: u32,
}

impl EspAnswer {
    pub fn infeasible(ell: u32) -> Self {
        EspAnswer { feasible: false, certificate: None, ell_used: ell }
    }

    pub fn feasible(ell: u32, p: Path) -> Self {
        EspAnswer { feasible: true, certificate: Some(p), ell_used: ell }
    }
}

pub(crate) fn check_connected(g: &Graph) -> Result<()> {
    if g.n() == 0 {
        Err(EspError::EmptyGraph)
    } else if !g.is_connected() {
        Err(EspError::Disconnected)
    } else {
        Ok(())
    }
}

struct PairSearch<'a> {
    g: &'a Graph,
    dist: &'a DistanceMatrix,
    t: Vertex,
    ball: &'a [u128],
    future: Vec<u128>,
    failed: HashSet<(Vertex, u128)>,
    budget: u64,
    stack: Vec<Vertex>,
}

impl PairSearch<'_> {
    /// `uncovered` already excludes everything covered by the stack including `w`.
    fn dfs(&mut self, w: Vertex, uncovered: u128) -> Result<bool> {
        if w == self.t {
            return Ok(uncovered == 0);
        }
        if uncovered & !self.future[w] != 0 {
            return Ok(false);
        }
        if self.failed.contains(&(w, uncovered)) {
            return Ok(false);
        }
        let dwt = self.dist.get(w, self.t);
        for &x in self.g.neighbors(w) {
            if self.dist.get(x, self.t) + 1 != dwt {
                continue;
            }
            self.stack.push(x);
            if self.dfs(x, uncovered & !self.ball[x])? {
                return Ok(true);
            }
            self.stack.pop();
        }
        if self.failed.len() as u64 >= self.budget {
            return Err(EspError::OracleBudget(self.budget));
        }
        self.failed.insert((w, uncovered));
        Ok(false)
    }
}

fn balls(dist: &DistanceMatrix, ell: u32) -> Vec<u128> {
    let n = dist.n();
    (0..n)
        .map(|u| (0..n).filter(|&v| dist.get(u, v) <= ell).fold(0u128, |m, v| m | 1 << v))
        .collect()
}

fn search_pair(
    g: &Graph,
    dist: &DistanceMatrix,
    ball: &[u128],
    s: Vertex,
    t: Vertex,
    budget: u64,
) -> Result<Option<Vec<Vertex>>> {
    let n = g.n();
    let full: u128 = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    // future[w]: everything some vertex on a shortest w-t path can cover.
    let future: Vec<u128> = (0..n)
        .map(|w| {
            let dwt = dist.get(w, t);
            (0..n)
                .filter(|&x| dist.get(w, x) + dist.get(x, t) == dwt)
                .fold(0u128, |m, x| m | ball[x])
        })
        .collect();
    let mut search = PairSearch {
        g,
        dist,
        t,
        ball,
        future,
        failed: HashSet::new(),
        budget,
        stack: vec![s],
    };
    if search.dfs(s, full & !ball[s])? {
        Ok(Some(search.stack))
    } else {
        Ok(None)
    }
}

pub fn esp_decide_oracle(g: &Graph, ell: u32) -> Result<EspAnswer> {
    esp_decide_oracle_with(g, &all_pairs_distances(g), ell, DEFAULT_ORACLE_BUDGET)
}

/// Decides ESP. Endpoint pairs `s <= t` are searched independently and the
/// lexicographically first success is returned, so the answer does not depend
/// on the thread count. Pairs with `s > t` are mirror images and skipped.
pub fn esp_decide_oracle_with(
    g: &Graph,
    dist: &DistanceMatrix,
    ell: u32,
    budget: u64,
) -> Result<EspAnswer> {
    check_connected(g)?;
    if g.n() > 128 {
        return Err(EspError::TooLarge(g.n()));
    }
    let n = g.n();
    let ball = balls(dist, ell);
    let pairs: Vec<(Vertex, Vertex)> =
        (0..n).flat_map(|s| (s..n).map(move |t| (s, t))).collect();
    let found = pairs.par_iter().find_map_first(|&(s, t)| {
        match search_pair(g, dist, &ball, s, t, budget) {
            Ok(None) => None,
            Ok(Some(p)) => Some(Ok(p)),
            Err(e) => Some(Err(e)),
        }
    });
    match found {
        None => Ok(EspAnswer::infeasible(ell)),
        Some(Ok(p)) => Ok(EspAnswer::feasible(ell, Path::new(g, p)?)),
        Some(Err(e)) => Err(e),
    }
}

/// Smallest feasible ℓ with a witness. Terminates by the radius: a shortest
/// path through a centre covers everything within the radius.
pub fn mesp_optimum(g: &Graph) -> Result<(u32, Path)> {
    check_connected(g)?;
    let dist = all_pairs_distances(g);
    for ell in 0..=dist.radius() {
        let ans = esp_decide_oracle_with(g, &dist, ell, DEFAULT_ORACLE_BUDGET)?;
        if let Some(p) = ans.certificate {
            return Ok((ell, p));
        }
    }
    Err(EspError::Internal("no shortest path within the radius".into()))
}

/// All shortest `s`-`t` paths in lexicographic order; errors past `cap`.
pub fn enumerate_shortest_paths(
    g: &Graph,
    s: Vertex,
    t: Vertex,
    cap: usize,
) -> Result<Vec<Path>> {
    let dist = crate::graph::bfs_distances(g, t);
    if dist[s] == INF {
        return Err(EspError::Disconnected);
    }
    let mut out = Vec::new();
    let mut stack = vec![s];
    fn walk(
        g: &Graph,
        dist: &[u32],
        t: Vertex,
        cap: usize,
        stack: &mut Vec<Vertex>,
        out: &mut Vec<Vec<Vertex>>,
    ) -> Result<()> {
        let w = *stack.last().unwrap();
        if w == t {
            if out.len() == cap {
                return Err(EspError::PathCap(cap));
            }
            out.push(stack.clone());
            return Ok(());
        }
        for &x in g.neighbors(w) {
            if dist[x] + 1 == dist[w] {
                stack.push(x);
                walk(g, dist, t, cap, stack, out)?;
                stack.pop();
            }
        }
        Ok(())
    }
    walk(g, &dist, t, cap, &mut stack, &mut out)?;
    out.into_iter().map(|p| Path::new(g, p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, cycle, path, random_connected, random_tree, star};
    use crate::graph::{is_shortest_path, path_eccentricity};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn decide_examples() {
        let ans = esp_decide_oracle(&path(4), 0).unwrap();
        assert_eq!(ans.certificate.unwrap().vertices(), &[0, 1, 2, 3]);
        assert!(!esp_decide_oracle(&star(4), 0).unwrap().feasible);
        assert!(esp_decide_oracle(&cycle(6), 1).unwrap().feasible);
    }

    #[test]
    fn optimum_examples() {
        for n in 1..=15 {
            assert_eq!(mesp_optimum(&path(n)).unwrap().0, 0);
        }
        assert_eq!(mesp_optimum(&complete(4)).unwrap().0, 1);
        assert_eq!(mesp_optimum(&star(4)).unwrap().0, 1);
    }

    #[test]
    fn shortest_path_enumeration() {
        assert_eq!(enumerate_shortest_paths(&cycle(4), 0, 2, 10).unwrap().len(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = random_tree(12, &mut rng);
        for s in 0..12 {
            for u in 0..12 {
                assert_eq!(enumerate_shortest_paths(&t, s, u, 10).unwrap().len(), 1);
            }
        }
        let p = enumerate_shortest_paths(&complete(4), 0, 1, 10).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].vertices(), &[0, 1]);
        assert_eq!(
            enumerate_shortest_paths(&cycle(4), 0, 2, 1),
            Err(EspError::PathCap(1))
        );
    }

    fn brute_optimum(g: &Graph) -> u32 {
        let mut best = u32::MAX;
        for s in 0..g.n() {
            for t in 0..g.n() {
                for p in enumerate_shortest_paths(g, s, t, 1 << 20).unwrap() {
                    best = best.min(path_eccentricity(g, &p).unwrap());
                }
            }
        }
        best
    }

    #[test]
    fn matches_path_enumeration_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..150 {
            let n = rand::Rng::gen_range(&mut rng, 1..=11);
            let g = random_connected(n, 0.2, &mut rng);
            let (opt, p) = mesp_optimum(&g).unwrap();
            assert_eq!(opt, brute_optimum(&g));
            assert!(is_shortest_path(&g, &p));
            assert_eq!(path_eccentricity(&g, &p).unwrap(), opt);
            assert!(opt <= all_pairs_distances(&g).radius());
        }
    }

    #[test]
    fn monotone_in_ell() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let g = random_connected(10, 0.15, &mut rng);
            let d = all_pairs_distances(&g).diameter();
            let bits: Vec<bool> =
                (0..=d).map(|l| esp_decide_oracle(&g, l).unwrap().feasible).collect();
            assert!(bits.windows(2).all(|w| !w[0] || w[1]));
        }
    }

    #[test]
    fn rejects_bad_graphs() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert_eq!(esp_decide_oracle(&g, 5), Err(EspError::Disconnected));
        assert_eq!(esp_decide_oracle(&Graph::new(0), 0), Err(EspError::EmptyGraph));
        assert!(matches!(esp_decide_oracle(&path(130), 0), Err(EspError::TooLarge(130))));
    }

    #[test]
    fn budget_is_reported() {
        let g = complete(12);
        let d = all_pairs_distances(&g);
        let c4 = cycle(4);
        let r = esp_decide_oracle_with(&c4, &all_pairs_distances(&c4), 0, 0);
        assert_eq!(r, Err(EspError::OracleBudget(0)));
        assert!(esp_decide_oracle_with(&g, &d, 1, 0).unwrap().feasible);
    }
}
