//! Instances from Dominating Set. `G` has a dominating set of size `k` iff
//! the generated `H` has a shortest path of eccentricity at most `k + 1`,
//! and `H - X` is chordal for the `k + 1` vertices of `X`.
//!
//! Layout of `H`: the clique `V*` (copies of `V(G)`), the layers `U_1..U_k`
//! row by row, `z_1..z_{k-1}`, then `s, a, b, t`, the paths `a_1..a_k` and
//! `b_1..b_k`, and last the `W` blocks ordered by `(i, j, t, p)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chordal::is_chordal;
use crate::error::{EspError, Result};
use crate::graph::{all_pairs_distances, Graph, Path, Vertex};
use crate::oracle::{esp_decide_oracle_with, DEFAULT_ORACLE_BUDGET};

/// Largest `|V(H)|` for which `verify_reduction` also asks the oracle.
pub const ORACLE_CROSS_CHECK_N: usize = 40;

/// Serializes as the JSON sidecar; the graph itself goes to an edge list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HardInstance {
    #[serde(skip)]
    pub h: Graph,
    pub n_source: usize,
    pub k: usize,
    pub k_prime: usize,
    pub x: Vec<Vertex>,
    pub labels: Vec<String>,
    pub s: Vertex,
    pub a: Vertex,
    pub b: Vertex,
    pub t: Vertex,
}

impl HardInstance {
    /// Id of `u_{i,j}`, 1-based like the labels.
    pub fn u(&self, i: usize, j: usize) -> Vertex {
        self.n_source + (i - 1) * self.n_source + (j - 1)
    }

    pub fn z(&self, i: usize) -> Vertex {
        self.n_source * (self.k + 1) + (i - 1)
    }
}

fn closed_neighborhood(g: &Graph, v: Vertex) -> Vec<Vertex> {
    let mut nb = g.neighbors(v).to_vec();
    nb.push(v);
    nb.sort_unstable();
    nb
}

/// `n + kn + (k-1) + 4 + 2k + k^2 * sum_j |N[v_j]|`.
pub fn expected_vertex_count(g: &Graph, k: usize) -> usize {
    let n = g.n();
    let closed: usize = (0..n).map(|v| g.degree(v) + 1).sum();
    n + k * n + (k - 1) + 4 + 2 * k + k * k * closed
}

pub fn generate_hard_instance(g: &Graph, k: usize) -> Result<HardInstance> {
    if k == 0 {
        return Err(EspError::Precondition("k must be at least 1".into()));
    }
    let n = g.n();
    let mut labels: Vec<String> = Vec::new();
    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
    let new = |labels: &mut Vec<String>, name: String| {
        labels.push(name);
        labels.len() - 1
    };
    let vstar: Vec<Vertex> = (1..=n).map(|t| new(&mut labels, format!("v{t}"))).collect();
    for (i, &x) in vstar.iter().enumerate() {
        edges.extend(vstar[i + 1..].iter().map(|&y| (x, y)));
    }
    let u: Vec<Vec<Vertex>> = (1..=k)
        .map(|i| (1..=n).map(|j| new(&mut labels, format!("u{i},{j}"))).collect())
        .collect();
    let z: Vec<Vertex> = (1..k).map(|i| new(&mut labels, format!("z{i}"))).collect();
    let s = new(&mut labels, "s".into());
    let a = new(&mut labels, "a".into());
    let b = new(&mut labels, "b".into());
    let t = new(&mut labels, "t".into());
    let ap: Vec<Vertex> = (1..=k).map(|i| new(&mut labels, format!("a{i}"))).collect();
    let bp: Vec<Vertex> = (1..=k).map(|i| new(&mut labels, format!("b{i}"))).collect();
    for (end, p, top) in [(s, &ap, a), (t, &bp, b)] {
        let mut prev = end;
        for &w in p.iter() {
            edges.push((prev, w));
            prev = w;
        }
        edges.push((prev, top));
    }
    edges.extend(u[0].iter().map(|&x| (a, x)));
    edges.extend(u[k - 1].iter().map(|&x| (b, x)));
    for (i, &zi) in z.iter().enumerate() {
        edges.extend(u[i].iter().chain(&u[i + 1]).map(|&x| (zi, x)));
    }
    for i in 1..=k {
        for j in 1..=n {
            let nb = closed_neighborhood(g, j - 1);
            // w[(t, p)] with t the 0-based neighbour, p in 1..=k.
            let mut w: BTreeMap<(Vertex, usize), Vertex> = BTreeMap::new();
            for &tv in &nb {
                for p in 1..=k {
                    w.insert((tv, p), new(&mut labels, format!("w{i},{j},{},{p}", tv + 1)));
                }
            }
            let uij = u[i - 1][j - 1];
            for &tv in &nb {
                let mut prev = uij;
                for p in 1..=k {
                    edges.push((prev, w[&(tv, p)]));
                    prev = w[&(tv, p)];
                }
                edges.push((prev, vstar[tv]));
            }
            for &t1 in &nb {
                for &t2 in &nb {
                    if t1 == t2 {
                        continue;
                    }
                    for p in 1..=k {
                        edges.push((w[&(t1, p)], w[&(t2, p)]));
                    }
                    for q in 1..k {
                        edges.push((w[&(t1, q)], w[&(t2, q + 1)]));
                    }
                    edges.push((w[&(t1, k)], vstar[t2]));
                }
            }
        }
    }
    let mut h = Graph::new(labels.len());
    edges.sort_unstable_by_key(|&(x, y)| (x.min(y), x.max(y)));
    edges.dedup_by_key(|&mut (x, y)| (x.min(y), x.max(y)));
    for (x, y) in edges {
        h.add_edge(x, y)?;
    }
    let mut x: Vec<Vertex> = z.clone();
    x.extend([a, b]);
    x.sort_unstable();
    Ok(HardInstance { h, n_source: n, k, k_prime: k + 1, x, labels, s, a, b, t })
}

/// A smallest dominating set of size at most `k`, by subset enumeration.
pub fn dominating_set_brute(g: &Graph, k: usize) -> Option<Vec<Vertex>> {
    let n = g.n();
    let closed: Vec<u64> = (0..n)
        .map(|v| closed_neighborhood(g, v).iter().fold(0u64, |m, &w| m | 1 << w))
        .collect();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    for size in 0..=k.min(n) {
        let mut comb: Vec<Vertex> = (0..size).collect();
        loop {
            if comb.iter().fold(0u64, |m, &v| m | closed[v]) == full {
                return Some(comb);
            }
            let Some(i) = (0..size).rev().find(|&i| comb[i] < n - size + i) else {
                break;
            };
            comb[i] += 1;
            for j in i + 1..size {
                comb[j] = comb[j - 1] + 1;
            }
        }
    }
    None
}

/// Distances the construction promises, as a list of failures.
pub fn check_structure(hi: &HardInstance) -> Vec<String> {
    let d = all_pairs_distances(&hi.h);
    let k = hi.k as u32;
    let mut bad = Vec::new();
    if d.get(hi.a, hi.b) != 2 * k {
        bad.push(format!("d(a,b) = {} != {}", d.get(hi.a, hi.b), 2 * k));
    }
    if d.get(hi.s, hi.a) != k + 1 || d.get(hi.t, hi.b) != k + 1 {
        bad.push("s or t not at distance k+1 from a or b".into());
    }
    if hi.x.len() != hi.k + 1 {
        bad.push("|X| != k+1".into());
    }
    bad
}

pub fn h_minus_x_is_chordal(hi: &HardInstance) -> bool {
    is_chordal(&hi.h.remove_vertices(&hi.x).0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionCheck {
    pub dominating_set: Option<Vec<Vertex>>,
    pub path: Option<Path>,
    /// The oracle's answer at ℓ = k + 1 when `H` is small enough to ask.
    pub oracle: Option<bool>,
    pub agree: bool,
}

/// Compares both sides of the equivalence. The path side tries every
/// `a, u_{1,t1}, z_1, ..., z_{k-1}, u_{k,tk}, b`.
pub fn verify_reduction(g: &Graph, k: usize, hi: &HardInstance) -> Result<ReductionCheck> {
    let n = g.n();
    let total = (n as u128).saturating_pow(k as u32);
    if total > 1 << 24 {
        return Err(EspError::Budget { needed: total, budget: 1 << 24 });
    }
    let ds = dominating_set_brute(g, k);
    let d = all_pairs_distances(&hi.h);
    let ell = hi.k_prime as u32;
    let mut path = None;
    if n > 0 {
        let mut pick = vec![1usize; k];
        'outer: loop {
            let mut p = vec![hi.a];
            for (i, &tj) in pick.iter().enumerate() {
                if i > 0 {
                    p.push(hi.z(i));
                }
                p.push(hi.u(i + 1, tj));
            }
            p.push(hi.b);
            if d.is_shortest(&p) && d.path_eccentricity(&p) <= ell {
                path = Some(Path::new(&hi.h, p)?);
                break;
            }
            let mut i = k;
            loop {
                if i == 0 {
                    break 'outer;
                }
                i -= 1;
                pick[i] += 1;
                if pick[i] <= n {
                    break;
                }
                pick[i] = 1;
            }
        }
    }
    let oracle = if hi.h.n() <= ORACLE_CROSS_CHECK_N && hi.h.is_connected() {
        match esp_decide_oracle_with(&hi.h, &d, ell, DEFAULT_ORACLE_BUDGET) {
            Ok(ans) => Some(ans.feasible),
            Err(EspError::OracleBudget(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let agree = ds.is_some() == path.is_some() && oracle.is_none_or(|o| o == path.is_some());
    Ok(ReductionCheck { dominating_set: ds, path, oracle, agree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, cycle, random_connected};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn k2_count() {
        let g = complete(2);
        let hi = generate_hard_instance(&g, 1).unwrap();
        assert_eq!(hi.h.n(), 14);
        assert_eq!(expected_vertex_count(&g, 1), 14);
        assert_eq!(hi.x.len(), 2);
        assert_eq!(hi.labels[hi.u(1, 2)], "u1,2");
        assert!(check_structure(&hi).is_empty());
        assert!(h_minus_x_is_chordal(&hi));
        let r = verify_reduction(&g, 1, &hi).unwrap();
        assert!(r.agree && r.path.is_some());
        assert_eq!(r.oracle, Some(true));
    }

    #[test]
    fn dominating_examples() {
        assert!(dominating_set_brute(&complete(3), 1).is_some());
        assert!(dominating_set_brute(&cycle(5), 1).is_none());
        assert_eq!(dominating_set_brute(&cycle(5), 2).unwrap().len(), 2);
        assert!(dominating_set_brute(&Graph::new(3), 2).is_none());
        assert!(dominating_set_brute(&Graph::new(3), 3).is_some());
    }

    #[test]
    fn isolated_vertices_give_no_path() {
        let g = Graph::new(3);
        let hi = generate_hard_instance(&g, 1).unwrap();
        let r = verify_reduction(&g, 1, &hi).unwrap();
        assert!(r.dominating_set.is_none() && r.path.is_none() && r.agree);
    }

    #[test]
    fn layout_is_reproducible() {
        let g = cycle(4);
        let a = generate_hard_instance(&g, 2).unwrap();
        let b = generate_hard_instance(&g, 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.h.to_edge_list(), b.h.to_edge_list());
        assert_eq!(a.labels[a.z(1)], "z1");
        assert_eq!(a.labels.last().unwrap(), "w2,4,4,2");
    }

    #[test]
    fn random_small_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        for _ in 0..30 {
            let n = rng.gen_range(1..=5);
            let g = random_connected(n, 0.3, &mut rng);
            for k in 1..=2 {
                let hi = generate_hard_instance(&g, k).unwrap();
                assert_eq!(hi.h.n(), expected_vertex_count(&g, k));
                assert!(check_structure(&hi).is_empty(), "{:?}", check_structure(&hi));
                assert!(h_minus_x_is_chordal(&hi));
                assert!(verify_reduction(&g, k, &hi).unwrap().agree, "{g:?} k={k}");
            }
        }
    }
}
