//! Bottom-up table over rooted trees. An entry at `(v, d)` describes a
//! partial solution inside `T(v,d)`: `v` together with the subtrees of its
//! first `d` children.
//!
//! * `y` is the set of families whose picked path meets `T(v,d)`. Every such
//!   path other than the one through `v` lies wholly inside.
//! * `through` names the picked path containing `v`, if any. Keeping the
//!   path itself rather than only its shape is what stops two different
//!   paths of the same family from being glued together at `v`.
//! * `frontier` is `Uncovered(η)` when some `B` vertex of `T(v,d)` is not yet
//!   covered from inside and the deepest one is `η` below `v`; otherwise
//!   `Reach(r)` with `r = ℓ - d(v, nearest picked vertex inside)`, or `-1`
//!   when nothing inside reaches past `v`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::CpcInstance;
use crate::error::{EspError, Result};
use crate::graph::{multi_source_bfs, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Frontier {
    Uncovered(u32),
    Reach(i32),
}

type State = (u64, Option<usize>, Frontier);
type Table = BTreeMap<State, Option<(State, State)>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DpKey {
    pub v: Vertex,
    pub d: usize,
    pub y: u64,
    pub through: Option<usize>,
    pub frontier: Frontier,
}

pub struct CpcDp<'a> {
    inst: &'a CpcInstance,
    /// Global path id -> (family, index in family).
    paths: Vec<(usize, usize)>,
    on_path: Vec<Vec<bool>>,
    through: Vec<Vec<usize>>,
    parent: Vec<Option<Vertex>>,
    children: Vec<Vec<Vertex>>,
    roots: Vec<Vertex>,
    in_b: Vec<bool>,
    tables: Vec<Vec<Table>>,
}

fn shift(f: Frontier) -> Frontier {
    match f {
        Frontier::Uncovered(h) => Frontier::Uncovered(h + 1),
        Frontier::Reach(r) => Frontier::Reach((r - 1).max(-1)),
    }
}

fn combine(a: Frontier, b: Frontier, ell: u32) -> Option<Frontier> {
    use Frontier::*;
    let f = match (a, b) {
        (Uncovered(x), Uncovered(y)) => Uncovered(x.max(y)),
        (Uncovered(x), Reach(r)) | (Reach(r), Uncovered(x)) => {
            if (x as i32) <= r {
                Reach(r)
            } else {
                Uncovered(x)
            }
        }
        (Reach(r1), Reach(r2)) => Reach(r1.max(r2)),
    };
    match f {
        // Only `v` itself could still cover it, and `v`'s status is settled.
        Uncovered(h) if h >= ell => None,
        f => Some(f),
    }
}

impl<'a> CpcDp<'a> {
    pub fn build(inst: &'a CpcInstance) -> Result<CpcDp<'a>> {
        inst.validate()?;
        if inst.families.len() > 64 {
            return Err(EspError::CpcInvariant("more than 64 families".into()));
        }
        let n = inst.forest.n();
        let mut paths = Vec::new();
        let mut on_path = Vec::new();
        let mut through = vec![Vec::new(); n];
        for (fi, fam) in inst.families.iter().enumerate() {
            for (pi, p) in fam.iter().enumerate() {
                let id = paths.len();
                paths.push((fi, pi));
                let mut mark = vec![false; n];
                for &v in p {
                    mark[v] = true;
                    through[v].push(id);
                }
                on_path.push(mark);
            }
        }
        let mut in_b = vec![false; n];
        for &v in &inst.b {
            in_b[v] = true;
        }
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut roots = Vec::new();
        let mut order = Vec::with_capacity(n);
        for comp in inst.forest.components() {
            let r = comp[0];
            roots.push(r);
            let start = order.len();
            order.push(r);
            let mut i = start;
            while i < order.len() {
                let u = order[i];
                i += 1;
                for &w in inst.forest.neighbors(u) {
                    if Some(w) != parent[u] {
                        parent[w] = Some(u);
                        children[u].push(w);
                        order.push(w);
                    }
                }
            }
        }
        let mut dp = CpcDp {
            inst,
            paths,
            on_path,
            through,
            parent,
            children,
            roots,
            in_b,
            tables: vec![Vec::new(); n],
        };
        for &v in order.iter().rev() {
            let levels = dp.fill(v);
            dp.tables[v] = levels;
        }
        Ok(dp)
    }

    fn family_bit(&self, pid: usize) -> u64 {
        1u64 << self.paths[pid].0
    }

    fn fill(&self, v: Vertex) -> Vec<Table> {
        let ell = self.inst.ell;
        let mut base = Table::new();
        if self.in_b[v] {
            if ell > 0 {
                base.insert((0, None, Frontier::Uncovered(0)), None);
            }
        } else {
            base.insert((0, None, Frontier::Reach(-1)), None);
        }
        for &pid in &self.through[v] {
            base.insert((self.family_bit(pid), Some(pid), Frontier::Reach(ell as i32)), None);
        }
        let mut levels = vec![base];
        for &c in &self.children[v] {
            let prev = levels.last().unwrap();
            let full = self.tables[c].last().unwrap();
            let mut next = Table::new();
            for &s1 in prev.keys() {
                let (y1, p, f1) = s1;
                for &s2 in full.keys() {
                    let (y2, q, f2) = s2;
                    match p {
                        Some(pp) if self.on_path[pp][c] => {
                            if q != Some(pp) || y1 & y2 != self.family_bit(pp) {
                                continue;
                            }
                        }
                        _ => {
                            if q.is_some_and(|qq| self.on_path[qq][v]) || y1 & y2 != 0 {
                                continue;
                            }
                        }
                    }
                    let Some(f) = combine(f1, shift(f2), ell) else {
                        continue;
                    };
                    next.entry((y1 | y2, p, f)).or_insert(Some((s1, s2)));
                }
            }
            levels.push(next);
        }
        levels
    }

    pub fn roots(&self) -> &[Vertex] {
        &self.roots
    }

    pub fn entry_count(&self) -> u64 {
        self.tables.iter().flatten().map(|t| t.len() as u64).sum()
    }

    pub fn keys(&self) -> impl Iterator<Item = DpKey> + '_ {
        self.tables.iter().enumerate().flat_map(|(v, levels)| {
            levels.iter().enumerate().flat_map(move |(d, t)| {
                t.keys().map(move |&(y, through, frontier)| DpKey { v, d, y, through, frontier })
            })
        })
    }

    pub fn contains(&self, key: &DpKey) -> bool {
        self.tables[key.v]
            .get(key.d)
            .is_some_and(|t| t.contains_key(&(key.y, key.through, key.frontier)))
    }

    fn collect(&self, v: Vertex, d: usize, st: State, out: &mut BTreeSet<usize>) {
        if let Some(p) = st.1 {
            out.insert(p);
        }
        if d == 0 {
            return;
        }
        let (s1, s2) = self.tables[v][d][&st].expect("back pointer");
        self.collect(v, d - 1, s1, out);
        let c = self.children[v][d - 1];
        self.collect(c, self.children[c].len(), s2, out);
    }

    /// Path ids picked by the partial solution behind a true entry.
    pub fn witness(&self, key: &DpKey) -> Option<BTreeSet<usize>> {
        if !self.contains(key) {
            return None;
        }
        let mut out = BTreeSet::new();
        self.collect(key.v, key.d, (key.y, key.through, key.frontier), &mut out);
        Some(out)
    }

    /// `(family, path index)` picks for the tree rooted at `root` serving
    /// exactly `families`, if the root has an entry with nothing uncovered.
    pub fn accepting_witness(&self, root: Vertex, families: &[usize]) -> Option<Vec<(usize, usize)>> {
        let target = families.iter().fold(0u64, |m, &f| m | 1 << f);
        let d = self.children[root].len();
        let st = *self.tables[root][d]
            .keys()
            .find(|(y, _, f)| *y == target && matches!(f, Frontier::Reach(_)))?;
        let key = DpKey { v: root, d, y: st.0, through: st.1, frontier: st.2 };
        Some(self.witness(&key)?.into_iter().map(|pid| self.paths[pid]).collect())
    }

    fn subtree(&self, v: Vertex, d: usize) -> Vec<bool> {
        let mut inside = vec![false; self.inst.forest.n()];
        inside[v] = true;
        let mut stack: Vec<Vertex> = self.children[v][..d].to_vec();
        while let Some(u) = stack.pop() {
            inside[u] = true;
            stack.extend_from_slice(&self.children[u]);
        }
        inside
    }

    /// Shape label of an entry, 1 to 11. 1: no picked path through `v`.
    /// 2: the path is `v` alone. With the parent on the path: 3 if `v` ends
    /// it, else 4/5/6 as its child on the path comes before, at, or after
    /// position `d`. Without the parent: 7 (end, child inside), 8 (both path
    /// children inside), 9 (end, child outside), 10 (one inside, one
    /// outside), 11 (both outside). Roots accept 1, 2, 7 and 8.
    pub fn tp(&self, key: &DpKey) -> u8 {
        let Some(pid) = key.through else {
            return 1;
        };
        let (fi, pi) = self.paths[pid];
        let p = &self.inst.families[fi][pi];
        if p.len() == 1 {
            return 2;
        }
        let pos = p.iter().position(|&u| u == key.v).unwrap();
        let nbrs: Vec<Vertex> = [pos.checked_sub(1), Some(pos + 1)]
            .into_iter()
            .flatten()
            .filter_map(|i| p.get(i).copied())
            .collect();
        let child_idx = |u: Vertex| self.children[key.v].iter().position(|&c| c == u).map(|i| i + 1);
        let par = self.parent[key.v];
        if par.is_some_and(|pv| nbrs.contains(&pv)) {
            let down: Vec<usize> = nbrs.iter().filter_map(|&u| child_idx(u)).collect();
            return match down.first() {
                None => 3,
                Some(&j) if j < key.d => 4,
                Some(&j) if j == key.d => 5,
                Some(_) => 6,
            };
        }
        let mut js: Vec<usize> = nbrs.iter().filter_map(|&u| child_idx(u)).collect();
        js.sort_unstable();
        let inside = js.iter().filter(|&&j| j <= key.d).count();
        match (js.len(), inside) {
            (1, 1) => 7,
            (2, 2) => 8,
            (1, 0) => 9,
            (2, 1) => 10,
            _ => 11,
        }
    }

    /// Replays the partial solution behind `key` and checks it against the
    /// entry's meaning directly: one path per family of `y`, the path
    /// through `v` is `through`, all others inside `T(v,d)`, and the
    /// frontier matches distances measured in the forest.
    pub fn check_entry(&self, key: &DpKey) -> bool {
        let Some(w) = self.witness(key) else {
            return false;
        };
        let inside = self.subtree(key.v, key.d);
        let mut fams = 0u64;
        let mut picked = Vec::new();
        for &pid in &w {
            let bit = self.family_bit(pid);
            if fams & bit != 0 {
                return false;
            }
            fams |= bit;
            let (fi, pi) = self.paths[pid];
            let p = &self.inst.families[fi][pi];
            let has_v = self.on_path[pid][key.v];
            if has_v != (key.through == Some(pid)) {
                return false;
            }
            if !has_v && !p.iter().all(|&u| inside[u]) {
                return false;
            }
            picked.extend(p.iter().copied().filter(|&u| inside[u]));
        }
        if fams != key.y {
            return false;
        }
        let ell = self.inst.ell;
        let from_picked = multi_source_bfs(&self.inst.forest, &picked);
        let from_v = multi_source_bfs(&self.inst.forest, &[key.v]);
        let deepest = (0..inside.len())
            .filter(|&u| inside[u] && self.in_b[u] && from_picked[u] > ell)
            .map(|u| from_v[u])
            .max();
        let expect = match deepest {
            Some(h) => Frontier::Uncovered(h),
            None => {
                let near = from_picked[key.v];
                if near <= ell {
                    Frontier::Reach((ell - near) as i32)
                } else {
                    Frontier::Reach(-1)
                }
            }
        };
        expect == key.frontier
    }
}

#[cfg(test)]
mod tests {
    use super::super::{random_instance, CpcInstance};
    use super::*;
    use crate::generators::path;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn leaf_base_cases() {
        let inst = CpcInstance { forest: path(3), b: vec![0], ell: 2, families: vec![vec![vec![2]]] };
        let dp = CpcDp::build(&inst).unwrap();
        // Vertex 2 is a leaf of the tree rooted at 0.
        let on = DpKey { v: 2, d: 0, y: 1, through: Some(0), frontier: Frontier::Reach(2) };
        assert!(dp.contains(&on));
        assert_eq!(dp.tp(&on), 2);
        let inst = CpcInstance { forest: path(3), b: vec![2], ell: 2, families: vec![] };
        let dp = CpcDp::build(&inst).unwrap();
        let unc = DpKey { v: 2, d: 0, y: 0, through: None, frontier: Frontier::Uncovered(0) };
        assert!(dp.contains(&unc));
        assert_eq!(dp.tp(&unc), 1);
        assert!(dp.check_entry(&unc));
    }

    #[test]
    fn different_paths_of_one_family_do_not_merge() {
        // Picking (0,1) and (1,2) of the same family would cover both ends,
        // but only one path may be chosen.
        let inst = CpcInstance {
            forest: path(5),
            b: vec![0, 4],
            ell: 1,
            families: vec![vec![vec![0, 1, 2], vec![2, 3, 4]]],
        };
        assert_eq!(super::super::cpc_solve(&inst).unwrap(), None);
    }

    #[test]
    fn entries_replay_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..300 {
            let inst = random_instance(&mut rng, 14, 3, 3, 4);
            let dp = CpcDp::build(&inst).unwrap();
            for key in dp.keys() {
                assert!(dp.check_entry(&key), "{key:?} in {inst:?}");
                assert!((1..=11).contains(&dp.tp(&key)));
            }
        }
    }

    #[test]
    fn root_labels_are_accepting_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..200 {
            let inst = random_instance(&mut rng, 14, 3, 3, 4);
            let dp = CpcDp::build(&inst).unwrap();
            for key in dp.keys() {
                if dp.roots().contains(&key.v) && key.d == dp.children[key.v].len() {
                    assert!([1, 2, 7, 8].contains(&dp.tp(&key)));
                }
            }
        }
    }
}
