//! Colorful Path-Cover: pick one path from each family so that every vertex
//! of `B` is within `ℓ` of a picked path, distances measured in the forest.

mod dp;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{EspError, Result};
use crate::generators::random_forest;
use crate::graph::{multi_source_bfs, Graph, Path, Vertex};

pub use dp::{CpcDp, DpKey, Frontier};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "CpcRecord", try_from = "CpcRecord")]
pub struct CpcInstance {
    pub forest: Graph,
    pub b: Vec<Vertex>,
    pub ell: u32,
    pub families: Vec<Vec<Vec<Vertex>>>,
}

#[derive(Serialize, Deserialize)]
struct CpcRecord {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    b: Vec<Vertex>,
    ell: u32,
    families: Vec<Vec<Vec<Vertex>>>,
}

impl From<CpcInstance> for CpcRecord {
    fn from(i: CpcInstance) -> Self {
        CpcRecord {
            n: i.forest.n(),
            edges: i.forest.edges().collect(),
            b: i.b,
            ell: i.ell,
            families: i.families,
        }
    }
}

impl TryFrom<CpcRecord> for CpcInstance {
    type Error = EspError;

    fn try_from(r: CpcRecord) -> Result<Self> {
        let inst = CpcInstance {
            forest: Graph::from_edges(r.n, &r.edges)?,
            b: r.b,
            ell: r.ell,
            families: r.families,
        };
        inst.validate()?;
        Ok(inst)
    }
}

impl CpcInstance {
    /// Family index of every vertex that lies on some family path.
    pub fn coloring(&self) -> Vec<Option<usize>> {
        let mut color = vec![None; self.forest.n()];
        for (fi, fam) in self.families.iter().enumerate() {
            for p in fam {
                for &v in p {
                    color[v] = Some(fi);
                }
            }
        }
        color
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(EspError::CpcInvariant(m));
        if !self.forest.is_forest() {
            return bad("host graph has a cycle".into());
        }
        if let Some(&v) = self.b.iter().find(|&&v| v >= self.forest.n()) {
            return Err(EspError::VertexOutOfRange(v));
        }
        let comps = self.forest.components();
        let mut tree_of = vec![0; self.forest.n()];
        for (ci, c) in comps.iter().enumerate() {
            for &v in c {
                tree_of[v] = ci;
            }
        }
        let mut color: Vec<Option<usize>> = vec![None; self.forest.n()];
        for (fi, fam) in self.families.iter().enumerate() {
            let mut tree = None;
            for p in fam {
                Path::new(&self.forest, p.clone())?;
                for &v in p {
                    match color[v] {
                        Some(c) if c != fi => {
                            return bad(format!("families {c} and {fi} share vertex {v}"));
                        }
                        _ => color[v] = Some(fi),
                    }
                    if *tree.get_or_insert(tree_of[v]) != tree_of[v] {
                        return bad(format!("family {fi} spans two trees"));
                    }
                }
            }
        }
        for (u, v) in self.forest.edges() {
            if let (Some(a), Some(b)) = (color[u], color[v]) {
                if a != b {
                    return bad(format!("adjacent {u} and {v} carry families {a} and {b}"));
                }
            }
        }
        Ok(())
    }

    /// True when `selection` picks one valid path per family and covers `B`.
    pub fn is_solution(&self, selection: &[usize]) -> bool {
        if selection.len() != self.families.len() {
            return false;
        }
        let mut picked = Vec::new();
        for (fam, &i) in self.families.iter().zip(selection) {
            match fam.get(i) {
                Some(p) => picked.extend_from_slice(p),
                None => return false,
            }
        }
        if picked.is_empty() {
            return self.b.is_empty();
        }
        let d = multi_source_bfs(&self.forest, &picked);
        self.b.iter().all(|&v| d[v] <= self.ell)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CpcStats {
    pub dp_entries: u64,
}

/// Families of each tree of the forest (trees ordered by smallest vertex).
/// `None` when some tree holds `B` vertices but no family, which no
/// selection can fix since other trees are infinitely far.
pub fn assign_families_to_trees(inst: &CpcInstance) -> Result<Option<Vec<Vec<usize>>>> {
    inst.validate()?;
    let comps = inst.forest.components();
    let mut tree_of = vec![0; inst.forest.n()];
    for (ci, c) in comps.iter().enumerate() {
        for &v in c {
            tree_of[v] = ci;
        }
    }
    let mut out = vec![Vec::new(); comps.len()];
    for (fi, fam) in inst.families.iter().enumerate() {
        let Some(v) = fam.iter().flatten().next() else {
            // An empty family can never be served.
            return Ok(None);
        };
        out[tree_of[*v]].push(fi);
    }
    let mut has_b = vec![false; comps.len()];
    for &v in &inst.b {
        has_b[tree_of[v]] = true;
    }
    if (0..comps.len()).any(|t| has_b[t] && out[t].is_empty()) {
        return Ok(None);
    }
    Ok(Some(out))
}

pub fn cpc_solve(inst: &CpcInstance) -> Result<Option<Vec<usize>>> {
    cpc_solve_counted(inst).map(|(s, _)| s)
}

pub fn cpc_solve_counted(inst: &CpcInstance) -> Result<(Option<Vec<usize>>, CpcStats)> {
    let mut stats = CpcStats::default();
    let Some(assignment) = assign_families_to_trees(inst)? else {
        return Ok((None, stats));
    };
    let dp = CpcDp::build(inst)?;
    stats.dp_entries = dp.entry_count();
    let mut selection = vec![usize::MAX; inst.families.len()];
    for (tree, fams) in dp.roots().iter().zip(&assignment) {
        match dp.accepting_witness(*tree, fams) {
            Some(picks) => {
                for (fi, pi) in picks {
                    selection[fi] = pi;
                }
            }
            None => return Ok((None, stats)),
        }
    }
    if !inst.is_solution(&selection) {
        return Err(EspError::Internal("path-cover witness does not cover B".into()));
    }
    Ok((Some(selection), stats))
}

/// Tries every combination, first family varying slowest.
pub fn cpc_brute(inst: &CpcInstance, budget: u128) -> Result<Option<Vec<usize>>> {
    inst.validate()?;
    let total = inst
        .families
        .iter()
        .fold(1u128, |acc, f| acc.saturating_mul(f.len() as u128));
    if total > budget {
        return Err(EspError::Budget { needed: total, budget });
    }
    if total == 0 {
        return Ok(None);
    }
    let t = inst.families.len();
    let mut sel = vec![0usize; t];
    loop {
        if inst.is_solution(&sel) {
            return Ok(Some(sel));
        }
        let mut i = t;
        loop {
            if i == 0 {
                return Ok(None);
            }
            i -= 1;
            sel[i] += 1;
            if sel[i] < inst.families[i].len() {
                break;
            }
            sel[i] = 0;
        }
    }
}

fn tree_path(forest: &Graph, a: Vertex, b: Vertex) -> Vec<Vertex> {
    let d = crate::graph::bfs_distances(forest, b);
    let mut p = vec![a];
    let mut cur = a;
    while cur != b {
        cur = *forest.neighbors(cur).iter().find(|&&w| d[w] + 1 == d[cur]).unwrap();
        p.push(cur);
    }
    p
}

/// Random instance that satisfies every invariant: families live in
/// connected regions that are pairwise disjoint and non-adjacent.
pub fn random_instance<R: Rng>(
    rng: &mut R,
    max_n: usize,
    max_t: usize,
    max_ell: u32,
    max_family: usize,
) -> CpcInstance {
    let n = rng.gen_range(1..=max_n);
    let forest = random_forest(n, rng.gen_range(0.0..0.25), rng);
    let ell = rng.gen_range(0..=max_ell);
    let t = rng.gen_range(0..=max_t);
    let mut blocked = vec![false; n];
    let mut families = Vec::new();
    for _ in 0..t {
        let free: Vec<Vertex> = (0..n).filter(|&v| !blocked[v]).collect();
        let Some(&seed) = free.choose(rng) else {
            break;
        };
        let target = rng.gen_range(1..=8);
        let mut region = vec![seed];
        let mut in_region = vec![false; n];
        in_region[seed] = true;
        while region.len() < target {
            let frontier: Vec<Vertex> = region
                .iter()
                .flat_map(|&u| forest.neighbors(u).iter().copied())
                .filter(|&w| !in_region[w] && !blocked[w])
                .collect();
            let Some(&w) = frontier.choose(rng) else {
                break;
            };
            in_region[w] = true;
            region.push(w);
        }
        let size = rng.gen_range(1..=max_family);
        let mut fam: Vec<Vec<Vertex>> = Vec::new();
        for _ in 0..size {
            let a = *region.choose(rng).unwrap();
            let b = *region.choose(rng).unwrap();
            let p = tree_path(&forest, a, b);
            if !fam.contains(&p) {
                fam.push(p);
            }
        }
        for &u in &region {
            blocked[u] = true;
            for &w in forest.neighbors(u) {
                blocked[w] = true;
            }
        }
        families.push(fam);
    }
    let density = rng.gen_range(0.0..0.6);
    let b = (0..n).filter(|_| rng.gen_bool(density)).collect();
    CpcInstance { forest, b, ell, families }
}
