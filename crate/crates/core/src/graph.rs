use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{EspError, Result};

pub type Vertex = usize;

/// Distance sentinel for unreachable pairs. Larger than any hop count.
pub const INF: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<Vertex>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { n, adj: vec![Vec::new(); n] }
    }

    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<()> {
        if u >= self.n {
            return Err(EspError::VertexOutOfRange(u));
        }
        if v >= self.n {
            return Err(EspError::VertexOutOfRange(v));
        }
        if u == v {
            return Err(EspError::InvalidEdge(u, v, "self-loop"));
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => Err(EspError::InvalidEdge(u, v, "duplicate edge")),
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                Ok(())
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn induced_subgraph(&self, keep: &[Vertex]) -> (Graph, VertexMap) {
        let map = VertexMap::new(self.n, keep);
        let mut h = Graph::new(map.len());
        for (new_u, &u) in map.to_old.iter().enumerate() {
            for &v in &self.adj[u] {
                if let Some(new_v) = map.to_new[v] {
                    h.adj[new_u].push(new_v);
                }
            }
            h.adj[new_u].sort_unstable();
        }
        (h, map)
    }

    pub fn remove_vertices(&self, removed: &[Vertex]) -> (Graph, VertexMap) {
        let mut gone = vec![false; self.n];
        for &v in removed {
            gone[v] = true;
        }
        let keep: Vec<Vertex> = (0..self.n).filter(|&v| !gone[v]).collect();
        self.induced_subgraph(&keep)
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &v in &self.adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.components().len() == 1
    }

    pub fn is_forest(&self) -> bool {
        self.m() + self.components().len() == self.n
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n, self.m());
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    /// Parses `n m` followed by `m` lines `u v`. Blank lines and `#` comments are skipped.
    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(EspError::Parse {
            line: 0,
            msg: "missing header".into(),
        })?;
        let nums = parse_ints(hline, header)?;
        if nums.len() != 2 {
            return Err(EspError::Parse { line: hline, msg: "header must be `n m`".into() });
        }
        let (n, m) = (nums[0], nums[1]);
        let mut g = Graph::new(n);
        let mut count = 0;
        for (line, l) in lines {
            let uv = parse_ints(line, l)?;
            if uv.len() != 2 {
                return Err(EspError::Parse { line, msg: "edge line must be `u v`".into() });
            }
            g.add_edge(uv[0], uv[1])
                .map_err(|e| EspError::Parse { line, msg: e.to_string() })?;
            count += 1;
        }
        if count != m {
            return Err(EspError::Parse {
                line: hline,
                msg: format!("header declares {m} edges, found {count}"),
            });
        }
        Ok(g)
    }
}

fn parse_ints(line: usize, l: &str) -> Result<Vec<usize>> {
    l.split_whitespace()
        .map(|t| {
            t.parse::<usize>().map_err(|_| EspError::Parse {
                line,
                msg: format!("not a non-negative integer: {t:?}"),
            })
        })
        .collect()
}

/// Old-id / new-id correspondence for extracted subgraphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexMap {
    pub to_old: Vec<Vertex>,
    pub to_new: Vec<Option<Vertex>>,
}

impl VertexMap {
    pub fn new(n_old: usize, keep: &[Vertex]) -> Self {
        let mut to_old = keep.to_vec();
        to_old.sort_unstable();
        to_old.dedup();
        let mut to_new = vec![None; n_old];
        for (i, &v) in to_old.iter().enumerate() {
            to_new[v] = Some(i);
        }
        VertexMap { to_old, to_new }
    }

    pub fn len(&self) -> usize {
        self.to_old.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_old.is_empty()
    }

    pub fn old(&self, v: Vertex) -> Vertex {
        self.to_old[v]
    }

    pub fn new_id(&self, v: Vertex) -> Option<Vertex> {
        self.to_new[v]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path(Vec<Vertex>);

impl Path {
    pub fn new(g: &Graph, vertices: Vec<Vertex>) -> Result<Path> {
        if vertices.is_empty() {
            return Err(EspError::InvalidPath("empty".into()));
        }
        let mut seen = vec![false; g.n()];
        for (i, &v) in vertices.iter().enumerate() {
            if v >= g.n() {
                return Err(EspError::VertexOutOfRange(v));
            }
            if seen[v] {
                return Err(EspError::InvalidPath(format!("vertex {v} repeats")));
            }
            seen[v] = true;
            if i > 0 && !g.has_edge(vertices[i - 1], v) {
                return Err(EspError::InvalidPath(format!(
                    "{} and {v} are not adjacent",
                    vertices[i - 1]
                )));
            }
        }
        Ok(Path(vertices))
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Vertex> {
        self.0
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> Vertex {
        self.0[0]
    }

    pub fn last(&self) -> Vertex {
        self.0[self.0.len() - 1]
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.contains(&v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    n: usize,
    dist: Vec<u32>,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: Vertex, v: Vertex) -> u32 {
        self.dist[u * self.n + v]
    }

    pub fn row(&self, u: Vertex) -> &[u32] {
        &self.dist[u * self.n..(u + 1) * self.n]
    }

    /// Distance from `v` to the nearest member of `set` (INF when `set` is empty).
    pub fn to_set(&self, v: Vertex, set: &[Vertex]) -> u32 {
        set.iter().map(|&u| self.get(v, u)).min().unwrap_or(INF)
    }

    pub fn eccentricity(&self, v: Vertex) -> u32 {
        self.row(v).iter().copied().max().unwrap_or(0)
    }

    pub fn diameter(&self) -> u32 {
        (0..self.n).map(|v| self.eccentricity(v)).max().unwrap_or(0)
    }

    pub fn radius(&self) -> u32 {
        (0..self.n).map(|v| self.eccentricity(v)).min().unwrap_or(0)
    }

    pub fn path_eccentricity(&self, p: &[Vertex]) -> u32 {
        (0..self.n).map(|v| self.to_set(v, p)).max().unwrap_or(0)
    }

    pub fn is_shortest(&self, p: &[Vertex]) -> bool {
        self.get(p[0], p[p.len() - 1]) as usize == p.len() - 1
    }
}

pub fn bfs_distances(g: &Graph, src: Vertex) -> Vec<u32> {
    multi_source_bfs(g, &[src])
}

/// Hop distance from the nearest source; INF when unreachable.
pub fn multi_source_bfs(g: &Graph, sources: &[Vertex]) -> Vec<u32> {
    let mut dist = vec![INF; g.n()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s] != 0 {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if dist[v] == INF {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// BFS that never enters vertices flagged in `blocked` (sources are always allowed).
pub fn bfs_avoiding(g: &Graph, src: Vertex, blocked: &[bool]) -> Vec<u32> {
    let mut dist = vec![INF; g.n()];
    dist[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if dist[v] == INF && !blocked[v] {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

pub fn all_pairs_distances(g: &Graph) -> DistanceMatrix {
    let n = g.n();
    let mut dist = Vec::with_capacity(n * n);
    for s in 0..n {
        dist.extend(bfs_distances(g, s));
    }
    DistanceMatrix { n, dist }
}

pub fn is_shortest_path(g: &Graph, p: &Path) -> bool {
    bfs_distances(g, p.first())[p.last()] as usize == p.len()
}

pub fn path_eccentricity(g: &Graph, p: &Path) -> Result<u32> {
    let d = multi_source_bfs(g, p.vertices());
    let ecc = d.iter().copied().max().unwrap_or(0);
    if ecc == INF {
        Err(EspError::Disconnected)
    } else {
        Ok(ecc)
    }
}

pub fn covers(g: &Graph, p: &Path, v: Vertex, ell: u32) -> bool {
    multi_source_bfs(g, p.vertices())[v] <= ell
}
