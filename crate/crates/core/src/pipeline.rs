//! Skeleton to path-cover instance and back.
//!
//! With `G - S` a forest, the part of a solution strictly between two
//! consecutive sequence vertices is a tree path, determined by its two ends.
//! A vertex of `B` (not covered by the sequence or by the radius rule) has
//! its nearest interior vertex in its own tree and at tree distance: a
//! shortest route through some `x` in `S` would give `d(v, x) + lo(x) <= ℓ`.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cpc::{cpc_solve_counted, CpcInstance};
use crate::error::{EspError, Result};
use crate::graph::{DistanceMatrix, Graph, Path, Vertex, VertexMap};
use crate::skeleton::{
    build_frame, realizes, solver_frames, x_options, Band, DistanceCodomain, Frame, Loc,
    SanityOutcome, SetContext, Skeleton,
};

const NONE: usize = usize::MAX;

/// Trees of `G - S`, numbered by smallest vertex, with parent pointers.
#[derive(Clone, Debug)]
pub struct ForestIndex {
    pub comp: Vec<usize>,
    pub comps: Vec<Vec<Vertex>>,
    parent: Vec<Vertex>,
    depth: Vec<u32>,
}

impl ForestIndex {
    pub fn new(ctx: &SetContext) -> Result<Self> {
        let g = ctx.g;
        let n = g.n();
        let mut comp = vec![NONE; n];
        let mut comps = Vec::new();
        let mut parent = vec![NONE; n];
        let mut depth = vec![0; n];
        for r in 0..n {
            if ctx.in_s[r] || comp[r] != NONE {
                continue;
            }
            let id = comps.len();
            comp[r] = id;
            let mut order = vec![r];
            let mut i = 0;
            let mut edges2 = 0;
            while i < order.len() {
                let u = order[i];
                i += 1;
                for &w in g.neighbors(u) {
                    if ctx.in_s[w] {
                        continue;
                    }
                    edges2 += 1;
                    if comp[w] == NONE {
                        comp[w] = id;
                        parent[w] = u;
                        depth[w] = depth[u] + 1;
                        order.push(w);
                    }
                }
            }
            if edges2 / 2 + 1 != order.len() {
                return Err(EspError::Precondition("G - S is not a forest".into()));
            }
            order.sort_unstable();
            comps.push(order);
        }
        Ok(ForestIndex { comp, comps, parent, depth })
    }

    /// The tree path from `a` to `b`; both must lie in one tree.
    pub fn tree_path(&self, a: Vertex, b: Vertex) -> Vec<Vertex> {
        let (mut x, mut y) = (a, b);
        let mut front = Vec::new();
        let mut back = Vec::new();
        while self.depth[x] > self.depth[y] {
            front.push(x);
            x = self.parent[x];
        }
        while self.depth[y] > self.depth[x] {
            back.push(y);
            y = self.parent[y];
        }
        while x != y {
            front.push(x);
            back.push(y);
            x = self.parent[x];
            y = self.parent[y];
        }
        front.push(x);
        front.extend(back.into_iter().rev());
        front
    }
}

/// Everything about a skeleton that only depends on its sequence.
#[derive(Clone, Debug)]
pub struct FrameData {
    pub frame: Frame,
    /// Per segment, interiors of the shortest segment paths through `G - S`.
    pub cands: Vec<Vec<Vec<Vertex>>>,
    cand_comp: Vec<Vec<usize>>,
    /// `[segment][candidate][j]`: distance from `frame.x[j]` to the interior.
    min_dist: Vec<Vec<Vec<u32>>>,
    /// Vertices outside `S` farther than ℓ from every sequence vertex.
    far: Vec<Vertex>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Marking {
    pub b0: Vec<Vertex>,
    /// Components holding a `B` vertex.
    pub c1: Vec<usize>,
    /// `c1` plus one component per segment from the second step, sorted.
    pub c_star: Vec<usize>,
    /// Per segment: surviving candidate indices grouped by component.
    pub families: Vec<BTreeMap<usize, Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnrichedSkeleton {
    pub base: Skeleton,
    /// Component hosting each segment; `None` exactly on edges.
    pub gamma: Vec<Option<usize>>,
}

pub struct CpcBuild {
    pub inst: CpcInstance,
    pub map: VertexMap,
    /// Segment served by each family.
    pub segment: Vec<usize>,
    /// Candidate index behind each family path.
    pub cand: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineStats {
    pub skeletons: u64,
    pub sanity1: u64,
    pub enriched: u64,
    pub dp_entries: u64,
}

impl std::ops::AddAssign for PipelineStats {
    fn add_assign(&mut self, o: Self) {
        self.skeletons += o.skeletons;
        self.sanity1 += o.sanity1;
        self.enriched += o.enriched;
        self.dp_entries += o.dp_entries;
    }
}

#[derive(Clone, Debug)]
pub struct Decision {
    pub path: Option<(Path, Skeleton)>,
    pub stats: PipelineStats,
}

pub struct Pipeline<'a> {
    pub ctx: SetContext<'a>,
    pub cod: DistanceCodomain,
    pub forest: ForestIndex,
}

pub fn rr2(c1: &[usize], k: usize) -> bool {
    c1.len() < k + 2
}

/// `G` without the trees of `G - S` outside `c_star`.
pub fn rr3_prune(ctx: &SetContext, forest: &ForestIndex, c_star: &[usize]) -> (Graph, VertexMap) {
    let gone: Vec<Vertex> = (0..ctx.g.n())
        .filter(|&v| !ctx.in_s[v] && c_star.binary_search(&forest.comp[v]).is_err())
        .collect();
    ctx.g.remove_vertices(&gone)
}

/// All maps sending each non-edge segment to a component of `c_star`.
pub fn enumerate_enriched(sk: &Skeleton, fd: &FrameData, c_star: &[usize]) -> Vec<EnrichedSkeleton> {
    let mut out = vec![Vec::new()];
    for seg in &fd.frame.segments {
        if seg.is_edge() {
            for gm in &mut out {
                gm.push(None);
            }
        } else {
            out = out
                .into_iter()
                .flat_map(|gm| {
                    c_star.iter().map(move |&c| {
                        let mut gm = gm.clone();
                        gm.push(Some(c));
                        gm
                    })
                })
                .collect();
        }
    }
    out.into_iter().map(|gamma| EnrichedSkeleton { base: sk.clone(), gamma }).collect()
}

/// Item 1: `γ` is empty exactly on edges. Item 2: the chosen component
/// hosts a segment path meeting every constraint.
pub fn sanity_test_2(fd: &FrameData, marking: &Marking, esk: &EnrichedSkeleton) -> SanityOutcome {
    for (i, seg) in fd.frame.segments.iter().enumerate() {
        match esk.gamma.get(i).copied().flatten() {
            None if seg.is_edge() => {}
            Some(c) if !seg.is_edge() => {
                if !marking.families[i].contains_key(&c) {
                    return SanityOutcome::Fail(2);
                }
            }
            _ => return SanityOutcome::Fail(1),
        }
    }
    if esk.gamma.len() != fd.frame.segments.len() {
        return SanityOutcome::Fail(1);
    }
    SanityOutcome::Pass
}

impl<'a> Pipeline<'a> {
    pub fn new(g: &'a Graph, dist: &'a DistanceMatrix, s: &[Vertex], cod: DistanceCodomain) -> Result<Self> {
        let ctx = SetContext::new(g, dist, s)?;
        let forest = ForestIndex::new(&ctx)?;
        Ok(Pipeline { ctx, cod, forest })
    }

    /// `None` when items 4 or 5 of the first sanity test fail.
    pub fn prepare_frame(&self, m0: Vertex, m_last: Vertex, m: &[Vertex]) -> Option<FrameData> {
        let ctx = &self.ctx;
        let dist = ctx.dist;
        let frame = build_frame(ctx, m0, m_last, m).ok()?;
        let mut cands = Vec::with_capacity(frame.segments.len());
        let mut cand_comp = Vec::with_capacity(frame.segments.len());
        let mut min_dist = Vec::with_capacity(frame.segments.len());
        for seg in &frame.segments {
            let mut cs = Vec::new();
            if !seg.is_edge() {
                for &a in ctx.g.neighbors(seg.a) {
                    if ctx.in_s[a] {
                        continue;
                    }
                    for &b in ctx.g.neighbors(seg.b) {
                        if ctx.in_s[b] || self.forest.comp[a] != self.forest.comp[b] {
                            continue;
                        }
                        let p = self.forest.tree_path(a, b);
                        if p.len() as u32 + 1 == seg.d {
                            cs.push(p);
                        }
                    }
                }
            }
            cand_comp.push(cs.iter().map(|p| self.forest.comp[p[0]]).collect());
            min_dist.push(
                cs.iter()
                    .map(|p| {
                        frame
                            .x
                            .iter()
                            .map(|&x| p.iter().map(|&w| dist.get(x, w)).min().unwrap())
                            .collect()
                    })
                    .collect(),
            );
            cands.push(cs);
        }
        let ell = self.cod.ell();
        let far = (0..ctx.g.n())
            .filter(|&v| !ctx.in_s[v] && frame.seq.iter().all(|&u| dist.get(u, v) > ell))
            .collect();
        Some(FrameData { frame, cands, cand_comp, min_dist, far })
    }

    /// Items 1 to 3 of the first sanity test, given the frame already
    /// passed items 4 and 5.
    fn items_1_to_3(&self, fd: &FrameData, sk: &Skeleton) -> bool {
        let dist = self.ctx.dist;
        let seq = &fd.frame.seq;
        sk.x.iter().zip(&sk.f).zip(&sk.g).all(|((&x, b), loc)| {
            seq.iter().all(|&u| dist.get(u, x) >= b.lo)
                && match *loc {
                    Loc::At(i) => i < seq.len() && dist.get(x, seq[i]) <= b.hi,
                    Loc::Between(i) => i < fd.frame.segments.len() && !fd.frame.segments[i].is_edge(),
                }
        })
    }

    pub fn mark_components(&self, fd: &FrameData, sk: &Skeleton) -> Marking {
        let dist = self.ctx.dist;
        let ell = self.cod.ell();
        let b0: Vec<Vertex> = fd
            .far
            .iter()
            .copied()
            .filter(|&v| sk.x.iter().zip(&sk.f).all(|(&x, b)| dist.get(v, x) + b.lo > ell))
            .collect();
        let mut c1: Vec<usize> = b0.iter().map(|&v| self.forest.comp[v]).collect();
        c1.sort_unstable();
        c1.dedup();
        let mut families = Vec::with_capacity(fd.cands.len());
        for (i, cs) in fd.cands.iter().enumerate() {
            let mut fam: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for ci in 0..cs.len() {
                let md = &fd.min_dist[i][ci];
                let ok = sk.f.iter().zip(&sk.g).enumerate().all(|(j, (b, loc))| {
                    md[j] >= b.lo && (*loc != Loc::Between(i) || md[j] <= b.hi)
                });
                if ok {
                    fam.entry(fd.cand_comp[i][ci]).or_default().push(ci);
                }
            }
            families.push(fam);
        }
        let mut c_star = c1.clone();
        for (i, seg) in fd.frame.segments.iter().enumerate() {
            if seg.is_edge() {
                continue;
            }
            if let Some(&c) = families[i].keys().find(|c| !c_star.contains(c)) {
                c_star.push(c);
            }
        }
        c_star.sort_unstable();
        Marking { b0, c1, c_star, families }
    }

    /// Forest of the `C1` trees and every tree `γ` uses. `None` when some
    /// family would be empty.
    pub fn build_cpc_instance(&self, fd: &FrameData, marking: &Marking, esk: &EnrichedSkeleton) -> Option<CpcBuild> {
        let mut trees: Vec<usize> = marking.c1.clone();
        trees.extend(esk.gamma.iter().flatten().copied());
        trees.sort_unstable();
        trees.dedup();
        let keep: Vec<Vertex> = trees.iter().flat_map(|&c| self.forest.comps[c].iter().copied()).collect();
        let (forest, map) = self.ctx.g.induced_subgraph(&keep);
        let b = marking.b0.iter().map(|&v| map.new_id(v).unwrap()).collect();
        let mut families = Vec::new();
        let mut segment = Vec::new();
        let mut cand = Vec::new();
        for (i, gm) in esk.gamma.iter().enumerate() {
            let Some(c) = gm else { continue };
            let idx = marking.families[i].get(c)?;
            families.push(
                idx.iter()
                    .map(|&ci| fd.cands[i][ci].iter().map(|&v| map.new_id(v).unwrap()).collect())
                    .collect(),
            );
            segment.push(i);
            cand.push(idx.clone());
        }
        let inst = CpcInstance { forest, b, ell: self.cod.ell(), families };
        Some(CpcBuild { inst, map, segment, cand })
    }

    /// Concatenates the sequence with the chosen interiors and checks the
    /// result against the skeleton.
    pub fn assemble_certificate(&self, fd: &FrameData, sk: &Skeleton, chosen: &[Option<usize>]) -> Result<Path> {
        let seq = &fd.frame.seq;
        let mut p = vec![seq[0]];
        for (i, seg) in fd.frame.segments.iter().enumerate() {
            if seg.d == 0 {
                continue;
            }
            if let Some(ci) = chosen[i] {
                p.extend_from_slice(&fd.cands[i][ci]);
            }
            p.push(seq[i + 1]);
        }
        let path = Path::new(self.ctx.g, p)
            .map_err(|e| EspError::Internal(format!("assembled walk is not a path: {e}")))?;
        if !self.ctx.dist.is_shortest(path.vertices()) || !realizes(&self.ctx, &self.cod, sk, &path) {
            return Err(EspError::Internal(format!(
                "assembled path {:?} does not realize its skeleton",
                path.vertices()
            )));
        }
        Ok(path)
    }

    /// Decides one skeleton. `failed` remembers instances already refuted
    /// in this frame, keyed by `B` and the surviving families.
    pub fn decide_skeleton(
        &self,
        fd: &FrameData,
        sk: &Skeleton,
        stats: &mut PipelineStats,
        failed: &mut HashSet<(Vec<Vertex>, Vec<BTreeMap<usize, Vec<usize>>>)>,
    ) -> Result<Option<Path>> {
        stats.skeletons += 1;
        if !self.items_1_to_3(fd, sk) {
            return Ok(None);
        }
        stats.sanity1 += 1;
        let marking = self.mark_components(fd, sk);
        if !rr2(&marking.c1, self.ctx.k()) {
            return Ok(None);
        }
        let segs = &fd.frame.segments;
        // Item 6 of the first sanity test.
        if segs.iter().zip(&marking.families).any(|(s, f)| !s.is_edge() && f.is_empty()) {
            return Ok(None);
        }
        let key = (marking.b0.clone(), marking.families.clone());
        if failed.contains(&key) {
            return Ok(None);
        }
        let mut tried = HashSet::new();
        for esk in enumerate_enriched(sk, fd, &marking.c_star) {
            stats.enriched += 1;
            if sanity_test_2(fd, &marking, &esk) != SanityOutcome::Pass {
                continue;
            }
            if !marking.c1.iter().all(|c| esk.gamma.contains(&Some(*c))) {
                continue;
            }
            // Trees without B vertices all serve a segment equally well.
            let sig: Vec<Option<usize>> = esk
                .gamma
                .iter()
                .map(|g| g.map(|c| if marking.c1.contains(&c) { c } else { NONE }))
                .collect();
            if !tried.insert(sig) {
                continue;
            }
            let Some(build) = self.build_cpc_instance(fd, &marking, &esk) else {
                continue;
            };
            let (sel, cs) = cpc_solve_counted(&build.inst)?;
            stats.dp_entries += cs.dp_entries;
            if let Some(sel) = sel {
                let mut chosen = vec![None; segs.len()];
                for (fi, &pi) in sel.iter().enumerate() {
                    chosen[build.segment[fi]] = Some(build.cand[fi][pi]);
                }
                return self.assemble_certificate(fd, sk, &chosen).map(Some);
            }
        }
        failed.insert(key);
        Ok(None)
    }

    /// Tries every skeleton on one sequence, choices per off-path vertex
    /// from `x_options`, first `X` vertex varying slowest.
    pub fn decide_frame(
        &self,
        m0: Vertex,
        m_last: Vertex,
        m: &[Vertex],
        budget: u64,
    ) -> Result<(Option<(Path, Skeleton)>, PipelineStats)> {
        let mut stats = PipelineStats::default();
        let Some(fd) = self.prepare_frame(m0, m_last, m) else {
            return Ok((None, stats));
        };
        let opts: Vec<Vec<(Band, Loc)>> =
            fd.frame.x.iter().map(|&x| x_options(&self.ctx, &self.cod, &fd.frame, x)).collect();
        if opts.iter().any(|o| o.is_empty()) {
            return Ok((None, stats));
        }
        let mut digits = vec![0usize; opts.len()];
        let mut failed = HashSet::new();
        loop {
            if stats.skeletons >= budget {
                return Err(EspError::Budget { needed: budget as u128 + 1, budget: budget as u128 });
            }
            let sk = Skeleton {
                m0,
                m_last,
                m: m.to_vec(),
                x: fd.frame.x.clone(),
                f: digits.iter().zip(&opts).map(|(&d, o)| o[d].0).collect(),
                g: digits.iter().zip(&opts).map(|(&d, o)| o[d].1).collect(),
            };
            if let Some(p) = self.decide_skeleton(&fd, &sk, &mut stats, &mut failed)? {
                return Ok((Some((p, sk)), stats));
            }
            let mut i = digits.len();
            loop {
                if i == 0 {
                    return Ok((None, stats));
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < opts[i].len() {
                    break;
                }
                digits[i] = 0;
            }
        }
    }

    /// Runs every solver frame; frames are decided in parallel chunks and
    /// scanned in order, so the answer and the counters (summed up to the
    /// winning frame) do not depend on the thread count.
    pub fn decide(&self, budget: u64) -> Result<Decision> {
        let frames = solver_frames(&self.ctx);
        let chunk = 4 * rayon::current_num_threads().max(1);
        let mut stats = PipelineStats::default();
        for part in frames.chunks(chunk) {
            let results: Vec<_> = part
                .par_iter()
                .map(|(m0, ml, m)| self.decide_frame(*m0, *ml, m, budget))
                .collect();
            for r in results {
                let (found, st) = r?;
                stats += st;
                if stats.skeletons > budget {
                    return Err(EspError::Budget { needed: stats.skeletons as u128, budget: budget as u128 });
                }
                if let Some(found) = found {
                    return Ok(Decision { path: Some(found), stats });
                }
            }
        }
        Ok(Decision { path: None, stats })
    }
}
