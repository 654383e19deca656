//! Skeletons: a guessed outline of a solution path. The endpoints, the
//! deletion-set vertices on the path in order, and for every deletion-set
//! vertex off the path a distance band and the place on the path that
//! attains it.

use serde::{Deserialize, Serialize};

use crate::error::{EspError, Result};
use crate::graph::{bfs_avoiding, DistanceMatrix, Graph, Path, Vertex, INF};

/// Inclusive range of distances. Exact codomains use `lo == hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Band {
    pub lo: u32,
    pub hi: u32,
}

impl Band {
    pub fn exact(d: u32) -> Band {
        Band { lo: d, hi: d }
    }

    pub fn contains(&self, d: u32) -> bool {
        self.lo <= d && d <= self.hi
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DistanceCodomain {
    Exact { ell: u32 },
    Quantized { ell: u32, q: Vec<u32> },
    Approx { ell: u32, eps: f64 },
}

impl DistanceCodomain {
    pub fn ell(&self) -> u32 {
        match *self {
            DistanceCodomain::Exact { ell }
            | DistanceCodomain::Quantized { ell, .. }
            | DistanceCodomain::Approx { ell, .. } => ell,
        }
    }

    /// Width of an approximation band: ceil(εℓ), at least 1. The small
    /// tolerance keeps products like 0.1 * 30 from rounding up a step.
    pub fn approx_width(eps: f64, ell: u32) -> u32 {
        ((eps * ell as f64 - 1e-9).ceil() as u32).max(1)
    }

    pub fn bands(&self) -> Vec<Band> {
        match self {
            DistanceCodomain::Exact { ell } => (1..=*ell).map(Band::exact).collect(),
            DistanceCodomain::Quantized { ell, q } => {
                let mut q: Vec<u32> = q.iter().copied().filter(|&d| d >= 1 && d <= *ell).collect();
                q.sort_unstable();
                q.dedup();
                q.into_iter().map(Band::exact).collect()
            }
            DistanceCodomain::Approx { ell, eps } => {
                let w = Self::approx_width(*eps, *ell);
                let mut out = Vec::new();
                let mut lo = 1;
                while lo <= *ell {
                    out.push(Band { lo, hi: (lo + w - 1).min(*ell) });
                    lo += w;
                }
                out
            }
        }
    }

    pub fn band_of(&self, d: u32) -> Option<Band> {
        self.bands().into_iter().find(|b| b.contains(d))
    }

    /// A vertex `x` off the path with band `b` sits within `b.hi` of the path,
    /// so it covers every vertex within `ℓ - b.lo` of itself up to the slack
    /// of the band.
    pub fn radius(&self, b: Band) -> u32 {
        self.ell().saturating_sub(b.lo)
    }

    /// Eccentricity any realization is guaranteed to reach.
    pub fn coverage_bound(&self) -> u32 {
        self.ell() + self.bands().iter().map(|b| b.hi - b.lo).max().unwrap_or(0)
    }
}

/// Where an off-path vertex attains its distance: at the `i`-th sequence
/// vertex, or strictly inside the segment between sequence vertices `i`, `i+1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loc {
    At(usize),
    Between(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Skeleton {
    pub m0: Vertex,
    pub m_last: Vertex,
    pub m: Vec<Vertex>,
    /// Sorted. `f` and `g` are indexed in parallel.
    pub x: Vec<Vertex>,
    pub f: Vec<Band>,
    pub g: Vec<Loc>,
}

impl Skeleton {
    /// `m0, M..., m_last`. Index `i` here is the index used by `Loc`.
    pub fn seq(&self) -> Vec<Vertex> {
        let mut s = Vec::with_capacity(self.m.len() + 2);
        s.push(self.m0);
        s.extend_from_slice(&self.m);
        s.push(self.m_last);
        s
    }

    pub fn band(&self, x: Vertex) -> Option<Band> {
        self.x.binary_search(&x).ok().map(|i| self.f[i])
    }
}

/// A graph with a fixed deletion set and its distance matrix.
pub struct SetContext<'a> {
    pub g: &'a Graph,
    pub dist: &'a DistanceMatrix,
    pub s: Vec<Vertex>,
    pub in_s: Vec<bool>,
}

impl<'a> SetContext<'a> {
    pub fn new(g: &'a Graph, dist: &'a DistanceMatrix, s: &[Vertex]) -> Result<Self> {
        let mut in_s = vec![false; g.n()];
        for &v in s {
            if v >= g.n() {
                return Err(EspError::VertexOutOfRange(v));
            }
            in_s[v] = true;
        }
        let s = (0..g.n()).filter(|&v| in_s[v]).collect();
        Ok(SetContext { g, dist, s, in_s })
    }

    pub fn k(&self) -> usize {
        self.s.len()
    }

    /// Distances from `src` in `G - (S \ keep)`.
    pub fn restricted_bfs(&self, src: Vertex, keep: &[Vertex]) -> Vec<u32> {
        let mut blocked = self.in_s.clone();
        for &v in keep {
            blocked[v] = false;
        }
        bfs_avoiding(self.g, src, &blocked)
    }
}

/// Unique order in which a shortest path starting at `s` can meet `m`,
/// or `None` when two members are equally far from `s`.
pub fn order_on_shortest_path(
    dist: &DistanceMatrix,
    m: &[Vertex],
    s: Vertex,
) -> Option<Vec<Vertex>> {
    let mut ord = m.to_vec();
    ord.sort_by_key(|&v| (dist.get(s, v), v));
    if ord.windows(2).any(|w| dist.get(s, w[0]) == dist.get(s, w[1])) {
        None
    } else {
        Some(ord)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub a: Vertex,
    pub b: Vertex,
    pub d: u32,
    /// Vertices strictly inside some shortest `a`-`b` path avoiding the rest of S.
    /// Empty when `d <= 1`.
    pub members: Vec<Vertex>,
}

impl Segment {
    pub fn is_edge(&self) -> bool {
        self.d <= 1
    }
}

/// The part of a skeleton fixed by endpoints and on-path deletion vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub seq: Vec<Vertex>,
    pub segments: Vec<Segment>,
    pub x: Vec<Vertex>,
}

impl Frame {
    pub fn m_len(&self) -> usize {
        self.seq.len() - 2
    }
}

/// Checks items 4 and 5 of the first sanity test, which only depend on the
/// sequence. On top of the per-segment test, the segment lengths must add up
/// to `d(m0, m_last)`: without it, `0, 8, 4` on a 10-cycle with `S = {3, 8}`
/// would pass although no shortest path visits them in that order.
pub fn build_frame(
    ctx: &SetContext,
    m0: Vertex,
    m_last: Vertex,
    m: &[Vertex],
) -> std::result::Result<Frame, u8> {
    let mut seq = Vec::with_capacity(m.len() + 2);
    seq.push(m0);
    seq.extend_from_slice(m);
    seq.push(m_last);
    let total: u64 = seq.windows(2).map(|w| ctx.dist.get(w[0], w[1]) as u64).sum();
    if total != ctx.dist.get(m0, m_last) as u64 {
        return Err(4);
    }
    let mut segments = Vec::with_capacity(seq.len() - 1);
    let mut owner = vec![usize::MAX; ctx.g.n()];
    for (i, w) in seq.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let d = ctx.dist.get(a, b);
        let mut members = Vec::new();
        if d >= 2 {
            let da = ctx.restricted_bfs(a, &[a, b]);
            if da[b] != d {
                return Err(4);
            }
            let db = ctx.restricted_bfs(b, &[a, b]);
            for v in 0..ctx.g.n() {
                if v != a && v != b && !ctx.in_s[v] && da[v] != INF && db[v] != INF
                    && da[v] + db[v] == d
                {
                    if owner[v] != usize::MAX {
                        return Err(5);
                    }
                    owner[v] = i;
                    members.push(v);
                }
            }
        }
        segments.push(Segment { a, b, d, members });
    }
    let on_seq: Vec<bool> = (0..ctx.g.n()).map(|v| seq.contains(&v)).collect();
    let x = ctx.s.iter().copied().filter(|&v| !on_seq[v]).collect();
    Ok(Frame { seq, segments, x })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SanityOutcome {
    Pass,
    Fail(u8),
}

/// Items 1 to 5 of the first sanity test. Item 6 (an empty family for a
/// segment some vertex is assigned to) needs the component structure and is
/// answered by the pipeline.
pub fn sanity_test_1(ctx: &SetContext, sk: &Skeleton) -> SanityOutcome {
    let seq = sk.seq();
    let nseg = seq.len() - 1;
    for &loc in &sk.g {
        if let Loc::Between(i) = loc {
            if i >= nseg || ctx.dist.get(seq[i], seq[i + 1]) <= 1 {
                return SanityOutcome::Fail(1);
            }
        }
    }
    for (j, &x) in sk.x.iter().enumerate() {
        if seq.iter().any(|&u| ctx.dist.get(u, x) < sk.f[j].lo) {
            return SanityOutcome::Fail(2);
        }
    }
    for (j, &x) in sk.x.iter().enumerate() {
        if let Loc::At(i) = sk.g[j] {
            if i >= seq.len() || ctx.dist.get(x, seq[i]) > sk.f[j].hi {
                return SanityOutcome::Fail(3);
            }
        }
    }
    match build_frame(ctx, sk.m0, sk.m_last, &sk.m) {
        Ok(_) => SanityOutcome::Pass,
        Err(item) => SanityOutcome::Fail(item),
    }
}

/// Positions of the sequence vertices along `p`, if `p` visits them in order.
fn seq_positions(seq: &[Vertex], p: &[Vertex]) -> Option<Vec<usize>> {
    let mut pos = Vec::with_capacity(seq.len());
    pos.push(0);
    let mut from = 0;
    for &v in &seq[1..seq.len() - 1] {
        let q = from + p[from..].iter().position(|&w| w == v)?;
        pos.push(q);
        from = q;
    }
    pos.push(p.len() - 1);
    Some(pos)
}

pub fn realizes(ctx: &SetContext, cod: &DistanceCodomain, sk: &Skeleton, p: &Path) -> bool {
    let pv = p.vertices();
    let dist = ctx.dist;
    if p.first() != sk.m0 || p.last() != sk.m_last {
        return false;
    }
    let interior_s: Vec<Vertex> = if pv.len() >= 2 {
        pv[1..pv.len() - 1].iter().copied().filter(|&v| ctx.in_s[v]).collect()
    } else {
        Vec::new()
    };
    if interior_s != sk.m {
        return false;
    }
    let expect_x: Vec<Vertex> = ctx
        .s
        .iter()
        .copied()
        .filter(|v| !pv.contains(v))
        .collect();
    if expect_x != sk.x || sk.f.len() != sk.x.len() || sk.g.len() != sk.x.len() {
        return false;
    }
    if dist.path_eccentricity(pv) > cod.coverage_bound() {
        return false;
    }
    let seq = sk.seq();
    let Some(pos) = seq_positions(&seq, pv) else {
        return false;
    };
    for (j, &x) in sk.x.iter().enumerate() {
        let band = sk.f[j];
        if pv.iter().any(|&w| dist.get(x, w) < band.lo) {
            return false;
        }
        let attained = match sk.g[j] {
            Loc::At(i) => i < seq.len() && dist.get(x, seq[i]) <= band.hi,
            Loc::Between(i) => {
                i + 1 < pos.len()
                    && pv[pos[i] + 1..pos[i + 1]].iter().any(|&w| dist.get(x, w) <= band.hi)
            }
        };
        if !attained {
            return false;
        }
    }
    true
}

/// Reads the skeleton off a solution path: the nearest path vertex of each
/// off-path deletion vertex (first in path order on ties) gives its location.
pub fn extract_skeleton(ctx: &SetContext, cod: &DistanceCodomain, p: &Path) -> Result<Skeleton> {
    let pv = p.vertices();
    if !ctx.dist.is_shortest(pv) {
        return Err(EspError::Precondition("not a shortest path".into()));
    }
    if ctx.dist.path_eccentricity(pv) > cod.ell() {
        return Err(EspError::Precondition("eccentricity exceeds ell".into()));
    }
    let m: Vec<Vertex> = if pv.len() >= 2 {
        pv[1..pv.len() - 1].iter().copied().filter(|&v| ctx.in_s[v]).collect()
    } else {
        Vec::new()
    };
    let x: Vec<Vertex> = ctx.s.iter().copied().filter(|v| !pv.contains(v)).collect();
    let sk0 = Skeleton { m0: p.first(), m_last: p.last(), m, x, f: vec![], g: vec![] };
    let seq = sk0.seq();
    let pos = seq_positions(&seq, pv).expect("sequence read from the path");
    let mut f = Vec::with_capacity(sk0.x.len());
    let mut g = Vec::with_capacity(sk0.x.len());
    for &xv in &sk0.x {
        let d = ctx.dist.to_set(xv, pv);
        let band = cod.band_of(d).ok_or_else(|| {
            EspError::Precondition(format!("distance {d} of vertex {xv} is outside the codomain"))
        })?;
        let q = pv.iter().position(|&w| ctx.dist.get(xv, w) == d).unwrap();
        let loc = match pos.iter().position(|&pq| pq == q) {
            Some(i) => Loc::At(i),
            None => Loc::Between(pos.iter().rposition(|&pq| pq < q).unwrap()),
        };
        f.push(band);
        g.push(loc);
    }
    Ok(Skeleton { f, g, ..sk0 })
}

/// n²·2^k·k!·ℓ^k·(2k+2)^k, saturating.
pub fn skeleton_bound(n: usize, k: usize, ell: u32) -> u128 {
    let mut b = (n as u128).saturating_mul(n as u128);
    for i in 1..=k as u128 {
        b = b
            .saturating_mul(2)
            .saturating_mul(i)
            .saturating_mul(ell as u128)
            .saturating_mul(2 * k as u128 + 2);
    }
    b
}

#[derive(Clone, Debug)]
struct RawFrame {
    m0: Vertex,
    m_last: Vertex,
    m: Vec<Vertex>,
    x: Vec<Vertex>,
}

fn raw_frames(ctx: &SetContext) -> Vec<RawFrame> {
    let n = ctx.g.n();
    let mut out = Vec::new();
    for m0 in 0..n {
        for m_last in 0..n {
            let rest: Vec<Vertex> =
                ctx.s.iter().copied().filter(|&v| v != m0 && v != m_last).collect();
            for mask in 0u64..(1u64 << rest.len()) {
                let chosen: Vec<Vertex> = (0..rest.len())
                    .filter(|&i| mask >> i & 1 == 1)
                    .map(|i| rest[i])
                    .collect();
                let Some(m) = order_on_shortest_path(ctx.dist, &chosen, m0) else {
                    continue;
                };
                let x = (0..rest.len())
                    .filter(|&i| mask >> i & 1 == 0)
                    .map(|i| rest[i])
                    .collect();
                out.push(RawFrame { m0, m_last, m, x });
            }
        }
    }
    out
}

fn frame_radix(nbands: usize, m_len: usize) -> u128 {
    nbands as u128 * (2 * m_len as u128 + 3)
}

fn frame_count(nbands: usize, fr: &RawFrame) -> u128 {
    let r = frame_radix(nbands, fr.m.len());
    (0..fr.x.len()).fold(1u128, |acc, _| acc.saturating_mul(r))
}

/// Number of skeletons `enumerate_skeletons` emits, without emitting them.
pub fn skeleton_count(ctx: &SetContext, cod: &DistanceCodomain) -> u128 {
    let nb = cod.bands().len();
    raw_frames(ctx).iter().map(|f| frame_count(nb, f)).fold(0u128, u128::saturating_add)
}

/// Every skeleton, in the order: endpoints lexicographic, on-path subsets by
/// mask, then `(f, g)` choices as a mixed-radix counter over `X`.
pub struct SkeletonStream {
    frames: Vec<RawFrame>,
    bands: Vec<Band>,
    frame: usize,
    digits: Vec<usize>,
}

impl Iterator for SkeletonStream {
    type Item = Skeleton;

    fn next(&mut self) -> Option<Skeleton> {
        loop {
            let fr = self.frames.get(self.frame)?;
            if !fr.x.is_empty() && self.bands.is_empty() {
                self.frame += 1;
                continue;
            }
            let nloc = 2 * fr.m.len() + 3;
            let idx_locs = fr.m.len() + 2;
            if self.digits.len() != fr.x.len() {
                self.digits = vec![0; fr.x.len()];
            }
            let mut f = Vec::with_capacity(fr.x.len());
            let mut g = Vec::with_capacity(fr.x.len());
            for &d in &self.digits {
                f.push(self.bands[d / nloc]);
                let l = d % nloc;
                g.push(if l < idx_locs { Loc::At(l) } else { Loc::Between(l - idx_locs) });
            }
            let sk = Skeleton {
                m0: fr.m0,
                m_last: fr.m_last,
                m: fr.m.clone(),
                x: fr.x.clone(),
                f,
                g,
            };
            let radix = self.bands.len() * nloc;
            let mut carry = true;
            for d in self.digits.iter_mut().rev() {
                *d += 1;
                if *d < radix {
                    carry = false;
                    break;
                }
                *d = 0;
            }
            if carry {
                self.frame += 1;
                self.digits.clear();
            }
            return Some(sk);
        }
    }
}

/// Streams every skeleton, after checking the total against `budget`.
pub fn enumerate_skeletons(
    ctx: &SetContext,
    cod: &DistanceCodomain,
    budget: u128,
) -> Result<SkeletonStream> {
    let needed = skeleton_count(ctx, cod);
    if needed > budget {
        return Err(EspError::Budget { needed, budget });
    }
    Ok(SkeletonStream {
        frames: raw_frames(ctx),
        bands: cod.bands(),
        frame: 0,
        digits: Vec::new(),
    })
}

/// Sequences the solvers try: `m0 <= m_last` (a reversed path realizes the
/// mirrored skeleton), fewer on-path deletion vertices first.
pub fn solver_frames(ctx: &SetContext) -> Vec<(Vertex, Vertex, Vec<Vertex>)> {
    let n = ctx.g.n();
    let mut out: Vec<(usize, Vertex, Vertex, u64, Vec<Vertex>)> = Vec::new();
    for m0 in 0..n {
        for m_last in m0..n {
            let rest: Vec<Vertex> =
                ctx.s.iter().copied().filter(|&v| v != m0 && v != m_last).collect();
            for mask in 0u64..(1u64 << rest.len()) {
                let chosen: Vec<Vertex> = (0..rest.len())
                    .filter(|&i| mask >> i & 1 == 1)
                    .map(|i| rest[i])
                    .collect();
                if let Some(m) = order_on_shortest_path(ctx.dist, &chosen, m0) {
                    out.push((m.len(), m0, m_last, mask, m));
                }
            }
        }
    }
    out.sort_by_key(|a| (a.0, a.1, a.2, a.3));
    out.into_iter().map(|(_, a, b, _, m)| (a, b, m)).collect()
}

/// `(band, location)` choices for an off-path vertex that can pass items 1-3,
/// one representative per realizable situation. A location at a sequence
/// vertex is only offered at the first nearest one with the band holding that
/// distance; a segment location needs a band starting below the sequence
/// distance and a segment member inside the band.
pub fn x_options(
    ctx: &SetContext,
    cod: &DistanceCodomain,
    frame: &Frame,
    x: Vertex,
) -> Vec<(Band, Loc)> {
    let dist = ctx.dist;
    let (arg, mu) = frame
        .seq
        .iter()
        .enumerate()
        .map(|(i, &u)| (i, dist.get(x, u)))
        .min_by_key(|&(i, d)| (d, i))
        .unwrap();
    let mut out = Vec::new();
    if let Some(b) = cod.band_of(mu) {
        out.push((b, Loc::At(arg)));
    }
    for (i, seg) in frame.segments.iter().enumerate() {
        if seg.is_edge() {
            continue;
        }
        for b in cod.bands() {
            if b.lo < mu && seg.members.iter().any(|&w| b.contains(dist.get(x, w))) {
                out.push((b, Loc::Between(i)));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cycle, path, random_connected, star};
    use crate::graph::all_pairs_distances;
    use crate::oracle::esp_decide_oracle;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn order_examples() {
        let d = all_pairs_distances(&path(5));
        assert_eq!(order_on_shortest_path(&d, &[3, 1], 0), Some(vec![1, 3]));
        let d = all_pairs_distances(&cycle(4));
        assert_eq!(order_on_shortest_path(&d, &[1, 3], 0), None);
        assert_eq!(order_on_shortest_path(&d, &[], 0), Some(vec![]));
    }

    #[test]
    fn empty_set_gives_n_squared() {
        let g = cycle(5);
        let d = all_pairs_distances(&g);
        let ctx = SetContext::new(&g, &d, &[]).unwrap();
        let cod = DistanceCodomain::Exact { ell: 2 };
        assert_eq!(enumerate_skeletons(&ctx, &cod, u128::MAX).unwrap().count(), 25);
        assert_eq!(skeleton_count(&ctx, &cod), 25);
    }

    #[test]
    fn bound_formula() {
        assert_eq!(skeleton_bound(5, 1, 2), 400);
        assert_eq!(skeleton_bound(4, 0, 0), 16);
    }

    #[test]
    fn approx_has_two_bands() {
        let cod = DistanceCodomain::Approx { ell: 4, eps: 0.5 };
        assert_eq!(cod.bands(), vec![Band { lo: 1, hi: 2 }, Band { lo: 3, hi: 4 }]);
        let g = star(3);
        let d = all_pairs_distances(&g);
        let ctx = SetContext::new(&g, &d, &[1, 2, 3]).unwrap();
        // Endpoints 0,0 leave M empty and X = {1,2,3}: 2 band choices each.
        let fmaps: std::collections::HashSet<Vec<Band>> = enumerate_skeletons(&ctx, &cod, u128::MAX)
            .unwrap()
            .filter(|s| s.m0 == 0 && s.m_last == 0 && s.x.len() == 3)
            .map(|s| s.f)
            .collect();
        assert_eq!(fmaps.len(), 8);
        assert_eq!(DistanceCodomain::approx_width(0.1, 30), 3);
    }

    #[test]
    fn stream_matches_count_and_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..30 {
            let g = random_connected(6, 0.3, &mut rng);
            let d = all_pairs_distances(&g);
            let ctx = SetContext::new(&g, &d, &[1, 4]).unwrap();
            for ell in 1..=3 {
                let cod = DistanceCodomain::Exact { ell };
                let c = enumerate_skeletons(&ctx, &cod, u128::MAX).unwrap().count() as u128;
                assert_eq!(c, skeleton_count(&ctx, &cod));
                assert!(c <= skeleton_bound(6, 2, ell));
            }
        }
    }

    #[test]
    fn budget_is_checked_first() {
        let g = cycle(5);
        let d = all_pairs_distances(&g);
        let ctx = SetContext::new(&g, &d, &[0]).unwrap();
        let cod = DistanceCodomain::Exact { ell: 2 };
        assert!(matches!(
            enumerate_skeletons(&ctx, &cod, 3),
            Err(EspError::Budget { budget: 3, .. })
        ));
    }

    #[test]
    fn sanity_examples() {
        let g = path(4);
        let d = all_pairs_distances(&g);
        let ctx = SetContext::new(&g, &d, &[3]).unwrap();
        let sk = Skeleton {
            m0: 0,
            m_last: 1,
            m: vec![],
            x: vec![3],
            f: vec![Band::exact(2)],
            g: vec![Loc::Between(0)],
        };
        assert_eq!(sanity_test_1(&ctx, &sk), SanityOutcome::Fail(1));
        let ctx = SetContext::new(&g, &d, &[1]).unwrap();
        let sk = Skeleton {
            m0: 0,
            m_last: 3,
            m: vec![],
            x: vec![1],
            f: vec![Band::exact(3)],
            g: vec![Loc::At(0)],
        };
        assert_eq!(sanity_test_1(&ctx, &sk), SanityOutcome::Fail(2));
        let t = path(6);
        let d = all_pairs_distances(&t);
        let ctx = SetContext::new(&t, &d, &[]).unwrap();
        let sk = Skeleton { m0: 2, m_last: 2, m: vec![], x: vec![], f: vec![], g: vec![] };
        assert_eq!(sanity_test_1(&ctx, &sk), SanityOutcome::Pass);
    }

    #[test]
    fn additivity_is_enforced() {
        let g = cycle(10);
        let d = all_pairs_distances(&g);
        let ctx = SetContext::new(&g, &d, &[3]).unwrap();
        assert_eq!(build_frame(&ctx, 0, 5, &[3]).map(|_| ()), Ok(()));
        let ctx = SetContext::new(&g, &d, &[3, 8]).unwrap();
        assert_eq!(build_frame(&ctx, 0, 4, &[3]).map(|_| ()), Ok(()));
        assert_eq!(build_frame(&ctx, 0, 4, &[8]).map(|_| ()), Err(4));
    }

    #[test]
    fn extract_examples() {
        let g = path(4);
        let d = all_pairs_distances(&g);
        let ctx = SetContext::new(&g, &d, &[1]).unwrap();
        let cod = DistanceCodomain::Exact { ell: 0 };
        let p = Path::new(&g, vec![0, 1, 2, 3]).unwrap();
        let sk = extract_skeleton(&ctx, &cod, &p).unwrap();
        assert_eq!((sk.m.clone(), sk.x.len()), (vec![1], 0));
        assert!(realizes(&ctx, &cod, &sk, &p));
        let s = star(4);
        let d = all_pairs_distances(&s);
        let ctx = SetContext::new(&s, &d, &[0]).unwrap();
        let cod = DistanceCodomain::Exact { ell: 1 };
        let p = Path::new(&s, vec![1, 0, 2]).unwrap();
        assert_eq!(extract_skeleton(&ctx, &cod, &p).unwrap().m, vec![0]);
    }

    #[test]
    fn realizes_rejects_x_on_path() {
        let g = path(4);
        let d = all_pairs_distances(&g);
        let ctx = SetContext::new(&g, &d, &[2]).unwrap();
        let cod = DistanceCodomain::Exact { ell: 3 };
        let sk = Skeleton {
            m0: 0,
            m_last: 3,
            m: vec![],
            x: vec![2],
            f: vec![Band::exact(1)],
            g: vec![Loc::At(0)],
        };
        let p = Path::new(&g, vec![0, 1, 2, 3]).unwrap();
        assert!(!realizes(&ctx, &cod, &sk, &p));
    }

    #[test]
    fn round_trip_on_oracle_certificates() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let n = rand::Rng::gen_range(&mut rng, 2..=8);
            let g = random_connected(n, 0.25, &mut rng);
            let d = all_pairs_distances(&g);
            let s: Vec<Vertex> = (0..n).filter(|_| rand::Rng::gen_bool(&mut rng, 0.3)).take(2).collect();
            let ctx = SetContext::new(&g, &d, &s).unwrap();
            for ell in 0..=d.diameter() {
                let Some(p) = esp_decide_oracle(&g, ell).unwrap().certificate else {
                    continue;
                };
                for cod in [
                    DistanceCodomain::Exact { ell },
                    DistanceCodomain::Approx { ell, eps: 0.5 },
                ] {
                    let sk = extract_skeleton(&ctx, &cod, &p).unwrap();
                    assert!(realizes(&ctx, &cod, &sk, &p));
                    assert_eq!(sanity_test_1(&ctx, &sk), SanityOutcome::Pass);
                    let all: Vec<Skeleton> =
                        enumerate_skeletons(&ctx, &cod, u128::MAX).unwrap().collect();
                    assert!(all.contains(&sk));
                }
            }
        }
    }
}
