//! ESP parameterized by a split vertex deletion set.
//!
//! With `G - S` split into a clique `C` and an independent set `I`, a
//! shortest path meets `C` at most twice, and between two consecutive
//! vertices of `S ∪ C` (or the ends) it has at most one vertex, which lies
//! in `I`. A guess fixes those anchors, the distance class of every
//! off-path vertex of `S` and, for the close ones not explained by an
//! anchor, the gap whose middle vertex explains it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deletion::{split_bipartition, DeletionKind, DeletionSet};
use crate::error::{EspError, Result};
use crate::graph::{all_pairs_distances, DistanceMatrix, Graph, Path, Vertex};
use crate::oracle::{check_connected, esp_decide_oracle_with, EspAnswer, DEFAULT_ORACLE_BUDGET};
use crate::skeleton::order_on_shortest_path;

/// ℓ at or below which the oracle answers instead.
pub const DEFAULT_SVD_THRESHOLD: u32 = 4;

/// Distance classes 1..=4 are exact; 5 stands for "at least 5".
const FAR: u32 = 5;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitGuess {
    pub m0: Vertex,
    pub m_last: Vertex,
    /// Interior anchors from `S` and `C`, in path order.
    pub anchors: Vec<Vertex>,
    /// Distance class of each off-path vertex of `S`, parallel to `x`.
    pub x: Vec<Vertex>,
    pub class: Vec<u32>,
    /// Gap whose middle vertex attains the distance, for vertices no
    /// anchor explains.
    pub gap: Vec<Option<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvdReport {
    pub answer: EspAnswer,
    pub guesses: u64,
    pub delegated: bool,
    /// The guess behind the certificate, when the guess loop found one.
    pub guess: Option<SplitGuess>,
}

struct SvdContext<'a> {
    g: &'a Graph,
    dist: &'a DistanceMatrix,
    s: Vec<Vertex>,
    in_c: Vec<bool>,
    in_i: Vec<bool>,
    ell: u32,
}

impl SvdContext<'_> {
    fn seq(&self, m0: Vertex, m_last: Vertex, anchors: &[Vertex]) -> Vec<Vertex> {
        let mut seq = vec![m0];
        seq.extend_from_slice(anchors);
        if m_last != m0 {
            seq.push(m_last);
        }
        seq
    }

    /// Distance-class options per off-path vertex after the discard rules.
    fn x_options(&self, seq: &[Vertex], x: &[Vertex], gaps: &[usize]) -> Vec<Vec<(u32, Option<usize>)>> {
        x.iter()
            .map(|&v| {
                let near = seq.iter().map(|&a| self.dist.get(v, a)).min().unwrap();
                let mut opts = Vec::new();
                for i in 1..=FAR {
                    if near < i {
                        continue;
                    }
                    if i < FAR && near > i {
                        // Not explained by an anchor: some gap must do it.
                        opts.extend(gaps.iter().map(|&j| (i, Some(j))));
                    } else {
                        opts.push((i, None));
                    }
                }
                opts
            })
            .collect()
    }

    fn gap_candidates(&self, seq: &[Vertex], j: usize, x: &[Vertex], class: &[u32], gap: &[Option<usize>]) -> Vec<Vertex> {
        let (a, b) = (seq[j], seq[j + 1]);
        self.g
            .neighbors(a)
            .iter()
            .copied()
            .filter(|&u| self.in_i[u] && self.g.has_edge(u, b))
            .filter(|&u| {
                x.iter().zip(class).zip(gap).all(|((&v, &i), &gj)| {
                    let d = self.dist.get(u, v);
                    d >= i && (gj != Some(j) || d == i)
                })
            })
            .collect()
    }

    /// Tries every guess on one anchor sequence.
    fn solve_frame(&self, m0: Vertex, m_last: Vertex, anchors: &[Vertex], guesses: &mut u64) -> Option<(Vec<Vertex>, SplitGuess)> {
        let seq = self.seq(m0, m_last, anchors);
        let steps: Vec<u32> = seq.windows(2).map(|w| self.dist.get(w[0], w[1])).collect();
        if steps.iter().any(|&d| d == 0 || d > 2) {
            return None;
        }
        if steps.iter().sum::<u32>() != self.dist.get(m0, m_last) {
            return None;
        }
        let gaps: Vec<usize> = (0..steps.len()).filter(|&j| steps[j] == 2).collect();
        let x: Vec<Vertex> = self.s.iter().copied().filter(|v| !seq.contains(v)).collect();
        let opts = self.x_options(&seq, &x, &gaps);
        if opts.iter().any(|o| o.is_empty()) {
            return None;
        }
        let mut digits = vec![0usize; x.len()];
        loop {
            *guesses += 1;
            let class: Vec<u32> = digits.iter().zip(&opts).map(|(&d, o)| o[d].0).collect();
            let gap: Vec<Option<usize>> = digits.iter().zip(&opts).map(|(&d, o)| o[d].1).collect();
            let cands: Vec<Vec<Vertex>> =
                gaps.iter().map(|&j| self.gap_candidates(&seq, j, &x, &class, &gap)).collect();
            if cands.iter().all(|c| !c.is_empty()) {
                if let Some(p) = self.search(&seq, &gaps, &cands) {
                    let guess = SplitGuess { m0, m_last, anchors: anchors.to_vec(), x, class, gap };
                    return Some((p, guess));
                }
            }
            let mut i = digits.len();
            loop {
                if i == 0 {
                    return None;
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

    /// Fills the gaps in order, smallest candidate first, and checks each
    /// complete path directly.
    fn search(&self, seq: &[Vertex], gaps: &[usize], cands: &[Vec<Vertex>]) -> Option<Vec<Vertex>> {
        let mut pick = vec![0usize; gaps.len()];
        loop {
            let mut p = vec![seq[0]];
            let mut gi = 0;
            for j in 0..seq.len() - 1 {
                if gi < gaps.len() && gaps[gi] == j {
                    p.push(cands[gi][pick[gi]]);
                    gi += 1;
                }
                p.push(seq[j + 1]);
            }
            if self.dist.is_shortest(&p) && self.dist.path_eccentricity(&p) <= self.ell {
                return Some(p);
            }
            let mut i = pick.len();
            loop {
                if i == 0 {
                    return None;
                }
                i -= 1;
                pick[i] += 1;
                if pick[i] < cands[i].len() {
                    break;
                }
                pick[i] = 0;
            }
        }
    }
}

/// Anchor sequences in a fixed order: endpoints `m0 <= m_last`, then
/// subsets of `S` and of `C` with at most two clique vertices overall.
fn frames(ctx: &SvdContext) -> Vec<(Vertex, Vertex, Vec<Vertex>)> {
    let n = ctx.g.n();
    let clique: Vec<Vertex> = (0..n).filter(|&v| ctx.in_c[v]).collect();
    let mut out = Vec::new();
    for m0 in 0..n {
        for m_last in m0..n {
            let ends_in_c = ctx.in_c[m0] as usize + (m_last != m0 && ctx.in_c[m_last]) as usize;
            let s_rest: Vec<Vertex> = ctx.s.iter().copied().filter(|&v| v != m0 && v != m_last).collect();
            let c_rest: Vec<Vertex> = clique.iter().copied().filter(|&v| v != m0 && v != m_last).collect();
            let mut c_subsets: Vec<Vec<Vertex>> = vec![vec![]];
            if ends_in_c < 2 {
                c_subsets.extend(c_rest.iter().map(|&c| vec![c]));
            }
            if ends_in_c == 0 {
                for (i, &a) in c_rest.iter().enumerate() {
                    c_subsets.extend(c_rest[i + 1..].iter().map(|&b| vec![a, b]));
                }
            }
            for mask in 0u64..(1 << s_rest.len()) {
                for cs in &c_subsets {
                    let mut chosen: Vec<Vertex> =
                        (0..s_rest.len()).filter(|&i| mask >> i & 1 == 1).map(|i| s_rest[i]).collect();
                    chosen.extend_from_slice(cs);
                    if m0 == m_last && !chosen.is_empty() {
                        continue;
                    }
                    if let Some(ord) = order_on_shortest_path(ctx.dist, &chosen, m0) {
                        out.push((m0, m_last, ord));
                    }
                }
            }
        }
    }
    out
}

/// Clique and independent side of `G - S`, in original ids.
pub fn split_sides(g: &Graph, s: &[Vertex]) -> Result<(Vec<Vertex>, Vec<Vertex>)> {
    let (h, map) = g.remove_vertices(s);
    let (c, i) = split_bipartition(&h).ok_or(EspError::NotSplit)?;
    Ok((c.into_iter().map(|v| map.old(v)).collect(), i.into_iter().map(|v| map.old(v)).collect()))
}

pub fn esp_svd_decide(g: &Graph, s: &[Vertex], ell: u32) -> Result<SvdReport> {
    esp_svd_decide_with(g, &all_pairs_distances(g), s, ell, DEFAULT_SVD_THRESHOLD)
}

pub fn esp_svd_decide_with(
    g: &Graph,
    dist: &DistanceMatrix,
    s: &[Vertex],
    ell: u32,
    threshold: u32,
) -> Result<SvdReport> {
    check_connected(g)?;
    let ds = DeletionSet::checked(g, DeletionKind::Svd, s)?;
    if ell <= threshold {
        let answer = esp_decide_oracle_with(g, dist, ell, DEFAULT_ORACLE_BUDGET)?;
        return Ok(SvdReport { answer, guesses: 0, delegated: true, guess: None });
    }
    let n = g.n();
    let (c, i) = split_sides(g, &ds.vertices)?;
    let mut in_c = vec![false; n];
    let mut in_i = vec![false; n];
    c.iter().for_each(|&v| in_c[v] = true);
    i.iter().for_each(|&v| in_i[v] = true);
    let ctx = SvdContext { g, dist, s: ds.vertices.clone(), in_c, in_i, ell };
    let fr = frames(&ctx);
    let results: Vec<(Option<(Vec<Vertex>, SplitGuess)>, u64)> = fr
        .par_iter()
        .map(|(m0, ml, a)| {
            let mut guesses = 0;
            let p = ctx.solve_frame(*m0, *ml, a, &mut guesses);
            (p, guesses)
        })
        .collect();
    let mut guesses = 0;
    for (p, k) in results {
        guesses += k;
        if let Some((p, guess)) = p {
            let answer = EspAnswer::feasible(ell, Path::new(g, p)?);
            return Ok(SvdReport { answer, guesses, delegated: false, guess: Some(guess) });
        }
    }
    Ok(SvdReport { answer: EspAnswer::infeasible(ell), guesses, delegated: false, guess: None })
}

pub fn mesp_svd_optimum(g: &Graph, s: &[Vertex], threshold: u32) -> Result<(u32, Path)> {
    check_connected(g)?;
    let dist = all_pairs_distances(g);
    for ell in 0..=dist.radius() {
        if let Some(p) = esp_svd_decide_with(g, &dist, s, ell, threshold)?.answer.certificate {
            return Ok((ell, p));
        }
    }
    Err(EspError::Internal("no path found within the radius".into()))
}
