//! ESP parameterized by a feedback vertex set or a disjoint-paths deletion
//! set, exact and approximate, on top of the skeleton pipeline.

use serde::{Deserialize, Serialize};

use crate::deletion::{DeletionKind, DeletionSet};
use crate::error::{EspError, Result};
use crate::graph::{all_pairs_distances, DistanceMatrix, Graph, Path, Vertex};
use crate::oracle::{check_connected, EspAnswer};
use crate::pipeline::{Pipeline, PipelineStats};
use crate::skeleton::DistanceCodomain;

/// Skeletons a single decision may examine.
pub const DEFAULT_SKELETON_BUDGET: u64 = 1 << 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub answer: EspAnswer,
    pub stats: PipelineStats,
}

/// Runs the pipeline for one codomain. `s` must already be verified.
pub fn decide_with(
    g: &Graph,
    dist: &DistanceMatrix,
    s: &[Vertex],
    cod: DistanceCodomain,
    budget: u64,
) -> Result<SolveReport> {
    check_connected(g)?;
    let ell = cod.ell();
    let d = Pipeline::new(g, dist, s, cod)?.decide(budget)?;
    let answer = match d.path {
        Some((p, _)) => EspAnswer::feasible(ell, p),
        None => EspAnswer::infeasible(ell),
    };
    Ok(SolveReport { answer, stats: d.stats })
}

fn checked(g: &Graph, kind: DeletionKind, s: &[Vertex]) -> Result<DeletionSet> {
    check_connected(g)?;
    DeletionSet::checked(g, kind, s)
}

pub fn esp_fvs_decide(g: &Graph, s: &[Vertex], ell: u32) -> Result<SolveReport> {
    let ds = checked(g, DeletionKind::Fvs, s)?;
    let dist = all_pairs_distances(g);
    decide_with(g, &dist, &ds.vertices, DistanceCodomain::Exact { ell }, DEFAULT_SKELETON_BUDGET)
}

/// Smallest feasible ℓ, trying ℓ = 0, 1, ... up to the radius, where a
/// shortest path through a centre always works.
fn optimum_by(
    g: &Graph,
    mut decide: impl FnMut(u32) -> Result<SolveReport>,
) -> Result<(u32, Path, PipelineStats)> {
    let radius = all_pairs_distances(g).radius();
    let mut total = PipelineStats::default();
    for ell in 0..=radius {
        let r = decide(ell)?;
        total += r.stats;
        if let Some(p) = r.answer.certificate {
            return Ok((ell, p, total));
        }
    }
    Err(EspError::Internal("no path found within the radius".into()))
}

pub fn mesp_fvs_optimum(g: &Graph, s: &[Vertex]) -> Result<(u32, Path, PipelineStats)> {
    let ds = checked(g, DeletionKind::Fvs, s)?;
    let dist = all_pairs_distances(g);
    optimum_by(g, |ell| {
        decide_with(g, &dist, &ds.vertices, DistanceCodomain::Exact { ell }, DEFAULT_SKELETON_BUDGET)
    })
}

/// Approximate optimum: the first ℓ whose banded pipeline accepts. That ℓ
/// is at most ℓ*, and the accepted path has eccentricity at most
/// `ℓ + ceil(εℓ) - 1`. Returns the path and its actual eccentricity.
pub fn esp_fvs_approx(g: &Graph, s: &[Vertex], eps: f64) -> Result<(Path, u32, PipelineStats)> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(EspError::Precondition(format!("epsilon must be positive, got {eps}")));
    }
    let ds = checked(g, DeletionKind::Fvs, s)?;
    let dist = all_pairs_distances(g);
    let (_, p, stats) = optimum_by(g, |ell| {
        decide_with(g, &dist, &ds.vertices, DistanceCodomain::Approx { ell, eps }, DEFAULT_SKELETON_BUDGET)
    })?;
    let ecc = dist.path_eccentricity(p.vertices());
    Ok((p, ecc, stats))
}

/// `{d(x,y), d(x,y) ± 1 : x, y ∈ S} ∩ [0, ℓ]`, pairs with `x = y` included.
pub fn build_q_set(dist: &DistanceMatrix, s: &[Vertex], ell: u32) -> Vec<u32> {
    let mut q = Vec::new();
    for &x in s {
        for &y in s {
            let d = dist.get(x, y);
            q.extend([d.saturating_sub(1), d, d.saturating_add(1)]);
        }
    }
    q.retain(|&v| v <= ell);
    q.sort_unstable();
    q.dedup();
    q
}

pub fn esp_dpd_decide(g: &Graph, s: &[Vertex], ell: u32) -> Result<SolveReport> {
    let ds = checked(g, DeletionKind::Dpd, s)?;
    let dist = all_pairs_distances(g);
    let q = build_q_set(&dist, &ds.vertices, ell);
    decide_with(g, &dist, &ds.vertices, DistanceCodomain::Quantized { ell, q }, DEFAULT_SKELETON_BUDGET)
}

pub fn mesp_dpd_optimum(g: &Graph, s: &[Vertex]) -> Result<(u32, Path, PipelineStats)> {
    let ds = checked(g, DeletionKind::Dpd, s)?;
    let dist = all_pairs_distances(g);
    optimum_by(g, |ell| {
        let q = build_q_set(&dist, &ds.vertices, ell);
        decide_with(g, &dist, &ds.vertices, DistanceCodomain::Quantized { ell, q }, DEFAULT_SKELETON_BUDGET)
    })
}
