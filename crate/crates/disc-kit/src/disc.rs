//! Rooted k-discs and bulk disc extraction.
//!
//! The k-disc of a vertex is the sub-S-graph induced by all vertices within
//! undirected distance `k`, rooted at the vertex. A disc with degree bound
//! `d` has at most `2 * d^k` vertices, so for fixed `d` and `k` discs are
//! constant-size objects.

use crate::canon::{rooted_fingerprint, Fingerprint};
use crate::error::{Error, Result};
use crate::sgraph::{SGraph, VertexId};

/// A rooted disc: renumbered so the root is vertex 0 (then BFS order by
/// distance, original id). The canonical fingerprint is computed eagerly.
#[derive(Clone, Debug)]
pub struct RootedDisc {
    graph: SGraph,
    radius: u32,
    fingerprint: Fingerprint,
}

impl RootedDisc {
    /// Wrap an externally supplied rooted graph. Every vertex must lie within
    /// `radius` of the root; the graph is renumbered root-first.
    pub fn new(graph: &SGraph, root: VertexId, radius: u32) -> Result<Self> {
        if (root as usize) >= graph.n() {
            return Err(Error::VertexOutOfRange(root, graph.n()));
        }
        let verts = graph.ball(root, radius);
        if verts.len() != graph.n() {
            return Err(Error::Invalid(format!(
                "{} of {} vertices lie beyond radius {radius} of the root",
                graph.n() - verts.len(),
                graph.n()
            )));
        }
        let g = graph.induced(&verts);
        let fingerprint = rooted_fingerprint(&g, 0);
        Ok(RootedDisc { graph: g, radius, fingerprint })
    }

    pub fn graph(&self) -> &SGraph {
        &self.graph
    }

    /// The root is always vertex 0.
    pub fn root(&self) -> VertexId {
        0
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn fingerprint(&self) -> &Fingerprint {
        &self.fingerprint
    }

    pub fn size(&self) -> usize {
        self.graph.n()
    }
}

impl PartialEq for RootedDisc {
    fn eq(&self, other: &Self) -> bool {
        self.fingerprint == other.fingerprint
    }
}
impl Eq for RootedDisc {}

/// Extract the k-disc of `v` in `g`.
pub fn disc_k(g: &SGraph, v: VertexId, k: u32) -> RootedDisc {
    let verts = g.ball(v, k);
    let graph = g.induced(&verts);
    let fingerprint = rooted_fingerprint(&graph, 0);
    RootedDisc { graph, radius: k, fingerprint }
}

/// Disc fingerprints for a list of vertices, sequential code path.
pub fn disc_fingerprints_seq(g: &SGraph, k: u32, verts: &[VertexId]) -> Vec<Fingerprint> {
    verts.iter().map(|&v| disc_k(g, v, k).fingerprint().clone()).collect()
}

/// Disc fingerprints for a list of vertices. With the `parallel` feature the
/// per-vertex work is distributed; results are indexed by position in
/// `verts`, so the output is deterministic either way.
pub fn disc_fingerprints(g: &SGraph, k: u32, verts: &[VertexId]) -> Vec<Fingerprint> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        verts
            .par_iter()
            .map(|&v| disc_k(g, v, k).fingerprint().clone())
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        disc_fingerprints_seq(g, k, verts)
    }
}

/// Disc fingerprints of all vertices, indexed by vertex id.
pub fn all_disc_fingerprints(g: &SGraph, k: u32) -> Vec<Fingerprint> {
    let verts: Vec<VertexId> = (0..g.n() as VertexId).collect();
    disc_fingerprints(g, k, &verts)
}
