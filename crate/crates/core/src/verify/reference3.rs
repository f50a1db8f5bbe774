//! Whole-graph replay of the 3-spanner rules.

use crate::graph::{AdjacencyOracle, EdgeKey, GraphView, Vertex};
use crate::spanner3::Spanner3;
use crate::tape::class_of;
use rustc_hash::FxHashSet;

/// Edges kept by the 3-spanner, and how many of them came from a centerless endpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Replay3 {
    pub edges: Vec<EdgeKey>,
    pub failures: usize,
}

/// Recomputes the 3-spanner from per-vertex center sets and per-bucket first members.
pub fn replay_spanner3<G: AdjacencyOracle + ?Sized>(graph: &GraphView, lca: &Spanner3<'_, G>) -> Replay3 {
    let n = graph.n();
    let delta = n.isqrt();
    let family = lca.family();
    let class = |d: usize| class_of(d, delta).ok().map(|c| c.min(family.levels()));
    let deg: Vec<usize> = (0..n).map(|v| graph.degree(v)).collect();
    let centers: Vec<Vec<Vertex>> = (0..n)
        .map(|u| match class(deg[u]) {
            Some(c) => graph.neighbors(u).filter(|&x| family.contains(c, x)).collect(),
            None => Vec::new(),
        })
        .collect();

    // (v, u): u is the first of one of its own clusters inside its block of N(v).
    let mut first: FxHashSet<(Vertex, Vertex)> = FxHashSet::default();
    for v in 0..n {
        let list: Vec<Vertex> = graph.neighbors(v).collect();
        for block in list.chunks(delta.max(1)) {
            let mut seen: FxHashSet<(Vertex, usize)> = FxHashSet::default();
            for &w in block {
                let Some(c) = class(deg[w]) else { continue };
                let mut fresh = false;
                for &x in &centers[w] {
                    fresh |= seen.insert((x, c));
                }
                if fresh {
                    first.insert((v, w));
                }
            }
        }
    }

    let mut out = Replay3 { edges: Vec::new(), failures: 0 };
    for e in graph.sorted_edges() {
        let (a, b) = e.endpoints();
        let (u, v) = if (deg[a], a) >= (deg[b], b) { (a, b) } else { (b, a) };
        let keep = match class(deg[v]) {
            None => true,
            Some(_) => {
                let c = class(deg[u]).expect("u is at least as heavy as v");
                if family.contains(c, v) {
                    true
                } else if centers[u].is_empty() {
                    out.failures += 1;
                    true
                } else {
                    first.contains(&(v, u))
                }
            }
        };
        if keep {
            out.edges.push(e);
        }
    }
    out
}
