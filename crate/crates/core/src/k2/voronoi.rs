//! Remote detection, nearest centers and BFS parents.

use super::{Sess, K2, TAG_CENTER, TAG_PARENT, TAG_REMOTE};
use crate::graph::{AdjacencyOracle, Vertex};
use rustc_hash::FxHashSet;

/// Voronoi data of one non-remote vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VoronoiAssignment {
    pub vertex: Vertex,
    pub center: Vertex,
    pub dist: usize,
    /// Minimum-id neighbor one step closer to the center; the center is its own parent.
    pub parent: Vertex,
}

impl<G: AdjacencyOracle + ?Sized> K2<'_, G> {
    /// `|Γ_k(v)| < L`, by a BFS in `G` that stops once `L` vertices are seen.
    pub(super) fn remote_in(&self, s: &mut Sess<'_, G>, v: Vertex) -> bool {
        s.memo(TAG_REMOTE, v as u64, |t| &t.remote, |s| {
            if self.l <= 1 {
                return false;
            }
            let mut seen = FxHashSet::default();
            seen.insert(v);
            let mut frontier = vec![v];
            for _ in 0..self.k {
                let mut next = Vec::new();
                for &x in &frontier {
                    let deg = s.probe.degree(x);
                    for i in 1..=deg {
                        let y = s.probe.neighbor(x, i).expect("index within degree");
                        if seen.insert(y) {
                            if seen.len() >= self.l {
                                return false;
                            }
                            next.push(y);
                        }
                    }
                }
                frontier = next;
            }
            true
        })
    }

    /// Nearest center and distance inside the graph without remote vertices.
    pub(super) fn center_in(&self, s: &mut Sess<'_, G>, v: Vertex) -> Option<(Vertex, usize)> {
        s.memo(TAG_CENTER, v as u64, |t| &t.center, |s| {
            if self.is_center(v) {
                return Some((v as u32, 0));
            }
            let mut seen = FxHashSet::default();
            seen.insert(v);
            let mut frontier = vec![v];
            let mut dist = 0u32;
            while !frontier.is_empty() {
                let mut next = Vec::new();
                for &x in &frontier {
                    let deg = s.probe.degree(x);
                    for i in 1..=deg {
                        let y = s.probe.neighbor(x, i).expect("index within degree");
                        if seen.insert(y) && !self.remote_in(s, y) {
                            next.push(y);
                        }
                    }
                }
                dist += 1;
                if let Some(c) = next.iter().copied().filter(|&y| self.is_center(y)).min() {
                    return Some((c as u32, dist));
                }
                frontier = next;
            }
            None
        })
        .map(|(c, d)| (c as Vertex, d as usize))
    }

    /// Minimum-id non-remote neighbor in the same cell one step closer to the center.
    pub(super) fn parent_in(&self, s: &mut Sess<'_, G>, v: Vertex) -> Option<Vertex> {
        let (c, d) = self.center_in(s, v)?;
        if d == 0 {
            return Some(v);
        }
        let p = s.memo(TAG_PARENT, v as u64, |t| &t.parent, |s| {
            let deg = s.probe.degree(v);
            let mut nbrs: Vec<Vertex> = (1..=deg).filter_map(|i| s.probe.neighbor(v, i)).collect();
            nbrs.sort_unstable();
            nbrs.into_iter()
                .find(|&y| !self.remote_in(s, y) && self.center_in(s, y) == Some((c, d - 1)))
                .expect("a vertex at distance d has a neighbor at distance d - 1") as u32
        });
        Some(p as Vertex)
    }

    /// Children of `x` in the BFS tree of its cell, with their 1-based positions in `N(x)`.
    pub(super) fn children_in(&self, s: &mut Sess<'_, G>, x: Vertex) -> Vec<(usize, Vertex)> {
        let Some((c, d)) = self.center_in(s, x) else { return Vec::new() };
        let deg = s.probe.degree(x);
        let mut out = Vec::new();
        for i in 1..=deg {
            let y = s.probe.neighbor(x, i).expect("index within degree");
            if self.is_child(s, y, x, c, d) {
                out.push((i, y));
            }
        }
        out
    }

    pub(super) fn is_child(&self, s: &mut Sess<'_, G>, y: Vertex, x: Vertex, c: Vertex, d: usize) -> bool {
        !self.remote_in(s, y) && self.center_in(s, y) == Some((c, d + 1)) && self.parent_in(s, y) == Some(x)
    }
}
