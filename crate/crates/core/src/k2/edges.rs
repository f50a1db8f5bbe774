//! Cluster boundaries, engagement and the connection rules between clusters.

use super::cluster::ClusterDescriptor;
use super::{Sess, K2, TAG_BOUNDARY};
use crate::graph::{AdjacencyOracle, EdgeKey, Vertex};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Which rule decided a query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictK2 {
    /// Edge of the BFS tree inside one cell.
    TreeEdge,
    /// `A` is marked and the edge is the minimum of `E(A, B)`.
    Marked,
    /// `A` has no marked neighbor and the edge is the minimum of `E(A, Vor(B))`.
    Unengaged,
    /// Minimum of `E(A, Vor(B))` with `c(B)` among the lowest-ranked common cells of `A` and `B`'s engaged cluster.
    LowRank,
    BaswanaSen,
    /// An endpoint has no center in its component; all its edges are kept.
    Fallback,
    Dropped,
}

impl VerdictK2 {
    pub fn keep(self) -> bool {
        self != VerdictK2::Dropped
    }
}

/// Boundary summary of one cluster.
#[derive(Debug)]
pub(super) struct Boundary {
    /// `Cen(∂A)` in ascending order.
    pub centers: Vec<u32>,
    /// Minimum-rank edge into each adjacent cell.
    pub cell_min: BTreeMap<u32, EdgeKey>,
    pub marked_adjacent: bool,
    /// Minimum-rank edge into a marked cell, with its far endpoint.
    pub engage: Option<(EdgeKey, Vertex)>,
}

/// The marked cluster a cluster is engaged with, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngagementRecord {
    pub engaged_with: Option<Arc<ClusterDescriptor>>,
    pub witness: Option<EdgeKey>,
}

impl<G: AdjacencyOracle + ?Sized> K2<'_, G> {
    pub(super) fn boundary_in(&self, s: &mut Sess<'_, G>, a: &ClusterDescriptor) -> Arc<Boundary> {
        s.memo(TAG_BOUNDARY, a.members[0] as u64, |t| &t.boundary, |s| {
            let mut cell_min: BTreeMap<u32, EdgeKey> = BTreeMap::new();
            let mut engage: Option<(EdgeKey, Vertex)> = None;
            for &x in &a.members {
                let deg = s.probe.degree(x);
                for i in 1..=deg {
                    let y = s.probe.neighbor(x, i).expect("index within degree");
                    if self.remote_in(s, y) {
                        continue;
                    }
                    let Some((cy, _)) = self.center_in(s, y) else { continue };
                    if cy == a.center {
                        continue;
                    }
                    let e = EdgeKey::new(x, y);
                    cell_min.entry(cy as u32).and_modify(|m| *m = (*m).min(e)).or_insert(e);
                    if self.is_marked(cy) && engage.is_none_or(|(m, _)| e < m) {
                        engage = Some((e, y));
                    }
                }
            }
            Arc::new(Boundary {
                centers: cell_min.keys().copied().collect(),
                marked_adjacent: engage.is_some(),
                cell_min,
                engage,
            })
        })
    }

    /// A non-marked cluster is engaged with the marked cluster across its minimum-rank marked edge.
    pub(super) fn engaged_in(&self, s: &mut Sess<'_, G>, b: &ClusterDescriptor) -> EngagementRecord {
        if self.is_marked(b.center) {
            return EngagementRecord { engaged_with: None, witness: None };
        }
        let boundary = self.boundary_in(s, b);
        match boundary.engage {
            Some((e, far)) => EngagementRecord { engaged_with: self.cluster_in(s, far), witness: Some(e) },
            None => EngagementRecord { engaged_with: None, witness: None },
        }
    }

    /// Minimum-rank edge between two clusters, scanning the smaller one.
    fn min_edge_between(&self, s: &mut Sess<'_, G>, a: &ClusterDescriptor, b: &ClusterDescriptor) -> Option<EdgeKey> {
        let (small, large) = if a.members.len() <= b.members.len() { (a, b) } else { (b, a) };
        let mut best: Option<EdgeKey> = None;
        for &x in &small.members {
            let deg = s.probe.degree(x);
            for i in 1..=deg {
                let y = s.probe.neighbor(x, i).expect("index within degree");
                if large.contains(y) {
                    let e = EdgeKey::new(x, y);
                    best = Some(best.map_or(e, |m| m.min(e)));
                }
            }
        }
        best
    }

    pub(super) fn query_k2_in(&self, s: &mut Sess<'_, G>, u: Vertex, v: Vertex) -> VerdictK2 {
        let (Some((cu, _)), Some((cv, _))) = (self.center_in(s, u), self.center_in(s, v)) else {
            return VerdictK2::Fallback;
        };
        if cu == cv {
            let tree = self.parent_in(s, u) == Some(v) || self.parent_in(s, v) == Some(u);
            return if tree { VerdictK2::TreeEdge } else { VerdictK2::Dropped };
        }
        let (Some(q), Some(w)) = (self.cluster_in(s, u), self.cluster_in(s, v)) else {
            return VerdictK2::Fallback;
        };
        let e = EdgeKey::new(u, v);
        for (a, b) in [(&q, &w), (&w, &q)] {
            if self.is_marked(a.center) && self.min_edge_between(s, a, b) == Some(e) {
                return VerdictK2::Marked;
            }
            let boundary_a = self.boundary_in(s, a);
            if boundary_a.cell_min.get(&(b.center as u32)) != Some(&e) {
                continue;
            }
            if !boundary_a.marked_adjacent {
                return VerdictK2::Unengaged;
            }
            let Some(c) = self.engaged_in(s, b).engaged_with else { continue };
            let boundary_c = self.boundary_in(s, &c);
            let rank_b = self.cell_rank(b.center);
            let lower = boundary_a
                .centers
                .iter()
                .filter(|&&x| boundary_c.centers.binary_search(&x).is_ok())
                .filter(|&&x| self.cell_rank(x as Vertex) < rank_b)
                .count();
            if lower < self.threshold {
                return VerdictK2::LowRank;
            }
        }
        VerdictK2::Dropped
    }
}
