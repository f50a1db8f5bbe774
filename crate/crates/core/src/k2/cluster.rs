//! BFS subtrees, auxiliary trees and the cluster partition of each cell.

use super::{Sess, K2, TAG_CLUSTER, TAG_SUBTREE};
use crate::graph::{AdjacencyOracle, Vertex};
use crate::tape::ceil_log2;
use std::collections::VecDeque;
use std::sync::Arc;

/// `T(v)` truncated once it exceeds `L` vertices.
#[derive(Debug)]
pub(super) struct Subtree {
    /// Members in BFS order when `|T(v)| ≤ L`.
    pub members: Option<Vec<u32>>,
}

impl Subtree {
    pub fn is_heavy(&self) -> bool {
        self.members.is_none()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClusterKind {
    WholeCell,
    Singleton,
    SubtreeGroup,
}

/// A node of the auxiliary tree `B_r`: level 0 is the root, level `⌈log₂ deg(r)⌉` the leaves.
///
/// Node `(level, offset)` covers leaf positions `[offset · 2^{D-level}, (offset + 1) · 2^{D-level})`
/// of `N(r)`, 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AuxNode {
    pub root: Vertex,
    pub depth: usize,
    pub level: usize,
    pub offset: usize,
}

impl AuxNode {
    pub fn leaf_range(&self, degree: usize) -> std::ops::Range<usize> {
        let span = 1usize << (self.depth - self.level);
        (self.offset * span).min(degree)..((self.offset + 1) * span).min(degree)
    }
}

/// Canonical cluster identity: `(center, kind, minimum member)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClusterId {
    pub center: Vertex,
    pub kind: ClusterKind,
    pub min_member: Vertex,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterDescriptor {
    pub kind: ClusterKind,
    pub center: Vertex,
    /// Members in ascending order.
    pub members: Vec<Vertex>,
    /// The auxiliary node whose descendants form a subtree-group cluster.
    pub anchor: Option<AuxNode>,
}

impl ClusterDescriptor {
    pub fn id(&self) -> ClusterId {
        ClusterId { center: self.center, kind: self.kind, min_member: self.members[0] }
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.members.binary_search(&v).is_ok()
    }
}

impl<G: AdjacencyOracle + ?Sized> K2<'_, G> {
    pub(super) fn subtree_in(&self, s: &mut Sess<'_, G>, v: Vertex) -> Arc<Subtree> {
        s.memo(TAG_SUBTREE, v as u64, |t| &t.subtree, |s| {
            let mut members = vec![v as u32];
            let mut queue = VecDeque::from([v]);
            while let Some(x) = queue.pop_front() {
                for (_, y) in self.children_in(s, x) {
                    members.push(y as u32);
                    if members.len() > self.l {
                        return Arc::new(Subtree { members: None });
                    }
                    queue.push_back(y);
                }
            }
            Arc::new(Subtree { members: Some(members) })
        })
    }

    /// Weight of an auxiliary node of heavy `r` (capped at `L + 1`), with `D(x)` when light.
    fn aux_weight(&self, s: &mut Sess<'_, G>, node: AuxNode, cell: (Vertex, usize)) -> Option<Vec<Vertex>> {
        let deg = s.probe.degree(node.root);
        let mut members = Vec::new();
        for j in node.leaf_range(deg) {
            let y = s.probe.neighbor(node.root, j + 1).expect("leaf within degree");
            if !self.is_child(s, y, node.root, cell.0, cell.1) {
                continue;
            }
            let t = self.subtree_in(s, y);
            match &t.members {
                Some(m) if members.len() + m.len() <= self.l => members.extend(m.iter().map(|&x| x as Vertex)),
                _ => return None,
            }
        }
        Some(members)
    }

    /// Binary search on the leaf-to-root path of `u` in `B_r` for the top node of weight `≤ L`.
    pub(super) fn aux_locate_in(&self, s: &mut Sess<'_, G>, u: Vertex, r: Vertex) -> Option<(AuxNode, Vec<Vertex>)> {
        let cell = self.center_in(s, r)?;
        let deg = s.probe.degree(r);
        let pos = s.probe.adjacency(r, u)? - 1;
        let depth = ceil_log2(deg.max(1));
        let node_at = |level: usize| AuxNode { root: r, depth, level, offset: pos >> (depth - level) };
        if let Some(members) = self.aux_weight(s, node_at(0), cell) {
            return Some((node_at(0), members));
        }
        let leaf = self.aux_weight(s, node_at(depth), cell)?;
        let (mut heavy, mut light, mut found) = (0, depth, leaf);
        while light - heavy > 1 {
            let mid = (heavy + light) / 2;
            match self.aux_weight(s, node_at(mid), cell) {
                Some(members) => {
                    light = mid;
                    found = members;
                }
                None => heavy = mid,
            }
        }
        Some((node_at(light), found))
    }

    pub(super) fn cluster_in(&self, s: &mut Sess<'_, G>, v: Vertex) -> Option<Arc<ClusterDescriptor>> {
        s.memo(TAG_CLUSTER, v as u64, |t| &t.cluster, |s| {
            let (c, d) = self.center_in(s, v)?;
            let cell = self.subtree_in(s, c);
            if let Some(m) = &cell.members {
                let mut members: Vec<Vertex> = m.iter().map(|&x| x as Vertex).collect();
                members.sort_unstable();
                return Some(Arc::new(ClusterDescriptor { kind: ClusterKind::WholeCell, center: c, members, anchor: None }));
            }
            if self.subtree_in(s, v).is_heavy() {
                return Some(Arc::new(ClusterDescriptor {
                    kind: ClusterKind::Singleton,
                    center: c,
                    members: vec![v],
                    anchor: None,
                }));
            }
            let mut chain = vec![v];
            for _ in 0..d {
                let next = self.parent_in(s, *chain.last().expect("chain is non-empty"))?;
                chain.push(next);
            }
            // chain[0] is light and chain[d] (the center) heavy; find the last light one.
            let (mut light, mut heavy) = (0, d);
            while heavy - light > 1 {
                let mid = (light + heavy) / 2;
                if self.subtree_in(s, chain[mid]).is_heavy() {
                    heavy = mid;
                } else {
                    light = mid;
                }
            }
            let (node, mut members) = self.aux_locate_in(s, chain[light], chain[heavy])?;
            members.sort_unstable();
            Some(Arc::new(ClusterDescriptor { kind: ClusterKind::SubtreeGroup, center: c, members, anchor: Some(node) }))
        })
    }
}
