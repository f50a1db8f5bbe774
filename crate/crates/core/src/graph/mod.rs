//! Graph storage, the counting probe oracle, generators and edge-list I/O.

mod generate;
mod io;
mod oracle;

pub use generate::{gen_graph, Model};
pub use io::{load_graph, parse_edge_list, save_graph, write_edge_list};
pub use oracle::{AdjacencyOracle, CountingOracle, Probe, ProbeCounts, ProbeLedger};

use crate::error::GraphError;
use std::fmt;

/// Vertex identifier, `0..n`.
pub type Vertex = usize;

/// Canonical undirected edge with `lo < hi`.
///
/// The derived ordering is the edge rank: lexicographic on `(lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeKey {
    lo: u32,
    hi: u32,
}

impl EdgeKey {
    /// Canonicalizes `{u, v}`; `None` for a self-loop.
    pub fn try_new(u: Vertex, v: Vertex) -> Option<Self> {
        match u.cmp(&v) {
            std::cmp::Ordering::Less => Some(Self { lo: u as u32, hi: v as u32 }),
            std::cmp::Ordering::Greater => Some(Self { lo: v as u32, hi: u as u32 }),
            std::cmp::Ordering::Equal => None,
        }
    }

    /// # Panics
    /// If `u == v`.
    pub fn new(u: Vertex, v: Vertex) -> Self {
        Self::try_new(u, v).unwrap_or_else(|| panic!("self-loop {u}"))
    }

    pub fn lo(self) -> Vertex {
        self.lo as Vertex
    }

    pub fn hi(self) -> Vertex {
        self.hi as Vertex
    }

    pub fn endpoints(self) -> (Vertex, Vertex) {
        (self.lo(), self.hi())
    }

    /// The endpoint that is not `v`.
    pub fn other(self, v: Vertex) -> Vertex {
        if v == self.lo() {
            self.hi()
        } else {
            self.lo()
        }
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.lo, self.hi)
    }
}

/// Immutable simple undirected graph in CSR form.
///
/// Neighbor order is fixed at construction; the `i`-th neighbor is 1-based.
#[derive(Clone, Debug)]
pub struct GraphView {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    // Per-vertex slot permutation sorted by neighbor id. Absent when every
    // list is already sorted, in which case lookups search `targets` directly.
    by_id: Option<Vec<u32>>,
}

impl GraphView {
    /// Builds a graph whose neighbor lists follow the order edges first appear.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut lists = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::NotSimple(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(GraphError::NotSimple(format!("self-loop on {u}")));
            }
            lists[u].push(v);
            lists[v].push(u);
        }
        Self::from_adjacency(lists)
    }

    /// Builds a graph from explicit neighbor lists, validating simplicity and symmetry.
    pub fn from_adjacency(lists: Vec<Vec<Vertex>>) -> Result<Self, GraphError> {
        let n = lists.len();
        u32::try_from(n).map_err(|_| GraphError::NotSimple(format!("n = {n} exceeds u32")))?;
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut targets = Vec::with_capacity(lists.iter().map(Vec::len).sum());
        for (v, list) in lists.iter().enumerate() {
            for &w in list {
                if w >= n {
                    return Err(GraphError::NotSimple(format!("neighbor {w} of {v} out of range")));
                }
                if w == v {
                    return Err(GraphError::NotSimple(format!("self-loop on {v}")));
                }
                targets.push(w as u32);
            }
            offsets.push(targets.len());
        }
        let graph = Self::from_csr(offsets, targets);
        for v in 0..n {
            let mut sorted: Vec<u32> = graph.slice(v).to_vec();
            sorted.sort_unstable();
            if let Some(w) = sorted.windows(2).find(|p| p[0] == p[1]) {
                return Err(GraphError::NotSimple(format!("duplicate neighbor {} of {v}", w[0])));
            }
            for &w in graph.slice(v) {
                if graph.index_of(w as Vertex, v).is_none() {
                    return Err(GraphError::NotSimple(format!("{v} lists {w} but not conversely")));
                }
            }
        }
        Ok(graph)
    }

    /// Builds a graph with ascending neighbor lists from canonical, sorted, distinct edges.
    pub(crate) fn from_sorted_edges(n: usize, edges: &[EdgeKey]) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        Self::from_edge_stream(n, |emit| {
            for e in edges {
                emit(e.lo(), e.hi());
            }
        })
    }

    /// Two-pass CSR build from a replayable stream of distinct edges.
    ///
    /// Lists come out ascending whenever the stream is sorted by its
    /// smaller endpoint and then by the larger one.
    pub(crate) fn from_edge_stream(n: usize, stream: impl Fn(&mut dyn FnMut(Vertex, Vertex))) -> Self {
        let mut offsets = vec![0usize; n + 1];
        stream(&mut |u, v| {
            offsets[u + 1] += 1;
            offsets[v + 1] += 1;
        });
        for v in 0..n {
            offsets[v + 1] += offsets[v];
        }
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![0u32; offsets[n]];
        stream(&mut |u, v| {
            targets[cursor[u]] = v as u32;
            cursor[u] += 1;
            targets[cursor[v]] = u as u32;
            cursor[v] += 1;
        });
        Self::from_csr(offsets, targets)
    }

    pub(crate) fn from_csr(offsets: Vec<usize>, targets: Vec<u32>) -> Self {
        let n = offsets.len() - 1;
        let sorted = (0..n).all(|v| targets[offsets[v]..offsets[v + 1]].windows(2).all(|w| w[0] < w[1]));
        let by_id = (!sorted).then(|| {
            let mut perm = Vec::with_capacity(targets.len());
            for v in 0..n {
                let (a, b) = (offsets[v], offsets[v + 1]);
                let mut slots: Vec<u32> = (0..(b - a) as u32).collect();
                slots.sort_unstable_by_key(|&s| targets[a + s as usize]);
                perm.extend(slots);
            }
            perm
        });
        Self { offsets, targets, by_id }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn m(&self) -> usize {
        self.targets.len() / 2
    }

    fn slice(&self, v: Vertex) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Neighbors of `v` in list order.
    pub fn neighbors(&self, v: Vertex) -> impl ExactSizeIterator<Item = Vertex> + '_ {
        self.slice(v).iter().map(|&w| w as Vertex)
    }

    /// `N(v)[i]` with 1-based `i`.
    pub fn neighbor(&self, v: Vertex, i: usize) -> Option<Vertex> {
        if i == 0 {
            return None;
        }
        self.slice(v).get(i - 1).map(|&w| w as Vertex)
    }

    /// The 1-based index of `w` in `N(v)`.
    pub fn index_of(&self, v: Vertex, w: Vertex) -> Option<usize> {
        let list = self.slice(v);
        let w = u32::try_from(w).ok()?;
        match &self.by_id {
            None => list.binary_search(&w).ok().map(|p| p + 1),
            Some(perm) => {
                let slots = &perm[self.offsets[v]..self.offsets[v + 1]];
                slots
                    .binary_search_by_key(&w, |&s| list[s as usize])
                    .ok()
                    .map(|p| slots[p] as usize + 1)
            }
        }
    }

    /// The edge behind directed slot `i` of the CSR arrays, `i < 2m`.
    pub fn arc(&self, i: usize) -> EdgeKey {
        let v = self.offsets.partition_point(|&o| o <= i) - 1;
        EdgeKey::new(v, self.targets[i] as Vertex)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u != v && self.index_of(u, v).is_some()
    }

    /// Every edge once, as `{v, w}` with `v` the smaller endpoint, grouped by `v`.
    pub fn edges(&self) -> impl Iterator<Item = EdgeKey> + '_ {
        (0..self.n()).flat_map(move |v| {
            self.neighbors(v).filter(move |&w| w > v).map(move |w| EdgeKey::new(v, w))
        })
    }

    /// All edges in rank order.
    pub fn sorted_edges(&self) -> Vec<EdgeKey> {
        let mut edges: Vec<EdgeKey> = self.edges().collect();
        edges.sort_unstable();
        edges
    }

    /// The subgraph on the same vertex set keeping only `edges`, ascending lists.
    pub fn with_edges(&self, edges: &[EdgeKey]) -> GraphView {
        let mut sorted = edges.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        Self::from_sorted_edges(self.n(), &sorted)
    }
}
