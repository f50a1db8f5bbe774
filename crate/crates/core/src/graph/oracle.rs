//! The three-probe oracle and its accounting.

use super::{GraphView, Vertex};
use std::ops::{Add, AddAssign};
use std::sync::atomic::{AtomicU64, Ordering};

/// Read access to a graph through degree, neighbor and adjacency probes.
///
/// Neighbor indices are 1-based. Invalid vertex ids panic: they are caller
/// bugs, not model outcomes.
pub trait AdjacencyOracle: Sync {
    fn vertex_count(&self) -> usize;
    fn degree(&self, v: Vertex) -> usize;
    fn neighbor(&self, v: Vertex, i: usize) -> Option<Vertex>;
    fn adjacency(&self, u: Vertex, v: Vertex) -> Option<usize>;
}

impl AdjacencyOracle for GraphView {
    fn vertex_count(&self) -> usize {
        self.n()
    }

    fn degree(&self, v: Vertex) -> usize {
        GraphView::degree(self, v)
    }

    fn neighbor(&self, v: Vertex, i: usize) -> Option<Vertex> {
        assert!(v < self.n(), "vertex {v} out of range");
        GraphView::neighbor(self, v, i)
    }

    fn adjacency(&self, u: Vertex, v: Vertex) -> Option<usize> {
        assert!(u < self.n() && v < self.n(), "vertex out of range");
        self.index_of(u, v)
    }
}

/// Probe tallies for one query or one memoized sub-computation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ProbeCounts {
    pub degree: u64,
    pub neighbor: u64,
    pub adjacency: u64,
}

impl ProbeCounts {
    pub fn total(self) -> u64 {
        self.degree + self.neighbor + self.adjacency
    }
}

impl Add for ProbeCounts {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            degree: self.degree + rhs.degree,
            neighbor: self.neighbor + rhs.neighbor,
            adjacency: self.adjacency + rhs.adjacency,
        }
    }
}

impl AddAssign for ProbeCounts {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

/// Counting front end to an oracle, owned by one query.
pub struct Probe<'a, G: ?Sized> {
    oracle: &'a G,
    counts: ProbeCounts,
}

impl<'a, G: AdjacencyOracle + ?Sized> Probe<'a, G> {
    pub fn new(oracle: &'a G) -> Self {
        Self { oracle, counts: ProbeCounts::default() }
    }

    pub fn oracle(&self) -> &'a G {
        self.oracle
    }

    pub fn n(&self) -> usize {
        self.oracle.vertex_count()
    }

    pub fn degree(&mut self, v: Vertex) -> usize {
        self.counts.degree += 1;
        self.oracle.degree(v)
    }

    pub fn neighbor(&mut self, v: Vertex, i: usize) -> Option<Vertex> {
        self.counts.neighbor += 1;
        self.oracle.neighbor(v, i)
    }

    pub fn adjacency(&mut self, u: Vertex, v: Vertex) -> Option<usize> {
        self.counts.adjacency += 1;
        self.oracle.adjacency(u, v)
    }

    pub fn counts(&self) -> ProbeCounts {
        self.counts
    }

    /// Adds the recorded cost of a sub-computation whose result is reused.
    pub(crate) fn charge(&mut self, cost: ProbeCounts) {
        self.counts += cost;
    }
}

/// Aggregate probe accounting over many queries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ProbeLedger {
    pub degree_probes: u64,
    pub neighbor_probes: u64,
    pub adjacency_probes: u64,
    pub per_query_max: u64,
    pub queries: u64,
}

impl ProbeLedger {
    pub fn record(&mut self, counts: ProbeCounts) {
        self.degree_probes += counts.degree;
        self.neighbor_probes += counts.neighbor;
        self.adjacency_probes += counts.adjacency;
        self.per_query_max = self.per_query_max.max(counts.total());
        self.queries += 1;
    }

    pub fn merge(mut self, other: Self) -> Self {
        self.degree_probes += other.degree_probes;
        self.neighbor_probes += other.neighbor_probes;
        self.adjacency_probes += other.adjacency_probes;
        self.per_query_max = self.per_query_max.max(other.per_query_max);
        self.queries += other.queries;
        self
    }

    pub fn total(&self) -> u64 {
        self.degree_probes + self.neighbor_probes + self.adjacency_probes
    }

    pub fn mean_per_query(&self) -> f64 {
        if self.queries == 0 {
            0.0
        } else {
            self.total() as f64 / self.queries as f64
        }
    }
}

/// Wraps an oracle and counts raw calls with atomics, independent of [`Probe`].
///
/// Used to audit that reported probe counts match the calls actually made.
pub struct CountingOracle<'a, G: ?Sized> {
    inner: &'a G,
    degree: AtomicU64,
    neighbor: AtomicU64,
    adjacency: AtomicU64,
}

impl<'a, G: AdjacencyOracle + ?Sized> CountingOracle<'a, G> {
    pub fn new(inner: &'a G) -> Self {
        Self { inner, degree: AtomicU64::new(0), neighbor: AtomicU64::new(0), adjacency: AtomicU64::new(0) }
    }

    /// Returns the calls seen so far and resets the counters.
    pub fn take(&self) -> ProbeCounts {
        ProbeCounts {
            degree: self.degree.swap(0, Ordering::Relaxed),
            neighbor: self.neighbor.swap(0, Ordering::Relaxed),
            adjacency: self.adjacency.swap(0, Ordering::Relaxed),
        }
    }
}

impl<G: AdjacencyOracle + ?Sized> AdjacencyOracle for CountingOracle<'_, G> {
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    fn degree(&self, v: Vertex) -> usize {
        self.degree.fetch_add(1, Ordering::Relaxed);
        self.inner.degree(v)
    }

    fn neighbor(&self, v: Vertex, i: usize) -> Option<Vertex> {
        self.neighbor.fetch_add(1, Ordering::Relaxed);
        self.inner.neighbor(v, i)
    }

    fn adjacency(&self, u: Vertex, v: Vertex) -> Option<usize> {
        self.adjacency.fetch_add(1, Ordering::Relaxed);
        self.inner.adjacency(u, v)
    }
}
