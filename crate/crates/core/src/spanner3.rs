//! 3-spanner LCA with about `√n · log n` probes per query.
//!
//! Heavy vertices (degree above `⌊√n⌋`) join clusters around random centers
//! picked per degree class. An edge from a light vertex is always kept; an
//! edge `{u, v}` with both endpoints heavy and `u` the higher-degree endpoint
//! is kept when `v` is a center of `u`'s class, when `u` found no center, or
//! when `u` is the first member of some cluster of `u` within its bucket of
//! `N(v)`.

use crate::error::LcaError;
use crate::graph::{AdjacencyOracle, Probe, ProbeCounts, Vertex};
use crate::lca::{EdgeLca, QueryOutcome};
use crate::tape::{bucket_of, class_of, log2n, scaled, AlgParams, CenterFamily, RandomTape};

/// Which rule decided a query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict3 {
    /// The lower-degree endpoint is light.
    Light,
    /// The lower-degree endpoint is a center of the other's class.
    CenterEdge,
    /// The higher-degree endpoint has no center of its class.
    NoCenters,
    /// First member of some cluster within its bucket.
    FirstInBucket,
    /// An earlier bucket member exists for every cluster.
    Dropped,
}

impl Verdict3 {
    pub fn keep(self) -> bool {
        self != Verdict3::Dropped
    }
}

pub struct Spanner3<'g, G: ?Sized> {
    graph: &'g G,
    threshold: usize,
    family: CenterFamily,
    strict: bool,
}

impl<'g, G: AdjacencyOracle + ?Sized> Spanner3<'g, G> {
    /// Centers: `t = ⌈log₂ √n⌉` levels starting from `⌈c_centers · √n · log₂ n⌉`.
    pub fn new(graph: &'g G, params: &AlgParams, seed: u64) -> Result<Self, LcaError> {
        let n = graph.vertex_count();
        let params = params.resolved(n)?;
        let sqrt_n = (n as f64).sqrt();
        let levels = (log2n(n) / 2.0).ceil().max(1.0) as usize;
        let base = scaled(params.c_centers, sqrt_n * log2n(n), n);
        let family = CenterFamily::sample(n, base, levels, &RandomTape::new(seed), "S");
        Ok(Self::with_family(graph, family, params.strict))
    }

    pub fn with_family(graph: &'g G, family: CenterFamily, strict: bool) -> Self {
        let threshold = graph.vertex_count().isqrt();
        Self { graph, threshold, family, strict }
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    pub fn family(&self) -> &CenterFamily {
        &self.family
    }

    /// Class of a heavy degree, capped at the top level of the family.
    pub fn class_index(&self, deg: usize) -> Result<usize, LcaError> {
        Ok(class_of(deg, self.threshold)?.min(self.family.levels()))
    }

    /// `S_c ∩ N(u)` for the class `c` of heavy `u`, one adjacency probe per member of `S_c`.
    pub fn centers3_of(&self, probe: &mut Probe<'_, G>, u: Vertex) -> Result<Vec<Vertex>, LcaError> {
        let c = self.class_index(probe.degree(u))?;
        Ok(self.centers_at(probe, u, c))
    }

    fn centers_at(&self, probe: &mut Probe<'_, G>, u: Vertex, c: usize) -> Vec<Vertex> {
        self.family.level(c).filter(|&x| probe.adjacency(u, x).is_some()).collect()
    }

    /// Whether `y` is a member of the level-`level` cluster of center `x`.
    pub fn in_cluster3(&self, probe: &mut Probe<'_, G>, y: Vertex, x: Vertex, level: usize) -> bool {
        let deg = probe.degree(y);
        if deg <= self.threshold || self.class_index(deg) != Ok(level) {
            return false;
        }
        probe.adjacency(y, x).is_some()
    }

    /// Decides the edge `{u, v}` and reports the rule that fired.
    pub fn query3(&self, probe: &mut Probe<'_, G>, u: Vertex, v: Vertex) -> Result<Verdict3, LcaError> {
        if self.strict && (u == v || probe.adjacency(u, v).is_none()) {
            return Err(LcaError::NotAnEdge(u, v));
        }
        let (du, dv) = (probe.degree(u), probe.degree(v));
        let (u, v, du, dv) = if (du, u) >= (dv, v) { (u, v, du, dv) } else { (v, u, dv, du) };
        if dv <= self.threshold {
            return Ok(Verdict3::Light);
        }
        let c = self.class_index(du)?;
        if self.family.contains(c, v) {
            return Ok(Verdict3::CenterEdge);
        }
        let centers = self.centers_at(probe, u, c);
        if centers.is_empty() {
            return Ok(Verdict3::NoCenters);
        }
        let i = probe.adjacency(v, u).ok_or(LcaError::NotAnEdge(u, v))?;
        let start = (bucket_of(i, self.threshold) - 1) * self.threshold + 1;
        for &x in &centers {
            let earlier = (start..i).any(|j| {
                let w = probe.neighbor(v, j).expect("index below a valid index");
                self.in_cluster3(probe, w, x, c)
            });
            if !earlier {
                return Ok(Verdict3::FirstInBucket);
            }
        }
        Ok(Verdict3::Dropped)
    }
}

impl<G: AdjacencyOracle + ?Sized> EdgeLca for Spanner3<'_, G> {
    fn query(&self, u: Vertex, v: Vertex) -> Result<QueryOutcome, LcaError> {
        let mut probe = Probe::new(self.graph);
        let verdict = self.query3(&mut probe, u, v)?;
        Ok(QueryOutcome { keep: verdict.keep(), probes: probe.counts(), failure: verdict == Verdict3::NoCenters })
    }
}

/// Probe cost of one query, for tests and sweeps.
pub fn query_cost<G: AdjacencyOracle + ?Sized>(lca: &Spanner3<'_, G>, u: Vertex, v: Vertex) -> ProbeCounts {
    let mut probe = Probe::new(lca.graph);
    let _ = lca.query3(&mut probe, u, v);
    probe.counts()
}
