//! Measurement runs, CSV rows and log–log scaling fits.

use crate::error::ExperimentError;
use crate::graph::{gen_graph, EdgeKey, GraphView, Model, ProbeLedger};
use crate::lca::Algo;
use crate::par::{self, Execution};
use crate::tape::{AlgParams, RandomTape};
use crate::verify::{build_spanner, check_connectivity, check_stretch_with_limit};
use rand::seq::index::sample;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

/// Column names, in output order.
pub const HEADER: [&str; 12] = [
    "algo",
    "n",
    "m",
    "k",
    "seed",
    "edges_kept",
    "max_probes_per_query",
    "mean_probes_per_query",
    "max_stretch",
    "connected",
    "clustering_failures",
    "wall_time_ms",
];

/// A measured stretch cell: blank when not measured, `inf` past the search limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum StretchCell {
    NotMeasured,
    Within(usize),
    Unbounded,
}

impl fmt::Display for StretchCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StretchCell::NotMeasured => Ok(()),
            StretchCell::Within(s) => write!(f, "{s}"),
            StretchCell::Unbounded => f.write_str("inf"),
        }
    }
}

/// One `(algo, graph, seed)` run.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub algo: Algo,
    pub n: usize,
    pub m: usize,
    /// The `k` used by `k2` and `bs`; 0 for the fixed-stretch algorithms.
    pub k: usize,
    pub seed: u64,
    /// Exact on a full scan, `m` times the kept fraction on a sampled run.
    pub edges_kept: u64,
    pub max_probes_per_query: u64,
    pub mean_probes_per_query: f64,
    pub max_stretch: StretchCell,
    /// Blank on sampled runs.
    pub connected: Option<bool>,
    pub clustering_failures: u64,
    pub wall_time_ms: u64,
}

impl ExperimentRow {
    pub fn record(&self) -> [String; 12] {
        [
            self.algo.to_string(),
            self.n.to_string(),
            self.m.to_string(),
            self.k.to_string(),
            self.seed.to_string(),
            self.edges_kept.to_string(),
            self.max_probes_per_query.to_string(),
            format!("{:.3}", self.mean_probes_per_query),
            self.max_stretch.to_string(),
            self.connected.map_or(String::new(), |c| c.to_string()),
            self.clustering_failures.to_string(),
            self.wall_time_ms.to_string(),
        ]
    }

    fn sort_key(&self) -> (String, usize, usize, usize, u64) {
        (self.algo.to_string(), self.n, self.m, self.k, self.seed)
    }
}

/// How a run is executed and measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub exec: Execution,
    /// Query this many random edges instead of all of them.
    pub queries: Option<usize>,
    /// BFS depth used to measure stretch on full scans.
    pub stretch_limit: usize,
    /// Record wall time; when off, `wall_time_ms` is 0 so output is byte-stable.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { exec: Execution::Parallel, queries: None, stretch_limit: 64, timing: true }
    }
}

/// The `k` reported for `algo` on `n` vertices.
pub fn reported_k(algo: Algo, params: &AlgParams, n: usize) -> Result<usize, ExperimentError> {
    Ok(if algo.uses_k() { params.resolved(n)?.k } else { 0 })
}

/// Full scan: every edge queried, then stretch and connectivity measured.
///
/// Returns the row and the kept edges.
pub fn run_full(
    algo: Algo,
    graph: &GraphView,
    params: &AlgParams,
    seed: u64,
    opts: &RunOptions,
) -> Result<(ExperimentRow, Vec<EdgeKey>), ExperimentError> {
    let start = Instant::now();
    let lca = algo.instantiate(graph, params, seed)?;
    let out = build_spanner(lca.as_ref(), graph, opts.exec)?;
    let elapsed = start.elapsed();
    let bound = algo.stretch_bound(params.k).map_or(opts.stretch_limit, |b| b as usize);
    let report = check_stretch_with_limit(graph, &out.edges, bound, opts.stretch_limit, opts.exec);
    let row = ExperimentRow {
        algo,
        n: graph.n(),
        m: graph.m(),
        k: reported_k(algo, params, graph.n())?,
        seed,
        edges_kept: out.edges.len() as u64,
        max_probes_per_query: out.ledger.per_query_max,
        mean_probes_per_query: out.ledger.mean_per_query(),
        max_stretch: report.max_stretch.map_or(StretchCell::Unbounded, StretchCell::Within),
        connected: Some(check_connectivity(graph, &out.edges)),
        clustering_failures: out.failures as u64,
        wall_time_ms: if opts.timing { elapsed.as_millis() as u64 } else { 0 },
    };
    Ok((row, out.edges))
}

/// Up to `count` distinct edges drawn uniformly from the tape.
pub fn sample_edges(graph: &GraphView, count: usize, seed: u64) -> Vec<EdgeKey> {
    let arcs = 2 * graph.m();
    let mut rng = RandomTape::new(seed).rng("sweep-queries", &[graph.n() as u64]);
    let mut edges: Vec<EdgeKey> = sample(&mut rng, arcs, count.min(arcs)).into_iter().map(|i| graph.arc(i)).collect();
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// Sampled run: probes are measured on `queries` random edges and `edges_kept` is extrapolated.
pub fn run_sampled(
    algo: Algo,
    graph: &GraphView,
    params: &AlgParams,
    seed: u64,
    queries: usize,
    opts: &RunOptions,
) -> Result<ExperimentRow, ExperimentError> {
    let start = Instant::now();
    let lca = algo.instantiate(graph, params, seed)?;
    let edges = sample_edges(graph, queries, seed);
    let answers = par::try_map(opts.exec, &edges, |e| lca.query(e.lo(), e.hi()))?;
    let elapsed = start.elapsed();
    let mut ledger = ProbeLedger::default();
    let (mut kept, mut failures) = (0u64, 0u64);
    for a in &answers {
        ledger.record(a.probes);
        kept += u64::from(a.keep);
        failures += u64::from(a.failure);
    }
    let edges_kept = if edges.is_empty() { 0 } else { (kept as f64 / edges.len() as f64 * graph.m() as f64).round() as u64 };
    Ok(ExperimentRow {
        algo,
        n: graph.n(),
        m: graph.m(),
        k: reported_k(algo, params, graph.n())?,
        seed,
        edges_kept,
        max_probes_per_query: ledger.per_query_max,
        mean_probes_per_query: ledger.mean_per_query(),
        max_stretch: StretchCell::NotMeasured,
        connected: None,
        clustering_failures: failures,
        wall_time_ms: if opts.timing { elapsed.as_millis() as u64 } else { 0 },
    })
}

/// A graph family indexed by `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    /// `G(n, c/n)`.
    GnpDegree(f64),
    /// `G(n, n^{-e})`.
    GnpExponent(f64),
    /// Random `d`-regular-ish graphs.
    Regular(usize),
}

impl Family {
    pub fn model(&self, n: usize) -> Model {
        match *self {
            Family::GnpDegree(c) => Model::Gnp { n, p: (c / n.max(1) as f64).min(1.0) },
            Family::GnpExponent(e) => Model::Gnp { n, p: (n.max(1) as f64).powf(-e).min(1.0) },
            Family::Regular(d) => Model::RegularIsh { n, d },
        }
    }
}

impl FromStr for Family {
    type Err = ExperimentError;

    /// `gnp-deg:<c>`, `gnp-exp:<e>` or `regular:<d>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ExperimentError::Spec(format!("unknown family `{s}` (gnp-deg:<c>, gnp-exp:<e>, regular:<d>)"));
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "gnp-deg" => arg.parse().map(Family::GnpDegree).map_err(|_| bad()),
            "gnp-exp" => arg.parse().map(Family::GnpExponent).map_err(|_| bad()),
            "regular" => arg.parse().map(Family::Regular).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::GnpDegree(c) => write!(f, "gnp-deg:{c}"),
            Family::GnpExponent(e) => write!(f, "gnp-exp:{e}"),
            Family::Regular(d) => write!(f, "regular:{d}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub algo: Algo,
    pub family: Family,
    pub ns: Vec<usize>,
    pub seeds: Vec<u64>,
    pub params: AlgParams,
}

/// Least-squares fit of `ln y = slope · ln n + intercept`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: usize,
}

/// Fits over points with positive coordinates; `None` with fewer than two distinct `n`.
pub fn fit_loglog(points: &[(f64, f64)]) -> Option<LogLogFit> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let len = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if pts.len() < 2 || sxx <= f64::EPSILON {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy <= f64::EPSILON { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LogLogFit { slope, intercept: my - slope * mx, r2, points: pts.len() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    /// Rows sorted by `(algo, n, m, k, seed)`.
    pub rows: Vec<ExperimentRow>,
    pub probe_fit: Option<LogLogFit>,
    pub edge_fit: Option<LogLogFit>,
}

impl SweepResult {
    /// The regression summary as `#` comment lines.
    pub fn comments(&self) -> Vec<String> {
        let line = |what: &str, fit: &Option<LogLogFit>| match fit {
            Some(f) => format!("# fit {what} ~ n^{:.4} (intercept {:.4}, r2 {:.4}, points {})", f.slope, f.intercept, f.r2, f.points),
            None => format!("# fit {what}: not enough distinct n"),
        };
        vec![line("max_probes_per_query", &self.probe_fit), line("edges_kept", &self.edge_fit)]
    }
}

/// Runs every `(n, seed)` cell; sampled when `opts.queries` is set, full scans otherwise.
pub fn run_sweep(spec: &SweepSpec, opts: &RunOptions) -> Result<SweepResult, ExperimentError> {
    if spec.ns.is_empty() || spec.seeds.is_empty() {
        return Err(ExperimentError::Spec("the n grid and the seed list must be non-empty".into()));
    }
    let cells: Vec<(usize, u64)> = spec.ns.iter().flat_map(|&n| spec.seeds.iter().map(move |&s| (n, s))).collect();
    let mut rows = par::try_map(opts.exec, &cells, |&(n, seed)| {
        let graph = gen_graph(&spec.family.model(n), seed)?;
        match opts.queries {
            Some(q) => run_sampled(spec.algo, &graph, &spec.params, seed, q, opts),
            None => run_full(spec.algo, &graph, &spec.params, seed, opts).map(|(row, _)| row),
        }
    })?;
    rows.sort_by_key(ExperimentRow::sort_key);
    let probes: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.max_probes_per_query as f64)).collect();
    let kept: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.edges_kept as f64)).collect();
    Ok(SweepResult { probe_fit: fit_loglog(&probes), edge_fit: fit_loglog(&kept), rows })
}

/// Writes the header, rows sorted by `(algo, n, m, k, seed)`, then the comment lines.
pub fn write_csv<W: Write>(sink: W, rows: &[ExperimentRow], comments: &[String]) -> Result<(), ExperimentError> {
    let mut sorted: Vec<&ExperimentRow> = rows.iter().collect();
    sorted.sort_by_key(|r| r.sort_key());
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(HEADER)?;
    for r in sorted {
        w.write_record(r.record())?;
    }
    let mut sink = w.into_inner().map_err(|e| ExperimentError::Io(e.into_error()))?;
    for c in comments {
        writeln!(sink, "{c}")?;
    }
    sink.flush()?;
    Ok(())
}
