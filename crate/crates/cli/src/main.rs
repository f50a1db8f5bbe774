//! `local-spanners`: generate graphs, query and build spanners, verify them and run sweeps.
//!
//! Exit codes: 0 ok, 1 internal error, 2 bad input, 3 verification failure.

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use local_spanners::experiment::{self, Family, RunOptions, SweepSpec};
use local_spanners::graph::{gen_graph, load_graph, save_graph, write_edge_list, Model};
use local_spanners::par::{threads_from_env, with_threads, Execution};
use local_spanners::verify::{self, K2_STRETCH_KAPPA};
use local_spanners::{AlgParams, Algo, GraphError, GraphView, LcaError};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "local-spanners", version, about = "Local computation algorithms for sparse spanners")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Answer one edge query and print the probe counts.
    Query(QueryArgs),
    /// Query every edge, write the spanner and print a summary row.
    Build(BuildArgs),
    /// Run a grid of (n, seed) cells and write CSV rows plus log-log fits.
    Sweep(SweepArgs),
    /// Build a spanner and check it against its global reference, stretch and connectivity.
    Verify(VerifyArgs),
    /// Generate a random graph in the edge-list format.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
struct GraphSource {
    /// Edge-list file: header `n m`, then one `u v` per line.
    #[arg(long, conflicts_with = "gen")]
    graph: Option<PathBuf>,
    /// Generator: gnp:<n>:<p>, regular:<n>:<d> or planted:<n>:<p>:<hubs>:<deg>.
    #[arg(long)]
    gen: Option<Model>,
    /// Seed of the generator (defaults to --seed).
    #[arg(long)]
    graph_seed: Option<u64>,
}

#[derive(Debug, Args)]
struct AlgoArgs {
    /// 3, 5, k2 or bs.
    #[arg(long, default_value = "3")]
    algo: Algo,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Stretch parameter of k2 and bs.
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    c_centers: f64,
    #[arg(long, default_value_t = 3.0)]
    c_rep: f64,
    #[arg(long = "c-L", default_value_t = 1.0)]
    c_l: f64,
    /// Marking probability of k2 (default n^{-1/3}).
    #[arg(long)]
    p_mark: Option<f64>,
    /// Reject queries on non-edges with an extra adjacency probe.
    #[arg(long)]
    strict: bool,
    /// Run queries on one thread.
    #[arg(long)]
    sequential: bool,
}

impl AlgoArgs {
    fn params(&self) -> AlgParams {
        AlgParams { c_centers: self.c_centers, c_rep: self.c_rep, c_l: self.c_l, k: self.k, p_mark: self.p_mark, strict: self.strict }
    }

    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }
}

#[derive(Debug, Args)]
struct QueryArgs {
    #[command(flatten)]
    source: GraphSource,
    #[command(flatten)]
    algo: AlgoArgs,
    /// The queried pair as `u,v`.
    #[arg(long, value_parser = parse_pair)]
    edge: (usize, usize),
}

#[derive(Debug, Args)]
struct BuildArgs {
    #[command(flatten)]
    source: GraphSource,
    #[command(flatten)]
    algo: AlgoArgs,
    /// Where to write the spanner edge list.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the summary row as CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Report wall_time_ms as 0 for byte-stable output.
    #[arg(long)]
    no_timing: bool,
    /// BFS depth for the stretch measurement.
    #[arg(long, default_value_t = 64)]
    stretch_limit: usize,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    algo: AlgoArgs,
    /// gnp-deg:<c> for G(n, c/n), gnp-exp:<e> for G(n, n^-e), regular:<d>.
    #[arg(long, default_value = "gnp-deg:8")]
    family: Family,
    /// Comma-separated vertex counts.
    #[arg(long, value_delimiter = ',', conflicts_with = "log2_n")]
    ns: Vec<usize>,
    /// Range of base-2 exponents, as `lo..hi` (inclusive).
    #[arg(long, value_parser = parse_range)]
    log2_n: Option<(u32, u32)>,
    /// Comma-separated seeds.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    seeds: Vec<u64>,
    /// Query this many random edges per cell instead of scanning all of them.
    #[arg(long)]
    queries: Option<usize>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    no_timing: bool,
    #[arg(long, default_value_t = 64)]
    stretch_limit: usize,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: GraphSource,
    #[command(flatten)]
    algo: AlgoArgs,
    /// Stretch bound to enforce (defaults to 3, 5, 2k-1, or the pinned k2 factor times k²).
    #[arg(long)]
    bound: Option<usize>,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    gen: Model,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `u,v`, got `{s}`"))?;
    Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?))
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected `lo..hi`, got `{s}`"))?;
    let (a, b): (u32, u32) = (a.parse().map_err(|e| format!("{e}"))?, b.parse().map_err(|e| format!("{e}"))?);
    if a > b || b > 40 {
        return Err(format!("bad range {a}..{b}"));
    }
    Ok((a, b))
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn input(error: impl Into<anyhow::Error>) -> Self {
        Self { code: 2, error: error.into() }
    }

    fn internal(error: impl Into<anyhow::Error>) -> Self {
        Self { code: 1, error: error.into() }
    }
}

impl From<LcaError> for Failure {
    fn from(e: LcaError) -> Self {
        Failure::input(e)
    }
}

impl From<local_spanners::ExperimentError> for Failure {
    fn from(e: local_spanners::ExperimentError) -> Self {
        use local_spanners::ExperimentError as E;
        match e {
            E::Lca(_) | E::Graph(_) | E::Spec(_) => Failure::input(e),
            E::Csv(_) | E::Io(_) => Failure::internal(e),
        }
    }
}

type Outcome = Result<(), Failure>;

fn load(source: &GraphSource, seed: u64) -> Result<GraphView, Failure> {
    let graph = match (&source.graph, &source.gen) {
        (Some(path), _) => load_graph(path).with_context(|| format!("reading {}", path.display())),
        (None, Some(model)) => gen_graph(model, source.graph_seed.unwrap_or(seed)).map_err(GraphError::into),
        (None, None) => Err(anyhow!("pass --graph <path> or --gen <model>")),
    };
    graph.map_err(Failure::input)
}

fn writer(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display())).map_err(Failure::internal)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn query(args: &QueryArgs) -> Outcome {
    let graph = load(&args.source, args.algo.seed)?;
    let (u, v) = args.edge;
    if u >= graph.n() || v >= graph.n() || !graph.has_edge(u, v) {
        return Err(Failure::input(LcaError::NotAnEdge(u, v)));
    }
    let lca = args.algo.algo.instantiate(&graph, &args.algo.params(), args.algo.seed)?;
    let answer = lca.query(u, v)?;
    println!("{}", if answer.keep { "YES" } else { "NO" });
    println!("degree_probes {}", answer.probes.degree);
    println!("neighbor_probes {}", answer.probes.neighbor);
    println!("adjacency_probes {}", answer.probes.adjacency);
    if answer.failure {
        println!("clustering_failure true");
    }
    Ok(())
}

fn build(args: &BuildArgs) -> Outcome {
    let graph = load(&args.source, args.algo.seed)?;
    let opts = RunOptions { exec: args.algo.exec(), queries: None, stretch_limit: args.stretch_limit, timing: !args.no_timing };
    let (row, edges) = experiment::run_full(args.algo.algo, &graph, &args.algo.params(), args.algo.seed, &opts)?;
    if let Some(out) = &args.out {
        let mut w = writer(&Some(out.clone()))?;
        write_edge_list(&mut w, graph.n(), &edges).and_then(|_| w.flush()).map_err(Failure::internal)?;
    }
    experiment::write_csv(io::stdout().lock(), std::slice::from_ref(&row), &[])?;
    if let Some(path) = &args.csv {
        experiment::write_csv(writer(&Some(path.clone()))?, std::slice::from_ref(&row), &[])?;
    }
    Ok(())
}

fn sweep(args: &SweepArgs) -> Outcome {
    let ns = match args.log2_n {
        Some((lo, hi)) => (lo..=hi).map(|e| 1usize << e).collect(),
        None => args.ns.clone(),
    };
    let spec = SweepSpec { algo: args.algo.algo, family: args.family, ns, seeds: args.seeds.clone(), params: args.algo.params() };
    let opts = RunOptions { exec: args.algo.exec(), queries: args.queries, stretch_limit: args.stretch_limit, timing: !args.no_timing };
    let result = experiment::run_sweep(&spec, &opts)?;
    experiment::write_csv(writer(&args.csv)?, &result.rows, &result.comments())?;
    if args.csv.is_some() {
        for line in result.comments() {
            eprintln!("{line}");
        }
    }
    Ok(())
}

fn verify_cmd(args: &VerifyArgs) -> Outcome {
    let graph = load(&args.source, args.algo.seed)?;
    let params = args.algo.params();
    let algo = args.algo.algo;
    let k = params.resolved(graph.n())?.k;
    let lca = algo.instantiate(&graph, &params, args.algo.seed)?;
    let local = verify::build_spanner(lca.as_ref(), &graph, args.algo.exec())?;
    let (reference, _) = verify::reference_edges(algo, &graph, &params, args.algo.seed)?;
    let bound = args.bound.unwrap_or_else(|| algo.stretch_bound(k).map_or(K2_STRETCH_KAPPA * k * k, |b| b as usize));
    let report = verify::check_stretch(&graph, &local.edges, bound, args.algo.exec());
    let connected = verify::check_connectivity(&graph, &local.edges);
    let consistent = local.edges == reference;

    println!("edges {} kept {} removed {}", graph.m(), local.edges.len(), report.removed);
    println!("consistent_with_reference {consistent}");
    let shown = report.max_stretch.map_or("inf".to_string(), |s| s.to_string());
    println!("stretch max {shown} bound {bound} pass {}", report.pass);
    println!("connected {connected}");
    println!("clustering_failures {}", local.failures);
    println!("max_probes_per_query {}", local.ledger.per_query_max);
    if consistent && report.pass && connected {
        Ok(())
    } else {
        for (e, d) in &report.worst {
            eprintln!("worst {e} distance {}", d.map_or("inf".to_string(), |d| d.to_string()));
        }
        Err(Failure { code: 3, error: anyhow!("verification failed") })
    }
}

fn gen(args: &GenArgs) -> Outcome {
    let graph = gen_graph(&args.gen, args.seed).map_err(Failure::input)?;
    match &args.out {
        Some(path) => save_graph(path, &graph).map_err(Failure::internal),
        None => {
            let mut w = writer(&None)?;
            write_edge_list(&mut w, graph.n(), &graph.sorted_edges()).and_then(|_| w.flush()).map_err(Failure::internal)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = with_threads(threads_from_env(), || match &cli.command {
        Command::Query(a) => query(a),
        Command::Build(a) => build(a),
        Command::Sweep(a) => sweep(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Gen(a) => gen(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("local-spanners: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
