//! Edge-list text format: header `n m`, then `m` lines `u v`; `#` starts a comment.

use super::{EdgeKey, GraphView, Vertex};
use crate::error::{GraphError, ParseError, ParseErrorKind};
use rustc_hash::FxHashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

fn parse_pair(text: &str) -> Option<(usize, usize)> {
    let mut parts = text.split_whitespace();
    let a = parts.next()?.parse().ok()?;
    let b = parts.next()?.parse().ok()?;
    parts.next().is_none().then_some((a, b))
}

/// Parses an edge list; neighbor order follows first occurrence in the file.
pub fn parse_edge_list(source: impl Read) -> Result<GraphView, GraphError> {
    let reader = BufReader::new(source);
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
    let mut seen = FxHashSet::default();
    let mut last_line = 0;
    for (index, line) in reader.lines().enumerate() {
        let line_no = index + 1;
        last_line = line_no;
        let line = line?;
        let text = line.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let fail = |kind| GraphError::Parse(ParseError { line: line_no, kind });
        let (a, b) = parse_pair(text).ok_or_else(|| fail(ParseErrorKind::Malformed(text.to_string())))?;
        let Some((n, _)) = header else {
            header = Some((a, b));
            edges.reserve(b);
            continue;
        };
        for id in [a, b] {
            if id >= n {
                return Err(fail(ParseErrorKind::IdOutOfRange { id, n }));
            }
        }
        let key = EdgeKey::try_new(a, b).ok_or_else(|| fail(ParseErrorKind::SelfLoop(a)))?;
        if !seen.insert(key) {
            return Err(fail(ParseErrorKind::Duplicate(key.lo(), key.hi())));
        }
        edges.push((a, b));
    }
    let (n, m) = header.ok_or(ParseError { line: last_line.max(1), kind: ParseErrorKind::MissingHeader })?;
    if edges.len() != m {
        return Err(ParseError { line: last_line, kind: ParseErrorKind::EdgeCount { expected: m, found: edges.len() } }.into());
    }
    GraphView::from_edges(n, &edges)
}

/// Writes `n`, the edge count and the edges in the given order.
pub fn write_edge_list(mut sink: impl Write, n: usize, edges: &[EdgeKey]) -> std::io::Result<()> {
    writeln!(sink, "{} {}", n, edges.len())?;
    for e in edges {
        writeln!(sink, "{} {}", e.lo(), e.hi())?;
    }
    sink.flush()
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<GraphView, GraphError> {
    parse_edge_list(File::open(path)?)
}

/// Saves a graph with its edges in rank order.
pub fn save_graph(path: impl AsRef<Path>, graph: &GraphView) -> Result<(), GraphError> {
    let sink = BufWriter::new(File::create(path)?);
    write_edge_list(sink, graph.n(), &graph.sorted_edges())?;
    Ok(())
}
