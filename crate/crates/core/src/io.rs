//! Graph files: a line-oriented text format and a JSON equivalent.
//!
//! Text layout: a header `n m`, then `n` node lines `x y` (or `- -` when the
//! graph has no positions), then `m` edge lines `u v s` where `s` is `S`,
//! `W`, or `-` when no signal classes are stored. Blank lines and lines
//! starting with `#` are ignored.

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::graph::{ConnectivityGraph, NodeId, SignalClass};

pub fn write_text<W: Write>(g: &ConnectivityGraph, mut out: W) -> Result<()> {
    writeln!(out, "{} {}", g.n(), g.m())?;
    for u in 0..g.n() {
        match g.position(u) {
            Some(p) => writeln!(out, "{} {}", p.x, p.y)?,
            None => writeln!(out, "- -")?,
        }
    }
    for (u, v) in g.edges() {
        let s = g.signal(u, v).map_or('-', SignalClass::code);
        writeln!(out, "{u} {v} {s}")?;
    }
    Ok(())
}

pub fn to_text(g: &ConnectivityGraph) -> String {
    let mut buf = Vec::new();
    write_text(g, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| parse_err(line, format!("bad {what} {tok:?}")))
}

pub fn read_text<R: BufRead>(input: R) -> Result<ConnectivityGraph> {
    let mut lines = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if !t.is_empty() && !t.starts_with('#') {
            lines.push((i + 1, t.to_string()));
        }
    }
    let mut it = lines.into_iter();
    let (hl, header) = it.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let mut toks = header.split_whitespace();
    let n: usize = field(toks.next(), hl, "node count")?;
    let m: usize = field(toks.next(), hl, "edge count")?;
    if toks.next().is_some() {
        return Err(parse_err(hl, "trailing tokens in header"));
    }

    let mut positions = Vec::with_capacity(n);
    let mut have_pos = None;
    for k in 0..n {
        let (ln, text) = it.next().ok_or_else(|| parse_err(hl, format!("expected {n} node lines, got {k}")))?;
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(parse_err(ln, "node line needs two fields"));
        }
        let this = toks != ["-", "-"];
        if *have_pos.get_or_insert(this) != this {
            return Err(parse_err(ln, "either all nodes or none have positions"));
        }
        if this {
            let p = Point::new(field(Some(toks[0]), ln, "x")?, field(Some(toks[1]), ln, "y")?);
            if !p.is_finite() {
                return Err(parse_err(ln, "non-finite coordinate"));
            }
            positions.push(p);
        }
    }

    let mut edges: Vec<(NodeId, NodeId, Option<SignalClass>)> = Vec::with_capacity(m);
    let mut have_sig = None;
    for k in 0..m {
        let (ln, text) = it.next().ok_or_else(|| parse_err(hl, format!("expected {m} edge lines, got {k}")))?;
        let mut toks = text.split_whitespace();
        let u: NodeId = field(toks.next(), ln, "endpoint")?;
        let v: NodeId = field(toks.next(), ln, "endpoint")?;
        let s = match toks.next() {
            None | Some("-") => None,
            Some(c) if c.len() == 1 => Some(
                SignalClass::from_code(c.chars().next().unwrap())
                    .ok_or_else(|| parse_err(ln, format!("bad signal class {c:?}")))?,
            ),
            Some(c) => return Err(parse_err(ln, format!("bad signal class {c:?}"))),
        };
        if toks.next().is_some() {
            return Err(parse_err(ln, "trailing tokens in edge line"));
        }
        if u >= n || v >= n || u == v {
            return Err(parse_err(ln, format!("invalid edge ({u},{v})")));
        }
        if *have_sig.get_or_insert(s.is_some()) != s.is_some() {
            return Err(parse_err(ln, "either all edges or none carry a signal class"));
        }
        edges.push((u, v, s));
    }
    if let Some((ln, _)) = it.next() {
        return Err(parse_err(ln, "unexpected content after edge list"));
    }
    build(n, edges, have_pos.unwrap_or(false).then_some(positions))
}

fn build(
    n: usize,
    edges: Vec<(NodeId, NodeId, Option<SignalClass>)>,
    positions: Option<Vec<Point>>,
) -> Result<ConnectivityGraph> {
    if !edges.is_empty() && edges.iter().all(|e| e.2.is_some()) {
        let e: Vec<_> = edges.into_iter().map(|(u, v, s)| (u, v, s.unwrap())).collect();
        ConnectivityGraph::from_signal_edges(n, &e, positions)
    } else if edges.iter().any(|e| e.2.is_some()) {
        Err(Error::InvalidConfig("either all edges or none carry a signal class".into()))
    } else {
        ConnectivityGraph::from_edges(n, edges.into_iter().map(|(u, v, _)| (u, v)), positions)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    u: NodeId,
    v: NodeId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    signal: Option<SignalClass>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphRecord {
    n: usize,
    #[serde(default)]
    positions: Option<Vec<Point>>,
    edges: Vec<EdgeRecord>,
}

pub fn to_json(g: &ConnectivityGraph) -> serde_json::Value {
    let rec = GraphRecord {
        n: g.n(),
        positions: g.positions().map(<[Point]>::to_vec),
        edges: g.edges().map(|(u, v)| EdgeRecord { u, v, signal: g.signal(u, v) }).collect(),
    };
    serde_json::to_value(rec).expect("plain data serializes")
}

pub fn from_json(value: serde_json::Value) -> Result<ConnectivityGraph> {
    let rec: GraphRecord = serde_json::from_value(value)?;
    json_graph(rec)
}

pub fn read_json<R: std::io::Read>(input: R) -> Result<ConnectivityGraph> {
    let rec: GraphRecord = serde_json::from_reader(input)?;
    json_graph(rec)
}

fn json_graph(rec: GraphRecord) -> Result<ConnectivityGraph> {
    if let Some(p) = &rec.positions {
        if p.iter().any(|q| !q.is_finite()) {
            return Err(Error::InvalidConfig("non-finite coordinate".into()));
        }
    }
    build(rec.n, rec.edges.into_iter().map(|e| (e.u, e.v, e.signal)).collect(), rec.positions)
}

pub fn write_json<W: Write>(g: &ConnectivityGraph, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, &to_json(g))?;
    writeln!(out)?;
    Ok(())
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Reads a graph file; `.json` selects the JSON format, anything else text.
pub fn read_graph(path: &Path) -> Result<ConnectivityGraph> {
    let file = fs::File::open(path)?;
    if is_json(path) {
        read_json(std::io::BufReader::new(file))
    } else {
        read_text(std::io::BufReader::new(file))
    }
}

/// Writes a graph file, choosing the format the same way as [`read_graph`].
pub fn write_graph(g: &ConnectivityGraph, path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    if is_json(path) {
        write_json(g, &mut out)?;
    } else {
        write_text(g, &mut out)?;
    }
    out.flush()?;
    Ok(())
}
