//! Tab-separated edge and node files.
//!
//! Edge lines are `citing<TAB>cited[<TAB>weight]`. Node lines are
//! `id<TAB>year[<TAB>kind=key;key...]...`, where an empty year means the
//! year is unknown. Blank lines and lines starting with `#` are skipped.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{KqiError, Result};
use crate::graph::{CitationGraph, GraphBuilder, GroupKind, PaperNode};

/// Loads a citation graph from an edge file and an optional node file.
pub fn load_graph(edge_file: &Path, node_file: Option<&Path>) -> Result<CitationGraph> {
    let edges = open(edge_file)?;
    match node_file {
        Some(p) => read_graph(edges, Some(open(p)?)),
        None => read_graph(edges, None::<BufReader<File>>),
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| KqiError::io(path, e))
}

pub fn read_graph<E: BufRead, N: BufRead>(edges: E, nodes: Option<N>) -> Result<CitationGraph> {
    let mut builder = GraphBuilder::new();
    if let Some(nodes) = nodes {
        read_nodes(nodes, &mut builder)?;
    }
    read_edges(edges, &mut builder)?;
    builder.build()
}

fn content_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader
        .lines()
        .enumerate()
        .map(|(i, l)| {
            l.map(|s| (i + 1, s.trim_end_matches('\r').to_string()))
                .map_err(|e| KqiError::MalformedLine {
                    line: i + 1,
                    reason: e.to_string(),
                })
        })
        .filter(|r| match r {
            Ok((_, s)) => !(s.trim().is_empty() || s.starts_with('#')),
            Err(_) => true,
        })
}

fn malformed(line: usize, reason: impl Into<String>) -> KqiError {
    KqiError::MalformedLine {
        line,
        reason: reason.into(),
    }
}

fn read_edges<R: BufRead>(reader: R, builder: &mut GraphBuilder) -> Result<()> {
    for item in content_lines(reader) {
        let (line, text) = item?;
        let fields: Vec<&str> = text.split('\t').collect();
        let (citing, cited, weight) = match fields.as_slice() {
            [a, b] => (*a, *b, 1.0),
            [a, b, w] => {
                let w: f64 = w
                    .trim()
                    .parse()
                    .map_err(|_| malformed(line, format!("bad weight {w:?}")))?;
                (*a, *b, w)
            }
            _ => {
                return Err(malformed(
                    line,
                    format!("expected 2 or 3 tab-separated fields, got {}", fields.len()),
                ))
            }
        };
        if citing.is_empty() || cited.is_empty() {
            return Err(malformed(line, "empty node id"));
        }
        builder.add_edge(cited, citing, weight)?;
    }
    Ok(())
}

fn read_nodes<R: BufRead>(reader: R, builder: &mut GraphBuilder) -> Result<()> {
    for item in content_lines(reader) {
        let (line, text) = item?;
        let mut fields = text.split('\t');
        let id = fields.next().unwrap_or_default();
        if id.is_empty() {
            return Err(malformed(line, "empty node id"));
        }
        if builder.contains(id) {
            return Err(malformed(line, format!("duplicate node {id:?}")));
        }
        let year = match fields.next().map(str::trim) {
            None | Some("") => None,
            Some(y) => Some(
                y.parse::<i32>()
                    .map_err(|_| malformed(line, format!("bad year {y:?}")))?,
            ),
        };
        let mut groups: BTreeMap<GroupKind, Vec<String>> = BTreeMap::new();
        for col in fields {
            if col.is_empty() {
                continue;
            }
            let (kind, keys) = col
                .split_once('=')
                .ok_or_else(|| malformed(line, format!("expected kind=keys, got {col:?}")))?;
            let kind: GroupKind = kind
                .trim()
                .parse()
                .map_err(|_| malformed(line, format!("unknown group kind {kind:?}")))?;
            groups.entry(kind).or_default().extend(
                keys.split(';')
                    .map(str::trim)
                    .filter(|k| !k.is_empty())
                    .map(String::from),
            );
        }
        builder.add_node(PaperNode {
            id: id.to_string(),
            year,
            groups,
        })?;
    }
    Ok(())
}

/// Writes the real edges as `citing<TAB>cited`, adding a weight column for
/// non-unit weights. Super-root edges are left out.
pub fn write_edges<W: Write>(g: &CitationGraph, mut out: W) -> std::io::Result<()> {
    for (s, d, w) in g.edges() {
        if g.is_super_root(s as usize) {
            continue;
        }
        let (citing, cited) = (g.id(d as usize), g.id(s as usize));
        if w == 1.0 {
            writeln!(out, "{citing}\t{cited}")?;
        } else {
            writeln!(out, "{citing}\t{cited}\t{w}")?;
        }
    }
    Ok(())
}

/// Writes one line per real node, including isolated ones.
pub fn write_nodes<W: Write>(g: &CitationGraph, mut out: W) -> std::io::Result<()> {
    for v in g.paper_indices() {
        let p = g.node(v);
        write!(out, "{}\t", p.id)?;
        if let Some(y) = p.year {
            write!(out, "{y}")?;
        }
        for (kind, keys) in &p.groups {
            write!(out, "\t{kind}={}", keys.join(";"))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Exports a graph as an edge file plus a node file.
pub fn export_graph(g: &CitationGraph, edge_file: &Path, node_file: &Path) -> Result<()> {
    let write = |path: &Path, f: &dyn Fn(&mut BufWriter<File>) -> std::io::Result<()>| {
        let file = File::create(path).map_err(|e| KqiError::io(path, e))?;
        let mut w = BufWriter::new(file);
        f(&mut w).and_then(|_| w.flush()).map_err(|e| KqiError::io(path, e))
    };
    write(edge_file, &|w| write_edges(g, w))?;
    write(node_file, &|w| write_nodes(g, w))?;
    Ok(())
}
