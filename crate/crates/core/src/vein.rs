//! Knowledge veins: a compressed graph over selected high-KQI papers.
//!
//! For each selected paper, predecessors are searched breadth-first with a
//! depth cap that grows from 1. A selected predecessor found through
//! unselected interiors becomes a vein edge and is not expanded further.
//! The search for a paper ends after the first depth pass that yields an
//! edge, or once the cap exceeds `max_depth`.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{KqiError, Result};
use crate::graph::{CitationGraph, SUPER_ROOT_ID};
use crate::kqi::KqiTable;

pub const DEFAULT_MAX_DEPTH: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum VeinSelection {
    /// The top `ceil(fraction * n)` papers by KQI, ties by id.
    TopFraction(f64),
    Ids(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VeinConfig {
    pub selection: VeinSelection,
    pub max_depth: usize,
    /// End a paper's search at the first edge found instead of finishing
    /// the current depth pass.
    pub stop_at_first_edge: bool,
}

impl VeinConfig {
    pub fn new(selection: VeinSelection) -> Self {
        VeinConfig {
            selection,
            max_depth: DEFAULT_MAX_DEPTH,
            stop_at_first_edge: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VeinGraph {
    /// Selected ids, ascending.
    pub nodes: Vec<String>,
    /// `(ancestor, descendant)` pairs in id order.
    pub edges: Vec<(String, String)>,
    /// Share of total KQI held by the selection.
    pub covered_kqi_share: f64,
}

/// Resolves a selection to ascending node indices.
pub fn resolve_selection(
    g: &CitationGraph,
    kt: &KqiTable,
    selection: &VeinSelection,
) -> Result<Vec<usize>> {
    let mut picked: Vec<usize> = match selection {
        VeinSelection::TopFraction(f) => {
            if !(*f > 0.0 && *f <= 1.0) {
                return Err(KqiError::InvalidConfig(format!(
                    "selection fraction {f} outside (0, 1]"
                )));
            }
            let n = g.paper_count();
            let k = ((f * n as f64).ceil() as usize).min(n);
            kt.ranked().into_iter().take(k).map(|(v, _)| v).collect()
        }
        VeinSelection::Ids(ids) => ids
            .iter()
            .map(|id| {
                if id == SUPER_ROOT_ID {
                    return Err(KqiError::ReservedId(id.clone()));
                }
                g.index_of(id).ok_or_else(|| KqiError::UnknownNode(id.clone()))
            })
            .collect::<Result<_>>()?,
    };
    picked.sort_unstable();
    picked.dedup();
    if picked.is_empty() {
        return Err(KqiError::EmptySelection);
    }
    Ok(picked)
}

fn vein_parents(g: &CitationGraph, selected: &[bool], node: usize, cfg: &VeinConfig) -> Vec<usize> {
    let mut found: BTreeSet<usize> = BTreeSet::new();
    let mut cap = 1;
    while found.is_empty() {
        let mut open: VecDeque<(usize, usize)> = VecDeque::new();
        let mut seen: HashSet<usize> = HashSet::new();
        for &p in g.in_neighbors(node) {
            let p = p as usize;
            if !g.is_super_root(p) && seen.insert(p) {
                open.push_back((p, 1));
            }
        }
        'pass: while let Some((v, depth)) = open.pop_front() {
            if selected[v] {
                found.insert(v);
                if cfg.stop_at_first_edge {
                    break 'pass;
                }
                continue;
            }
            if depth < cap {
                for &s in g.in_neighbors(v) {
                    let s = s as usize;
                    if !g.is_super_root(s) && seen.insert(s) {
                        open.push_back((s, depth + 1));
                    }
                }
            }
        }
        cap += 1;
        if cap > cfg.max_depth {
            break;
        }
    }
    found.into_iter().collect()
}

pub fn extract_vein(g: &CitationGraph, kt: &KqiTable, cfg: &VeinConfig) -> Result<VeinGraph> {
    if cfg.max_depth == 0 {
        return Err(KqiError::InvalidConfig("max depth must be positive".into()));
    }
    let picked = resolve_selection(g, kt, &cfg.selection)?;
    let mut selected = vec![false; g.node_count()];
    for &v in &picked {
        selected[v] = true;
    }
    let parents: Vec<Vec<usize>> = picked
        .par_iter()
        .map(|&v| vein_parents(g, &selected, v, cfg))
        .collect();
    let mut edges: Vec<(usize, usize)> = picked
        .iter()
        .zip(&parents)
        .flat_map(|(&d, ps)| ps.iter().map(move |&a| (a, d)))
        .collect();
    edges.sort_unstable();
    let covered: f64 = picked.iter().fold(0.0, |a, &v| a + kt.kqi(v));
    let total = kt.total();
    Ok(VeinGraph {
        nodes: picked.iter().map(|&v| g.id(v).to_string()).collect(),
        edges: edges
            .into_iter()
            .map(|(a, d)| (g.id(a).to_string(), g.id(d).to_string()))
            .collect(),
        covered_kqi_share: if total > 0.0 { (covered / total).min(1.0) } else { 0.0 },
    })
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Graphviz `digraph` text, one statement per node then one per edge.
pub fn export_dot(v: &VeinGraph, labels: Option<&BTreeMap<String, String>>) -> String {
    let mut out = String::from("digraph vein {\n");
    for id in &v.nodes {
        match labels {
            Some(map) => {
                let label = map.get(id).map(String::as_str).unwrap_or(id);
                let _ = writeln!(out, "  {} [label={}];", quote(id), quote(label));
            }
            None => {
                let _ = writeln!(out, "  {};", quote(id));
            }
        }
    }
    for (a, d) in &v.edges {
        let _ = writeln!(out, "  {} -> {};", quote(a), quote(d));
    }
    out.push_str("}\n");
    out
}

/// CSV `ancestor,descendant`.
pub fn write_vein_csv<W: Write>(v: &VeinGraph, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(["ancestor", "descendant"])?;
    for (a, d) in &v.edges {
        w.write_record([a, d])?;
    }
    w.flush().map_err(|e| KqiError::Serialize(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;
    use crate::kqi::compute_kqi;

    fn chain(ids: &[&str]) -> (CitationGraph, KqiTable) {
        let mut b = GraphBuilder::new();
        for w in ids.windows(2) {
            b.add_edge(w[0], w[1], 1.0).unwrap();
        }
        let g = b.build().unwrap().augment_super_root().unwrap();
        let (_, kt) = compute_kqi(&g).unwrap();
        (g, kt)
    }

    fn ids(v: &[&str]) -> VeinSelection {
        VeinSelection::Ids(v.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn skips_unselected_interior() {
        let (g, kt) = chain(&["A", "B", "C"]);
        let v = extract_vein(&g, &kt, &VeinConfig::new(ids(&["A", "C"]))).unwrap();
        assert_eq!(v.nodes, ["A", "C"]);
        assert_eq!(v.edges, vec![("A".to_string(), "C".to_string())]);
    }

    #[test]
    fn depth_bound_blocks_far_ancestor() {
        let (g, kt) = chain(&["A", "B", "C", "D"]);
        let cfg = VeinConfig {
            max_depth: 1,
            ..VeinConfig::new(ids(&["A", "D"]))
        };
        assert!(extract_vein(&g, &kt, &cfg).unwrap().edges.is_empty());
        let cfg = VeinConfig {
            max_depth: 3,
            ..VeinConfig::new(ids(&["A", "D"]))
        };
        assert_eq!(extract_vein(&g, &kt, &cfg).unwrap().edges.len(), 1);
    }

    #[test]
    fn full_selection_keeps_edges() {
        let mut b = GraphBuilder::new();
        for (s, d) in [("A", "B"), ("A", "C"), ("B", "D"), ("C", "D"), ("A", "D")] {
            b.add_edge(s, d, 1.0).unwrap();
        }
        let g = b.build().unwrap().augment_super_root().unwrap();
        let (_, kt) = compute_kqi(&g).unwrap();
        let v = extract_vein(&g, &kt, &VeinConfig::new(VeinSelection::TopFraction(1.0))).unwrap();
        let expected: Vec<(String, String)> = g
            .edges()
            .filter(|e| !g.is_super_root(e.0 as usize))
            .map(|(s, d, _)| (g.id(s as usize).to_string(), g.id(d as usize).to_string()))
            .collect();
        assert_eq!(v.edges, expected);
        assert!((v.covered_kqi_share - 1.0).abs() < 1e-12);
    }

    #[test]
    fn first_edge_mode_stops_early() {
        let mut b = GraphBuilder::new();
        for (s, d) in [("A", "D"), ("B", "D")] {
            b.add_edge(s, d, 1.0).unwrap();
        }
        let g = b.build().unwrap().augment_super_root().unwrap();
        let (_, kt) = compute_kqi(&g).unwrap();
        let full = extract_vein(&g, &kt, &VeinConfig::new(ids(&["A", "B", "D"]))).unwrap();
        assert_eq!(full.edges.len(), 2);
        let cfg = VeinConfig {
            stop_at_first_edge: true,
            ..VeinConfig::new(ids(&["A", "B", "D"]))
        };
        let first = extract_vein(&g, &kt, &cfg).unwrap();
        assert_eq!(first.edges, vec![("A".to_string(), "D".to_string())]);
    }

    #[test]
    fn selection_errors() {
        let (g, kt) = chain(&["A", "B"]);
        assert!(matches!(
            extract_vein(&g, &kt, &VeinConfig::new(ids(&[]))),
            Err(KqiError::EmptySelection)
        ));
        assert!(matches!(
            extract_vein(&g, &kt, &VeinConfig::new(ids(&["Z"]))),
            Err(KqiError::UnknownNode(_))
        ));
        assert!(matches!(
            extract_vein(&g, &kt, &VeinConfig::new(ids(&[SUPER_ROOT_ID]))),
            Err(KqiError::ReservedId(_))
        ));
        assert!(matches!(
            extract_vein(&g, &kt, &VeinConfig::new(VeinSelection::TopFraction(0.0))),
            Err(KqiError::InvalidConfig(_))
        ));
    }

    #[test]
    fn top_fraction_picks_highest() {
        let (g, kt) = chain(&["A", "B", "C"]);
        let picked = resolve_selection(&g, &kt, &VeinSelection::TopFraction(0.5)).unwrap();
        // K(A) > K(B) > K(C); ceil(1.5) = 2
        assert_eq!(picked, vec![0, 1]);
    }

    #[test]
    fn dot_output() {
        let empty = VeinGraph::default();
        assert_eq!(export_dot(&empty, None), "digraph vein {\n}\n");
        let v = VeinGraph {
            nodes: vec!["A".into(), "C".into()],
            edges: vec![("A".into(), "C".into())],
            covered_kqi_share: 1.0,
        };
        let dot = export_dot(&v, None);
        assert_eq!(dot.matches("->").count(), 1);
        assert!(dot.contains("\"A\" -> \"C\";"));
        let labels = BTreeMap::from([("A".to_string(), "Paper \"A\"".to_string())]);
        let dot = export_dot(&v, Some(&labels));
        assert_eq!(dot.matches("[label=").count(), 2);
        assert!(dot.contains(r#""A" [label="Paper \"A\""];"#));
    }

    #[test]
    fn csv_output() {
        let v = VeinGraph {
            nodes: vec!["A".into(), "C".into()],
            edges: vec![("A".into(), "C".into())],
            covered_kqi_share: 1.0,
        };
        let mut buf = Vec::new();
        write_vein_csv(&v, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "ancestor,descendant\nA,C\n");
    }
}
