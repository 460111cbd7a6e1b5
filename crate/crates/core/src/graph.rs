//! Immutable weighted citation DAG.
//!
//! Edges are stored in knowledge direction: `src -> dst` means `dst` cites
//! `src`. Node indices follow ascending id order, with the super root (when
//! present) appended last. Both adjacency directions are kept in CSR form,
//! each row sorted by neighbour index.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{KqiError, Result};

/// Id given to the synthetic ancestor added by [`CitationGraph::augment_super_root`].
pub const SUPER_ROOT_ID: &str = "__super_root__";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    Author,
    Affiliation,
    Country,
    Discipline,
}

impl GroupKind {
    pub const ALL: [GroupKind; 4] = [
        GroupKind::Author,
        GroupKind::Affiliation,
        GroupKind::Country,
        GroupKind::Discipline,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GroupKind::Author => "author",
            GroupKind::Affiliation => "affiliation",
            GroupKind::Country => "country",
            GroupKind::Discipline => "discipline",
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GroupKind {
    type Err = KqiError;

    fn from_str(s: &str) -> Result<Self> {
        GroupKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| KqiError::UnknownGroupKind(s.to_string()))
    }
}

/// A paper and its metadata.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PaperNode {
    pub id: String,
    pub year: Option<i32>,
    /// Group keys per kind. A kind mapped to an empty list was declared
    /// without keys.
    pub groups: BTreeMap<GroupKind, Vec<String>>,
}

impl PaperNode {
    pub fn new(id: impl Into<String>) -> Self {
        PaperNode {
            id: id.into(),
            ..Default::default()
        }
    }

    pub fn with_year(mut self, year: i32) -> Self {
        self.year = Some(year);
        self
    }

    pub fn with_group(mut self, kind: GroupKind, keys: &[&str]) -> Self {
        self.groups
            .insert(kind, keys.iter().map(|k| k.to_string()).collect());
        self
    }

    pub fn keys(&self, kind: GroupKind) -> &[String] {
        self.groups.get(&kind).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Exponential edge decay `w = exp(-lambda * (reference_time - t0))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySpec {
    pub lambda: f64,
    pub reference_time: i32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotSpec {
    pub cutoff_year: i32,
}

#[derive(Clone, Debug)]
pub struct CitationGraph {
    nodes: Vec<PaperNode>,
    index: HashMap<String, u32>,
    out_offsets: Vec<usize>,
    out_targets: Vec<u32>,
    out_weights: Vec<f64>,
    in_offsets: Vec<usize>,
    in_sources: Vec<u32>,
    in_weights: Vec<f64>,
    out_strength: Vec<f64>,
    in_strength: Vec<f64>,
    total_weight: f64,
    super_root: Option<u32>,
    root_weight_counted: bool,
    topo: Vec<u32>,
    group_kinds: BTreeSet<GroupKind>,
}

/// Incremental construction by node id. Validation happens in [`GraphBuilder::build`].
#[derive(Debug, Default)]
pub struct GraphBuilder {
    nodes: Vec<PaperNode>,
    index: HashMap<String, u32>,
    edges: Vec<(u32, u32, f64)>,
    group_kinds: BTreeSet<GroupKind>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the builder-local index for `id`, creating a bare node if needed.
    pub fn node(&mut self, id: &str) -> Result<u32> {
        if id == SUPER_ROOT_ID {
            return Err(KqiError::ReservedId(id.to_string()));
        }
        if let Some(&i) = self.index.get(id) {
            return Ok(i);
        }
        let i = self.nodes.len() as u32;
        self.nodes.push(PaperNode::new(id));
        self.index.insert(id.to_string(), i);
        Ok(i)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// Inserts or replaces the metadata of a node.
    pub fn add_node(&mut self, node: PaperNode) -> Result<u32> {
        let i = self.node(&node.id)?;
        self.group_kinds.extend(node.groups.keys().copied());
        self.nodes[i as usize] = node;
        Ok(i)
    }

    /// Adds `src -> dst` in knowledge direction (`dst` cites `src`).
    pub fn add_edge(&mut self, src: &str, dst: &str, weight: f64) -> Result<()> {
        if src == dst {
            return Err(KqiError::SelfLoop(src.to_string()));
        }
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(KqiError::InvalidWeight {
                src: src.to_string(),
                dst: dst.to_string(),
                weight,
            });
        }
        let s = self.node(src)?;
        let d = self.node(dst)?;
        self.edges.push((s, d, weight));
        Ok(())
    }

    /// Adds the citation `citing cites cited`.
    pub fn add_citation(&mut self, citing: &str, cited: &str) -> Result<()> {
        self.add_edge(cited, citing, 1.0)
    }

    pub fn build(self) -> Result<CitationGraph> {
        let GraphBuilder {
            nodes,
            edges,
            group_kinds,
            ..
        } = self;
        // relabel so that index order is id order
        let mut order: Vec<u32> = (0..nodes.len() as u32).collect();
        order.sort_unstable_by(|&a, &b| nodes[a as usize].id.cmp(&nodes[b as usize].id));
        let mut rank = vec![0u32; nodes.len()];
        for (new, &old) in order.iter().enumerate() {
            rank[old as usize] = new as u32;
        }
        let mut slots: Vec<Option<PaperNode>> = nodes.into_iter().map(Some).collect();
        let sorted: Vec<PaperNode> = order
            .iter()
            .map(|&old| slots[old as usize].take().expect("each node moved once"))
            .collect();
        let edges = edges
            .into_iter()
            .map(|(s, d, w)| (rank[s as usize], rank[d as usize], w))
            .collect();
        CitationGraph::assemble(sorted, edges, None, true, group_kinds)
    }
}

impl CitationGraph {
    pub fn empty() -> Self {
        Self::assemble(Vec::new(), Vec::new(), None, true, BTreeSet::new())
            .expect("empty graph is valid")
    }

    /// Builds a graph from nodes already sorted by id and index-based edges.
    ///
    /// Used by generators that produce edges by index. Ids must be unique,
    /// sorted, and not reserved.
    pub fn from_sorted_parts(nodes: Vec<PaperNode>, edges: Vec<(u32, u32, f64)>) -> Result<Self> {
        for pair in nodes.windows(2) {
            if pair[0].id >= pair[1].id {
                return Err(KqiError::InvalidConfig(format!(
                    "node ids not strictly increasing at {:?}",
                    pair[1].id
                )));
            }
        }
        if let Some(n) = nodes.iter().find(|n| n.id == SUPER_ROOT_ID) {
            return Err(KqiError::ReservedId(n.id.clone()));
        }
        let n = nodes.len() as u32;
        for &(s, d, w) in &edges {
            if s >= n || d >= n {
                return Err(KqiError::UnknownNode(format!("index {}", s.max(d))));
            }
            if s == d {
                return Err(KqiError::SelfLoop(nodes[s as usize].id.clone()));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(KqiError::InvalidWeight {
                    src: nodes[s as usize].id.clone(),
                    dst: nodes[d as usize].id.clone(),
                    weight: w,
                });
            }
        }
        let kinds = nodes.iter().flat_map(|n| n.groups.keys().copied()).collect();
        Self::assemble(nodes, edges, None, true, kinds)
    }

    fn assemble(
        nodes: Vec<PaperNode>,
        edges: Vec<(u32, u32, f64)>,
        super_root: Option<u32>,
        root_weight_counted: bool,
        group_kinds: BTreeSet<GroupKind>,
    ) -> Result<Self> {
        let n = nodes.len();
        let mut out_offsets = vec![0usize; n + 1];
        for &(s, _, _) in &edges {
            out_offsets[s as usize + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
        }
        let mut cursor = out_offsets.clone();
        let mut row: Vec<(u32, f64)> = vec![(0, 0.0); edges.len()];
        for (s, d, w) in edges {
            let c = &mut cursor[s as usize];
            row[*c] = (d, w);
            *c += 1;
        }
        drop(cursor);
        for v in 0..n {
            let slice = &mut row[out_offsets[v]..out_offsets[v + 1]];
            slice.sort_unstable_by_key(|&(d, _)| d);
            if let Some(pair) = slice.windows(2).find(|p| p[0].0 == p[1].0) {
                return Err(KqiError::DuplicateEdge {
                    src: nodes[v].id.clone(),
                    dst: nodes[pair[0].0 as usize].id.clone(),
                });
            }
        }
        let (out_targets, out_weights): (Vec<u32>, Vec<f64>) = row.into_iter().unzip();

        let mut in_offsets = vec![0usize; n + 1];
        for &d in &out_targets {
            in_offsets[d as usize + 1] += 1;
        }
        for i in 0..n {
            in_offsets[i + 1] += in_offsets[i];
        }
        let mut cursor = in_offsets.clone();
        let mut in_sources = vec![0u32; out_targets.len()];
        let mut in_weights = vec![0f64; out_targets.len()];
        for s in 0..n {
            for e in out_offsets[s]..out_offsets[s + 1] {
                let d = out_targets[e] as usize;
                in_sources[cursor[d]] = s as u32;
                in_weights[cursor[d]] = out_weights[e];
                cursor[d] += 1;
            }
        }

        let mut graph = CitationGraph {
            index: nodes
                .iter()
                .enumerate()
                .map(|(i, p)| (p.id.clone(), i as u32))
                .collect(),
            nodes,
            out_offsets,
            out_targets,
            out_weights,
            in_offsets,
            in_sources,
            in_weights,
            out_strength: Vec::new(),
            in_strength: Vec::new(),
            total_weight: 0.0,
            super_root,
            root_weight_counted,
            topo: Vec::new(),
            group_kinds,
        };
        graph.refresh_strengths();
        graph.topo = graph.topological_sort()?;
        Ok(graph)
    }

    fn refresh_strengths(&mut self) {
        let n = self.nodes.len();
        self.out_strength = (0..n)
            .map(|v| self.out_weights[self.out_offsets[v]..self.out_offsets[v + 1]].iter().fold(0.0, |a, w| a + w))
            .collect();
        self.in_strength = (0..n)
            .map(|v| self.in_weights[self.in_offsets[v]..self.in_offsets[v + 1]].iter().fold(0.0, |a, w| a + w))
            .collect();
        let mut total = 0.0;
        for v in 0..n {
            if Some(v as u32) == self.super_root && !self.root_weight_counted {
                continue;
            }
            total += self.out_strength[v];
        }
        self.total_weight = total;
    }

    /// Kahn's algorithm; on failure reports one cycle in knowledge direction.
    fn topological_sort(&self) -> Result<Vec<u32>> {
        let n = self.nodes.len();
        let mut indeg: Vec<usize> = (0..n)
            .map(|v| self.in_offsets[v + 1] - self.in_offsets[v])
            .collect();
        let mut order: Vec<u32> = (0..n as u32).filter(|&v| indeg[v as usize] == 0).collect();
        let mut head = 0;
        while head < order.len() {
            let v = order[head] as usize;
            head += 1;
            for &u in self.out_neighbors(v) {
                let d = &mut indeg[u as usize];
                *d -= 1;
                if *d == 0 {
                    order.push(u);
                }
            }
        }
        if order.len() == n {
            return Ok(order);
        }
        // Every leftover node keeps a leftover predecessor, so walking
        // predecessors must revisit a node.
        let start = (0..n).find(|&v| indeg[v] > 0).expect("leftover node");
        let mut seen_at = HashMap::new();
        let mut walk = Vec::new();
        let mut v = start;
        loop {
            if let Some(&pos) = seen_at.get(&v) {
                let mut cycle: Vec<String> = walk[pos..]
                    .iter()
                    .rev()
                    .map(|&i: &usize| self.nodes[i].id.clone())
                    .collect();
                cycle.push(cycle[0].clone());
                return Err(KqiError::Cycle { ids: cycle });
            }
            seen_at.insert(v, walk.len());
            walk.push(v);
            v = self
                .in_neighbors(v)
                .iter()
                .map(|&u| u as usize)
                .find(|&u| indeg[u] > 0)
                .expect("leftover predecessor");
        }
    }

    /// Adds the super root with a unit edge to every node of in-degree 0.
    pub fn augment_super_root(&self) -> Result<CitationGraph> {
        self.augment_super_root_with(true)
    }

    /// As [`augment_super_root`](Self::augment_super_root); with
    /// `count_in_total = false` the root's edges still count toward degrees
    /// but are left out of the total weight W.
    pub fn augment_super_root_with(&self, count_in_total: bool) -> Result<CitationGraph> {
        if self.super_root.is_some() {
            return Err(KqiError::AlreadyAugmented);
        }
        let root = self.nodes.len() as u32;
        let mut nodes = self.nodes.clone();
        nodes.push(PaperNode::new(SUPER_ROOT_ID));
        let mut edges: Vec<(u32, u32, f64)> = self.edges().collect();
        edges.extend(
            (0..root)
                .filter(|&v| self.in_degree(v as usize) == 0)
                .map(|v| (root, v, 1.0)),
        );
        Self::assemble(
            nodes,
            edges,
            Some(root),
            count_in_total,
            self.group_kinds.clone(),
        )
    }

    /// Re-weights every real edge by `exp(-lambda * (t - year(dst)))`.
    pub fn apply_decay(&self, spec: &DecaySpec) -> Result<CitationGraph> {
        if !(spec.lambda.is_finite() && spec.lambda >= 0.0) {
            return Err(KqiError::InvalidDecay(spec.lambda));
        }
        let latest = self.require_years()?;
        if let Some(latest) = latest {
            if spec.reference_time < latest {
                return Err(KqiError::ReferenceTimeTooEarly {
                    reference: spec.reference_time,
                    latest,
                });
            }
        }
        let mut g = self.clone();
        let factor = |v: usize| -> f64 {
            if spec.lambda == 0.0 {
                return 1.0;
            }
            let year = g.nodes[v].year.expect("years checked");
            (-spec.lambda * f64::from(spec.reference_time - year)).exp()
        };
        let per_dst: Vec<f64> = (0..g.nodes.len())
            .map(|v| if Some(v as u32) == g.super_root { 1.0 } else { factor(v) })
            .collect();
        for s in 0..g.nodes.len() {
            let is_root = Some(s as u32) == g.super_root;
            for e in g.out_offsets[s]..g.out_offsets[s + 1] {
                g.out_weights[e] = if is_root { 1.0 } else { per_dst[g.out_targets[e] as usize] };
            }
        }
        for (d, &w) in per_dst.iter().enumerate() {
            for e in g.in_offsets[d]..g.in_offsets[d + 1] {
                g.in_weights[e] = if Some(g.in_sources[e]) == g.super_root { 1.0 } else { w };
            }
        }
        g.refresh_strengths();
        Ok(g)
    }

    /// Induced subgraph on papers published no later than the cutoff.
    pub fn snapshot_at(&self, spec: &SnapshotSpec) -> Result<CitationGraph> {
        if self.super_root.is_some() {
            return Err(KqiError::AlreadyAugmented);
        }
        self.require_years()?;
        let keep: Vec<bool> = self
            .nodes
            .iter()
            .map(|p| p.year.expect("years checked") <= spec.cutoff_year)
            .collect();
        let mut remap = vec![u32::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (v, p) in self.nodes.iter().enumerate() {
            if keep[v] {
                remap[v] = nodes.len() as u32;
                nodes.push(p.clone());
            }
        }
        let edges = self
            .edges()
            .filter(|&(s, d, _)| keep[s as usize] && keep[d as usize])
            .map(|(s, d, w)| (remap[s as usize], remap[d as usize], w))
            .collect();
        Self::assemble(
            nodes,
            edges,
            None,
            self.root_weight_counted,
            self.group_kinds.clone(),
        )
    }

    /// Checks that every real node has a year; returns the latest one.
    fn require_years(&self) -> Result<Option<i32>> {
        let mut latest = None;
        for (v, p) in self.nodes.iter().enumerate() {
            if Some(v as u32) == self.super_root {
                continue;
            }
            let y = p.year.ok_or_else(|| KqiError::MissingYear(p.id.clone()))?;
            latest = Some(latest.map_or(y, |l: i32| l.max(y)));
        }
        Ok(latest)
    }

    /// Latest publication year among real nodes, if all are dated.
    pub fn max_year(&self) -> Option<i32> {
        self.paper_indices().filter_map(|v| self.nodes[v].year).max()
    }

    pub fn min_year(&self) -> Option<i32> {
        self.paper_indices().filter_map(|v| self.nodes[v].year).min()
    }

    /// Number of nodes including the super root.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of real (non super root) nodes.
    pub fn paper_count(&self) -> usize {
        self.nodes.len() - usize::from(self.super_root.is_some())
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    /// Total weight W.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn root_weight_counted(&self) -> bool {
        self.root_weight_counted
    }

    pub fn is_augmented(&self) -> bool {
        self.super_root.is_some()
    }

    pub fn super_root(&self) -> Option<usize> {
        self.super_root.map(|r| r as usize)
    }

    pub fn is_super_root(&self, v: usize) -> bool {
        self.super_root == Some(v as u32)
    }

    /// Indices of real nodes in id order.
    pub fn paper_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(move |&v| !self.is_super_root(v))
    }

    pub fn node(&self, v: usize) -> &PaperNode {
        &self.nodes[v]
    }

    pub fn nodes(&self) -> &[PaperNode] {
        &self.nodes
    }

    pub fn id(&self, v: usize) -> &str {
        &self.nodes[v].id
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).map(|&i| i as usize)
    }

    pub fn out_neighbors(&self, v: usize) -> &[u32] {
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    pub fn out_weights(&self, v: usize) -> &[f64] {
        &self.out_weights[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    pub fn in_neighbors(&self, v: usize) -> &[u32] {
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    pub fn in_weights(&self, v: usize) -> &[f64] {
        &self.in_weights[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_offsets[v + 1] - self.out_offsets[v]
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_offsets[v + 1] - self.in_offsets[v]
    }

    pub fn out_strength(&self, v: usize) -> f64 {
        self.out_strength[v]
    }

    pub fn in_strength(&self, v: usize) -> f64 {
        self.in_strength[v]
    }

    /// All nodes in an order where every edge points forward.
    pub fn topological_order(&self) -> &[u32] {
        &self.topo
    }

    /// Every edge as `(src, dst, weight)`, sorted by `(src, dst)`.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        (0..self.nodes.len()).flat_map(move |s| {
            let r = self.out_offsets[s]..self.out_offsets[s + 1];
            r.map(move |e| (s as u32, self.out_targets[e], self.out_weights[e]))
        })
    }

    /// Whether any node declared keys (possibly none) of this kind.
    pub fn has_group_kind(&self, kind: GroupKind) -> bool {
        self.group_kinds.contains(&kind)
    }
}
