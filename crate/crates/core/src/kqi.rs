//! Volume propagation and per-node KQI.
//!
//! Preparation is a single backward pass over a topological order:
//!
//! ```text
//! V(v) = s_out(v) + sum_{v->u} (w_vu / s_in(u)) * V(u)
//! ```
//!
//! and each query is local to the in-edges of a node:
//!
//! ```text
//! K(v) = sum_{u->v} -(x_u / W) * log2(x_u / V(u)),   x_u = V(v) * w_uv / s_in(v)
//! ```
//!
//! A child's volume is split among its parents in proportion to the
//! incoming edge weight, which is `1 / d_in` for unit weights.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{KqiError, Result};
use crate::graph::CitationGraph;

#[derive(Clone, Debug, PartialEq)]
pub struct VolumeTable {
    volume: Vec<f64>,
    total_weight: f64,
}

impl VolumeTable {
    pub fn volume(&self, v: usize) -> f64 {
        self.volume[v]
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volume
    }

    /// W at the time the table was computed.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn len(&self) -> usize {
        self.volume.len()
    }

    pub fn is_empty(&self) -> bool {
        self.volume.is_empty()
    }

    fn check_matches(&self, g: &CitationGraph) -> Result<()> {
        if self.volume.len() != g.node_count()
            || self.total_weight.to_bits() != g.total_weight().to_bits()
        {
            return Err(KqiError::MismatchedTable {
                expected_nodes: g.node_count(),
                expected_weight: g.total_weight(),
                found_nodes: self.volume.len(),
                found_weight: self.total_weight,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KqiTable {
    kqi: Vec<f64>,
    total: f64,
    super_root: Option<usize>,
}

impl KqiTable {
    /// KQI of node `v`; the super root scores 0.
    pub fn kqi(&self, v: usize) -> f64 {
        self.kqi[v]
    }

    /// Per-node scores indexed like the graph, super root included as 0.
    pub fn scores(&self) -> &[f64] {
        &self.kqi
    }

    /// Sum over all real nodes.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.kqi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kqi.is_empty()
    }

    /// `(index, kqi)` of real nodes, highest first, ties by ascending index
    /// (which is ascending id).
    pub fn ranked(&self) -> Vec<(usize, f64)> {
        let mut v: Vec<(usize, f64)> = (0..self.kqi.len())
            .filter(|&i| Some(i) != self.super_root)
            .map(|i| (i, self.kqi[i]))
            .collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        v
    }

    pub(crate) fn from_scores(kqi: Vec<f64>, super_root: Option<usize>) -> Self {
        let total = kqi
            .iter()
            .enumerate()
            .filter(|&(i, _)| Some(i) != super_root)
            .fold(0.0, |a, (_, k)| a + k);
        KqiTable {
            kqi,
            total,
            super_root,
        }
    }
}

/// Propagated volume of every node. Requires an augmented graph.
pub fn compute_volumes(g: &CitationGraph) -> Result<VolumeTable> {
    if !g.is_augmented() {
        return Err(KqiError::NotAugmented);
    }
    for v in g.paper_indices() {
        if g.in_strength(v) <= 0.0 {
            return Err(KqiError::ZeroInStrength(g.id(v).to_string()));
        }
    }
    let mut volume = vec![0.0f64; g.node_count()];
    for &v in g.topological_order().iter().rev() {
        let v = v as usize;
        let mut acc = g.out_strength(v);
        for (&u, &w) in g.out_neighbors(v).iter().zip(g.out_weights(v)) {
            let u = u as usize;
            acc += w / g.in_strength(u) * volume[u];
        }
        volume[v] = acc;
    }
    Ok(VolumeTable {
        volume,
        total_weight: g.total_weight(),
    })
}

/// KQI of a single node from a prepared volume table.
pub fn node_kqi(g: &CitationGraph, vt: &VolumeTable, v: usize) -> f64 {
    if g.is_super_root(v) {
        return 0.0;
    }
    let vol = vt.volume[v];
    let s_in = g.in_strength(v);
    let total = vt.total_weight;
    if vol == 0.0 || total == 0.0 {
        return 0.0;
    }
    let mut k = 0.0;
    for (&u, &w) in g.in_neighbors(v).iter().zip(g.in_weights(v)) {
        let share = vol * w / s_in;
        if share == 0.0 {
            continue;
        }
        let term = -(share / total) * (share / vt.volume[u as usize]).log2();
        debug_assert!(term >= -1e-12, "negative KQI summand {term} at {}", g.id(v));
        k += term;
    }
    k
}

/// KQI of every node.
pub fn kqi_all(g: &CitationGraph, vt: &VolumeTable) -> Result<KqiTable> {
    vt.check_matches(g)?;
    let kqi: Vec<f64> = (0..g.node_count())
        .into_par_iter()
        .map(|v| node_kqi(g, vt, v))
        .collect();
    Ok(KqiTable::from_scores(kqi, g.super_root()))
}

/// Both passes in one call.
pub fn compute_kqi(g: &CitationGraph) -> Result<(VolumeTable, KqiTable)> {
    let vt = compute_volumes(g)?;
    let kt = kqi_all(g, &vt)?;
    Ok((vt, kt))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KqiRow<'a> {
    pub id: &'a str,
    pub kqi: f64,
    pub volume: f64,
    pub in_strength: f64,
    pub out_strength: f64,
}

/// One row per real node, in id order.
pub fn kqi_rows<'a>(g: &'a CitationGraph, vt: &VolumeTable, kt: &KqiTable) -> Vec<KqiRow<'a>> {
    g.paper_indices()
        .map(|v| KqiRow {
            id: g.id(v),
            kqi: kt.kqi(v),
            volume: vt.volume(v),
            in_strength: g.in_strength(v),
            out_strength: g.out_strength(v),
        })
        .collect()
}

/// CSV with header `id,kqi,volume,in_strength,out_strength`.
pub fn write_kqi_csv<W: Write>(
    g: &CitationGraph,
    vt: &VolumeTable,
    kt: &KqiTable,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in kqi_rows(g, vt, kt) {
        w.serialize(row)?;
    }
    if g.paper_count() == 0 {
        w.write_record(["id", "kqi", "volume", "in_strength", "out_strength"])?;
    }
    w.flush().map_err(|e| KqiError::Serialize(e.to_string()))
}

#[derive(Serialize)]
struct KqiDocument<'a> {
    total_kqi: f64,
    total_weight: f64,
    nodes: Vec<KqiRow<'a>>,
}

/// JSON object `{total_kqi, total_weight, nodes: [...]}`.
pub fn write_kqi_json<W: Write>(
    g: &CitationGraph,
    vt: &VolumeTable,
    kt: &KqiTable,
    out: W,
) -> Result<()> {
    let doc = KqiDocument {
        total_kqi: kt.total(),
        total_weight: vt.total_weight(),
        nodes: kqi_rows(g, vt, kt),
    };
    serde_json::to_writer_pretty(out, &doc)?;
    Ok(())
}
