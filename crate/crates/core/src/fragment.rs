//! Brute-force KQI by explicit fragment decomposition.
//!
//! The augmented DAG is unfolded into an ordinary tree rooted at the super
//! root: every root-to-node path becomes one fragment of its final node.
//! A fragment carries the product of the in-edge shares `w / s_in` along its
//! path, so its own out-strength contribution is scaled by that product and
//! its children are the fragments one step further down. Fragment volumes
//! are summed bottom-up, and the per-node score is the plain tree formula
//! summed over that node's fragments. The cost is exponential in depth; this
//! exists to cross-check [`crate::kqi`] on small graphs.

use crate::error::{KqiError, Result};
use crate::graph::CitationGraph;

/// Default cap on the number of fragments.
pub const DEFAULT_FRAGMENT_LIMIT: usize = 1_000_000;

struct Fragment {
    node: u32,
    parent: Option<u32>,
    share: f64,
    volume: f64,
}

fn unfold(g: &CitationGraph, limit: usize) -> Result<Vec<Fragment>> {
    let root = g.super_root().ok_or(KqiError::NotAugmented)?;
    let mut frags = vec![Fragment {
        node: root as u32,
        parent: None,
        share: 1.0,
        volume: 0.0,
    }];
    // breadth-first, so every child fragment sits after its parent
    let mut head = 0;
    while head < frags.len() {
        let (v, share) = (frags[head].node as usize, frags[head].share);
        for (&c, &w) in g.out_neighbors(v).iter().zip(g.out_weights(v)) {
            if frags.len() >= limit {
                return Err(KqiError::FragmentExplosion { limit });
            }
            let s_in = g.in_strength(c as usize);
            let child_share = if s_in > 0.0 { share * w / s_in } else { 0.0 };
            frags.push(Fragment {
                node: c,
                parent: Some(head as u32),
                share: child_share,
                volume: 0.0,
            });
        }
        head += 1;
    }
    for i in (0..frags.len()).rev() {
        let own = frags[i].share * g.out_strength(frags[i].node as usize);
        frags[i].volume += own;
        if let Some(p) = frags[i].parent {
            let vol = frags[i].volume;
            frags[p as usize].volume += vol;
        }
    }
    Ok(frags)
}

fn fragment_term(frags: &[Fragment], f: &Fragment, total_weight: f64) -> f64 {
    let Some(p) = f.parent else { return 0.0 };
    if f.volume == 0.0 || total_weight == 0.0 {
        return 0.0;
    }
    let parent = frags[p as usize].volume;
    -(f.volume / total_weight) * (f.volume / parent).log2()
}

/// KQI of `node` summed over its fragments.
pub fn fragment_oracle_kqi(g: &CitationGraph, node: &str) -> Result<f64> {
    fragment_oracle_kqi_with_limit(g, node, DEFAULT_FRAGMENT_LIMIT)
}

pub fn fragment_oracle_kqi_with_limit(g: &CitationGraph, node: &str, limit: usize) -> Result<f64> {
    let v = g
        .index_of(node)
        .ok_or_else(|| KqiError::UnknownNode(node.to_string()))?;
    let frags = unfold(g, limit)?;
    let w = g.total_weight();
    Ok(frags
        .iter()
        .filter(|f| f.node as usize == v)
        .fold(0.0, |a, f| a + fragment_term(&frags, f, w)))
}

/// Oracle scores for every node from one unfolding, indexed like the graph.
pub fn fragment_oracle_all(g: &CitationGraph, limit: usize) -> Result<Vec<f64>> {
    let frags = unfold(g, limit)?;
    let w = g.total_weight();
    let mut out = vec![0.0; g.node_count()];
    for f in &frags {
        out[f.node as usize] += fragment_term(&frags, f, w);
    }
    Ok(out)
}

/// Summed fragment volume per node, indexed like the graph.
pub fn fragment_volumes(g: &CitationGraph, limit: usize) -> Result<Vec<f64>> {
    let frags = unfold(g, limit)?;
    let mut out = vec![0.0; g.node_count()];
    for f in &frags {
        out[f.node as usize] += f.volume;
    }
    Ok(out)
}
