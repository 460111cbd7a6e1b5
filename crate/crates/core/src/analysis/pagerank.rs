//! Weighted PageRank by power iteration, with uniform teleport and uniform
//! redistribution of dangling mass. The super root and its edges are ignored.

use serde::{Deserialize, Serialize};

use crate::error::{KqiError, Result};
use crate::graph::CitationGraph;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankDirection {
    /// Walk from a citing paper to the papers it cites.
    #[default]
    CitingToCited,
    /// Walk along knowledge flow, from a cited paper to its citers.
    CitedToCiting,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PageRankOptions {
    pub damping: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub direction: RankDirection,
}

impl Default for PageRankOptions {
    fn default() -> Self {
        PageRankOptions {
            damping: 0.85,
            tolerance: 1e-10,
            max_iterations: 10_000,
            direction: RankDirection::CitingToCited,
        }
    }
}

/// Scores indexed like the graph; the super root scores 0. Real node
/// scores sum to 1.
pub fn pagerank(g: &CitationGraph, opts: &PageRankOptions) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&opts.damping) {
        return Err(KqiError::InvalidConfig(format!("damping {} outside [0, 1)", opts.damping)));
    }
    let nodes: Vec<usize> = g.paper_indices().collect();
    let n = nodes.len();
    let mut out = vec![0.0; g.node_count()];
    if n == 0 {
        return Ok(out);
    }
    // successor lists of the walk, by index, without super-root edges
    let walk = |v: usize| -> (&[u32], &[f64]) {
        match opts.direction {
            RankDirection::CitingToCited => (g.in_neighbors(v), g.in_weights(v)),
            RankDirection::CitedToCiting => (g.out_neighbors(v), g.out_weights(v)),
        }
    };
    let strength: Vec<f64> = (0..g.node_count())
        .map(|v| {
            let (nb, w) = walk(v);
            nb.iter()
                .zip(w)
                .filter(|(&u, _)| !g.is_super_root(u as usize))
                .map(|(_, w)| w)
                .sum()
        })
        .collect();

    let uniform = 1.0 / n as f64;
    let d = opts.damping;
    let mut rank = vec![0.0; g.node_count()];
    for &v in &nodes {
        rank[v] = uniform;
    }
    let mut next = vec![0.0; g.node_count()];
    for _ in 0..opts.max_iterations {
        let dangling: f64 = nodes.iter().filter(|&&v| strength[v] == 0.0).map(|&v| rank[v]).sum();
        let base = (1.0 - d) * uniform + d * dangling * uniform;
        for &v in &nodes {
            next[v] = base;
        }
        for &v in &nodes {
            if strength[v] == 0.0 {
                continue;
            }
            let (nb, w) = walk(v);
            let mass = d * rank[v] / strength[v];
            for (&u, &wu) in nb.iter().zip(w) {
                if !g.is_super_root(u as usize) {
                    next[u as usize] += mass * wu;
                }
            }
        }
        let diff: f64 = nodes.iter().map(|&v| (next[v] - rank[v]).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if diff < opts.tolerance {
            let sum: f64 = nodes.iter().map(|&v| rank[v]).sum();
            for &v in &nodes {
                out[v] = rank[v] / sum;
            }
            return Ok(out);
        }
    }
    Err(KqiError::Nonconvergence {
        iterations: opts.max_iterations,
    })
}
