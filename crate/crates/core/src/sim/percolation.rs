use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{KqiError, Result};
use crate::graph::CitationGraph;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActivationConfig {
    /// Active neighbours needed to activate.
    pub a: u32,
    pub seed_fraction: f64,
    pub rng_seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PercolationOutcome {
    pub active_fraction: f64,
    /// Rounds that activated at least one node.
    pub rounds: usize,
    pub seeded: usize,
    pub active: usize,
}

/// Bootstrap percolation over the undirected view of the graph (super root
/// excluded). Rounds are synchronous: a round's activations depend only on
/// the active set at its start.
pub fn bootstrap_percolation(g: &CitationGraph, cfg: &ActivationConfig) -> Result<PercolationOutcome> {
    if cfg.a == 0 {
        return Err(KqiError::InvalidConfig("activation threshold must be positive".into()));
    }
    if !(cfg.seed_fraction > 0.0 && cfg.seed_fraction < 1.0) {
        return Err(KqiError::InvalidConfig(format!(
            "seed fraction {} outside (0, 1)",
            cfg.seed_fraction
        )));
    }
    let papers: Vec<usize> = g.paper_indices().collect();
    let n = papers.len();
    if n == 0 {
        return Err(KqiError::DegenerateInput("percolation on an empty graph".into()));
    }
    let seeds = ((cfg.seed_fraction * n as f64).ceil() as usize).clamp(1, n);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut active = vec![false; g.node_count()];
    let mut hits = vec![0u32; g.node_count()];
    let mut frontier: Vec<usize> = sample(&mut rng, n, seeds).into_iter().map(|i| papers[i]).collect();
    frontier.sort_unstable();
    for &v in &frontier {
        active[v] = true;
    }
    let neighbours = |v: usize| {
        g.in_neighbors(v)
            .iter()
            .chain(g.out_neighbors(v))
            .map(|&u| u as usize)
            .filter(|&u| !g.is_super_root(u))
    };
    let mut count = seeds;
    let mut rounds = 0;
    loop {
        let mut next = Vec::new();
        for &v in &frontier {
            for u in neighbours(v) {
                if active[u] {
                    continue;
                }
                hits[u] += 1;
                if hits[u] == cfg.a {
                    next.push(u);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        for &u in &next {
            active[u] = true;
        }
        count += next.len();
        rounds += 1;
        frontier = next;
    }
    Ok(PercolationOutcome {
        active_fraction: count as f64 / n as f64,
        rounds,
        seeded: seeds,
        active: count,
    })
}
