#![allow(dead_code)]

use std::collections::BTreeMap;

use kqi::analysis::{pagerank, PageRankOptions};
use kqi::{CitationGraph, GraphBuilder, PaperNode};
use rand::Rng;

pub fn id(i: usize) -> String {
    format!("n{i:03}")
}

/// DAG on `n` nodes from an upper-triangular adjacency mask: pair `(i, j)`
/// with `i < j` gives knowledge edge `i -> j` (paper `j` cites paper `i`).
/// Paper `i` is published in year `2000 + i`.
pub fn dag_from_mask(n: usize, mask: &[bool]) -> CitationGraph {
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.add_node(PaperNode::new(id(i)).with_year(2000 + i as i32)).unwrap();
    }
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            if mask[k] {
                b.add_edge(&id(i), &id(j), 1.0).unwrap();
            }
            k += 1;
        }
    }
    b.build().unwrap()
}

pub fn random_dag<R: Rng>(rng: &mut R, n: usize, p: f64) -> CitationGraph {
    let mask: Vec<bool> = (0..n * n.saturating_sub(1) / 2).map(|_| rng.gen_bool(p)).collect();
    dag_from_mask(n, &mask)
}

/// Tree where node `i > 0` hangs under `parents[i - 1] < i`.
pub fn tree_from_parents(parents: &[usize]) -> CitationGraph {
    let mut b = GraphBuilder::new();
    b.add_node(PaperNode::new(id(0))).unwrap();
    for (i, &p) in parents.iter().enumerate() {
        b.add_edge(&id(p), &id(i + 1), 1.0).unwrap();
    }
    b.build().unwrap()
}

/// Tree formula evaluated directly: volume is the descendant count (plus
/// one super-root edge above node 0) and
/// `K(v) = -(V(v)/W) log2(V(v)/V(parent))`.
pub fn tree_kqi_direct(parents: &[usize]) -> Vec<f64> {
    let n = parents.len() + 1;
    let mut children = vec![Vec::new(); n];
    for (i, &p) in parents.iter().enumerate() {
        children[p].push(i + 1);
    }
    fn count(v: usize, children: &[Vec<usize>], out: &mut [f64]) -> f64 {
        let mut c = 0.0;
        for &ch in &children[v] {
            c += 1.0 + count(ch, children, out);
        }
        out[v] = c;
        c
    }
    let mut vol = vec![0.0; n];
    count(0, &children, &mut vol);
    let w = n as f64; // n - 1 tree edges + one super-root edge
    let root_vol = 1.0 + vol[0];
    (0..n)
        .map(|v| {
            let parent = if v == 0 { root_vol } else { vol[parents[v - 1]] };
            if vol[v] == 0.0 {
                0.0
            } else {
                -(vol[v] / w) * (vol[v] / parent).log2()
            }
        })
        .collect()
}

/// Shortest interior-free distance from every selected ancestor of `d`,
/// by enumerating all backward paths of at most `max_depth` edges whose
/// interior nodes are unselected.
pub fn interior_free_distances(
    g: &CitationGraph,
    selected: &[bool],
    d: usize,
    max_depth: usize,
) -> BTreeMap<usize, usize> {
    fn walk(
        g: &CitationGraph,
        selected: &[bool],
        v: usize,
        len: usize,
        max_depth: usize,
        best: &mut BTreeMap<usize, usize>,
    ) {
        for &u in g.in_neighbors(v) {
            let u = u as usize;
            if g.is_super_root(u) {
                continue;
            }
            if selected[u] {
                let e = best.entry(u).or_insert(len + 1);
                *e = (*e).min(len + 1);
            } else if len + 1 < max_depth {
                walk(g, selected, u, len + 1, max_depth, best);
            }
        }
    }
    let mut best = BTreeMap::new();
    walk(g, selected, d, 0, max_depth, &mut best);
    best
}

/// Dense power iteration over the same Markov chain as the library's
/// PageRank: citing -> cited by weight, uniform teleport and uniform
/// dangling redistribution, super root excluded.
pub fn dense_pagerank(g: &CitationGraph, damping: f64) -> Vec<f64> {
    let papers: Vec<usize> = g.paper_indices().collect();
    let n = papers.len();
    let pos: BTreeMap<usize, usize> = papers.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut m = vec![vec![0.0; n]; n]; // m[to][from]
    for (i, &v) in papers.iter().enumerate() {
        let outs: Vec<(usize, f64)> = g
            .in_neighbors(v)
            .iter()
            .zip(g.in_weights(v))
            .filter(|(&u, _)| !g.is_super_root(u as usize))
            .map(|(&u, &w)| (pos[&(u as usize)], w))
            .collect();
        let s: f64 = outs.iter().map(|x| x.1).sum();
        if s == 0.0 {
            for row in m.iter_mut() {
                row[i] = 1.0 / n as f64;
            }
        } else {
            for (j, w) in outs {
                m[j][i] += w / s;
            }
        }
    }
    let mut r = vec![1.0 / n as f64; n];
    for _ in 0..100_000 {
        let next: Vec<f64> = (0..n)
            .map(|j| (1.0 - damping) / n as f64 + damping * (0..n).map(|i| m[j][i] * r[i]).sum::<f64>())
            .collect();
        let diff: f64 = next.iter().zip(&r).map(|(a, b)| (a - b).abs()).sum();
        r = next;
        if diff < 1e-15 {
            break;
        }
    }
    let mut out = vec![0.0; g.node_count()];
    for (i, &v) in papers.iter().enumerate() {
        out[v] = r[i];
    }
    out
}

pub fn library_pagerank(g: &CitationGraph) -> Vec<f64> {
    pagerank(g, &PageRankOptions::default()).unwrap()
}

/// Discrete power-law exponent by maximum likelihood above `x_min`.
pub fn tail_exponent(xs: &[f64], x_min: f64) -> f64 {
    let tail: Vec<f64> = xs.iter().copied().filter(|&x| x >= x_min).collect();
    let s: f64 = tail.iter().map(|x| (x / (x_min - 0.5)).ln()).sum();
    1.0 + tail.len() as f64 / s
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}
