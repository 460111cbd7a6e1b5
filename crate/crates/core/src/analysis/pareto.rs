use std::io::Write;

use serde::Serialize;

use crate::error::{KqiError, Result};
use crate::kqi::KqiTable;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParetoReport {
    /// Smallest fraction `k/n` whose top-`k` papers hold at least `1 - k/n` of the total.
    pub p_star: f64,
    /// KQI share held by the top `p_star` fraction.
    pub share_at_p_star: f64,
    /// `(fraction, cumulative share)` for every `k = 0..=n`.
    pub curve: Vec<(f64, f64)>,
}

impl ParetoReport {
    /// CSV `fraction,share`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        w.write_record(["fraction", "share"])?;
        for &(f, s) in &self.curve {
            w.serialize((f, s))?;
        }
        w.flush().map_err(|e| KqiError::Serialize(e.to_string()))
    }
}

/// Pareto split of the real nodes of a KQI table.
pub fn pareto_split(kt: &KqiTable) -> Result<ParetoReport> {
    let ranked: Vec<f64> = kt.ranked().into_iter().map(|(_, k)| k).collect();
    pareto_from_ranked(&ranked)
}

/// Pareto split of arbitrary nonnegative scores.
pub fn pareto_from_scores(scores: &[f64]) -> Result<ParetoReport> {
    let mut ranked = scores.to_vec();
    ranked.sort_by(|a, b| b.total_cmp(a));
    pareto_from_ranked(&ranked)
}

fn pareto_from_ranked(ranked: &[f64]) -> Result<ParetoReport> {
    let total: f64 = ranked.iter().sum();
    if ranked.is_empty() || total <= 0.0 {
        return Err(KqiError::AllZero);
    }
    let n = ranked.len();
    let mut curve = Vec::with_capacity(n + 1);
    curve.push((0.0, 0.0));
    let mut acc = 0.0;
    for (i, &k) in ranked.iter().enumerate() {
        acc += k;
        let share = if i + 1 == n { 1.0 } else { (acc / total).min(1.0) };
        curve.push(((i + 1) as f64 / n as f64, share));
    }
    let (p_star, share_at_p_star) = curve[1..]
        .iter()
        .copied()
        .find(|&(f, s)| s >= 1.0 - f)
        .expect("the full set always qualifies");
    Ok(ParetoReport {
        p_star,
        share_at_p_star,
        curve,
    })
}
