use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::schedule::ArrivalSchedule;
use crate::analysis::{fit_linear, growth_series, GrowthSeries, LinearFit};
use crate::error::{KqiError, Result};
use crate::graph::{CitationGraph, PaperNode};

/// What a node's attachment weight counts, on top of the virtual self-ring.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttachmentKernel {
    /// Citations received + 1.
    #[default]
    Citations,
    /// Citations received + references made + 1.
    TotalDegree,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaConfig {
    pub m: usize,
    pub schedule: ArrivalSchedule,
    pub seed: u64,
    pub steps: u32,
    #[serde(default)]
    pub kernel: AttachmentKernel,
}

impl BaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(KqiError::InvalidConfig("m must be at least 1".into()));
        }
        if self.steps == 0 {
            return Err(KqiError::InvalidConfig("steps must be at least 1".into()));
        }
        Ok(())
    }
}

/// Weighted draw over existing nodes: node `v` owns `weight(v)` slots.
#[derive(Clone, Debug, Default)]
pub(crate) struct Sampler {
    slots: Vec<u32>,
}

impl Sampler {
    #[cfg(test)]
    pub(crate) fn from_weights(weights: &[u32]) -> Self {
        let mut slots = Vec::with_capacity(weights.iter().map(|&w| w as usize).sum());
        for (v, &w) in weights.iter().enumerate() {
            slots.extend(std::iter::repeat(v as u32).take(w as usize));
        }
        Sampler { slots }
    }

    fn add(&mut self, v: u32, times: usize) {
        self.slots.extend(std::iter::repeat(v).take(times));
    }

    pub(crate) fn draw<R: Rng>(&self, rng: &mut R) -> u32 {
        self.slots[rng.gen_range(0..self.slots.len())]
    }

    /// `k` distinct targets, assuming more than `k` nodes hold slots.
    fn draw_distinct<R: Rng>(&self, rng: &mut R, k: usize, into: &mut Vec<u32>) {
        into.clear();
        while into.len() < k {
            let v = self.draw(rng);
            if !into.contains(&v) {
                into.push(v);
            }
        }
    }
}

/// Zero-padded ids so lexical order equals arrival order.
fn node_ids(n: usize) -> impl Iterator<Item = String> {
    let width = n.saturating_sub(1).to_string().len();
    (0..n).map(move |i| format!("{i:0width$}"))
}

/// Preferential-attachment citation network. Each arrival cites
/// `min(m, existing)` distinct earlier nodes drawn in proportion to their
/// kernel weight; edges run cited -> citing and years are arrival steps.
pub fn generate_ba(cfg: &BaConfig) -> Result<CitationGraph> {
    cfg.validate()?;
    let arrivals = cfg.schedule.arrivals(cfg.m, cfg.steps)?;
    let n: u64 = arrivals.iter().sum();
    if n > u32::MAX as u64 {
        return Err(KqiError::InvalidConfig(format!("{n} nodes exceed the index range")));
    }
    let n = n as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut sampler = Sampler::default();
    let mut edges: Vec<(u32, u32, f64)> = Vec::with_capacity(n.saturating_mul(cfg.m));
    let mut years = Vec::with_capacity(n);
    let mut targets = Vec::with_capacity(cfg.m);
    let mut v = 0u32;
    for (step, &count) in arrivals.iter().enumerate() {
        for _ in 0..count {
            if (v as usize) <= cfg.m {
                targets.clear();
                targets.extend(0..v);
            } else {
                sampler.draw_distinct(&mut rng, cfg.m, &mut targets);
            }
            for &t in &targets {
                edges.push((t, v, 1.0));
                sampler.add(t, 1);
            }
            let own = match cfg.kernel {
                AttachmentKernel::Citations => 1,
                AttachmentKernel::TotalDegree => 1 + targets.len(),
            };
            sampler.add(v, own);
            years.push(step as i32 + 1);
            v += 1;
        }
    }
    let nodes = node_ids(n)
        .zip(years)
        .map(|(id, y)| PaperNode::new(id).with_year(y))
        .collect();
    CitationGraph::from_sorted_parts(nodes, edges)
}

/// Total KQI of every yearly snapshot `1..=steps` of a simulated network.
pub fn simulated_growth(cfg: &BaConfig) -> Result<GrowthSeries> {
    let g = generate_ba(cfg)?;
    growth_series(&g, 1..=cfg.steps as i32, None)
}

/// Linear fit of total KQI against step under a standard schedule.
/// Linear fits of total KQI against step for a standard-schedule run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthCheck {
    /// Fit of the simplified total (sum of `V/W`); this is the checked one.
    pub simplified: LinearFit,
    /// Fit of the exact total, reported alongside.
    pub exact: LinearFit,
    pub series: GrowthSeries,
}

pub fn total_kqi_growth_check(cfg: &BaConfig) -> Result<GrowthCheck> {
    if !matches!(cfg.schedule, ArrivalSchedule::Standard { .. }) {
        return Err(KqiError::InvalidConfig(format!(
            "growth check needs a standard schedule, got {}",
            cfg.schedule.kind()
        )));
    }
    let series = simulated_growth(cfg)?;
    let xs: Vec<f64> = series.years().iter().map(|&y| y as f64).collect();
    Ok(GrowthCheck {
        simplified: fit_linear(&xs, &series.simplified_kqi())?,
        exact: fit_linear(&xs, &series.total_kqi())?,
        series,
    })
}
