//! Year-by-year KQI totals, linear-growth fit and boom detection.

use std::io::Write;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{fit_linear, LinearFit};
use crate::error::{KqiError, Result};
use crate::graph::{CitationGraph, DecaySpec, SnapshotSpec};
use crate::kqi::compute_kqi;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthPoint {
    pub year: i32,
    pub total_kqi: f64,
    /// Sum of `V(v)/W` over papers: the KQI approximation that drops the
    /// log term.
    pub simplified_kqi: f64,
    /// Papers in the snapshot.
    pub n: usize,
    /// Mean weighted reference count per paper (super-root edges excluded).
    pub m: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct GrowthSeries {
    pub points: Vec<GrowthPoint>,
}

impl GrowthSeries {
    pub fn years(&self) -> Vec<i32> {
        self.points.iter().map(|p| p.year).collect()
    }

    pub fn total_kqi(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.total_kqi).collect()
    }

    pub fn simplified_kqi(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.simplified_kqi).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// CSV `year,total_kqi,simplified_kqi,n,m`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        w.write_record(["year", "total_kqi", "simplified_kqi", "n", "m"])?;
        for p in &self.points {
            w.serialize(p)?;
        }
        w.flush().map_err(|e| KqiError::Serialize(e.to_string()))
    }
}

/// Snapshot totals at one cutoff year.
pub fn growth_point(g: &CitationGraph, year: i32, decay_lambda: Option<f64>) -> Result<GrowthPoint> {
    let snap = g.snapshot_at(&SnapshotSpec { cutoff_year: year })?;
    let mut aug = snap.augment_super_root()?;
    if let Some(lambda) = decay_lambda {
        aug = aug.apply_decay(&DecaySpec {
            lambda,
            reference_time: year,
        })?;
    }
    let (vt, kt) = compute_kqi(&aug)?;
    let n = aug.paper_count();
    let w = vt.total_weight();
    let simplified_kqi = if w > 0.0 {
        aug.paper_indices().fold(0.0, |a, v| a + vt.volume(v)) / w
    } else {
        0.0
    };
    let references: f64 = aug
        .edges()
        .filter(|&(s, _, _)| !aug.is_super_root(s as usize))
        .fold(0.0, |a, e| a + e.2);
    Ok(GrowthPoint {
        year,
        total_kqi: kt.total(),
        simplified_kqi,
        n,
        m: if n == 0 { 0.0 } else { references / n as f64 },
    })
}

/// Total KQI, paper count and mean references for each cutoff year.
/// Years are evaluated in parallel; the result is ordered by year.
pub fn growth_series(
    g: &CitationGraph,
    years: RangeInclusive<i32>,
    decay_lambda: Option<f64>,
) -> Result<GrowthSeries> {
    let years: Vec<i32> = years.collect();
    let points = years
        .par_iter()
        .map(|&y| growth_point(g, y, decay_lambda))
        .collect::<Result<Vec<_>>>()?;
    Ok(GrowthSeries { points })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoomScale {
    /// Rescale to `[0, 100]` before fitting.
    #[default]
    MinMax100,
    None,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoomTarget {
    /// Fit cumulative total KQI.
    #[default]
    Total,
    /// Fit year-over-year increments.
    Increments,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoomOptions {
    pub rss_critical: f64,
    pub scale: BoomScale,
    pub target: BoomTarget,
}

impl Default for BoomOptions {
    fn default() -> Self {
        BoomOptions {
            rss_critical: 9.0,
            scale: BoomScale::MinMax100,
            target: BoomTarget::Total,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoomReport {
    pub fit: LinearFit,
    pub boomed: bool,
    /// `(m - 1) / ln n` at the final year; absent when `n <= 1`.
    pub a: Option<f64>,
    /// First year with `m > a ln n + 1`.
    pub threshold_year: Option<i32>,
}

/// `(m - 1) / ln n`, the number of active neighbours a paper could require
/// and still let activity spread. `None` when `n <= 1`.
pub fn threshold_statistic(m: f64, n: f64) -> Option<f64> {
    (n > 1.0).then(|| (m - 1.0) / n.ln())
}

fn min_max_100(ys: &[f64]) -> Vec<f64> {
    let lo = ys.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        ys.iter().map(|y| (y - lo) / (hi - lo) * 100.0).collect()
    } else {
        vec![0.0; ys.len()]
    }
}

pub fn detect_boom(series: &GrowthSeries, opts: &BoomOptions) -> Result<BoomReport> {
    if series.len() < 5 {
        return Err(KqiError::TooFewPoints {
            needed: 5,
            got: series.len(),
        });
    }
    let years: Vec<f64> = series.points.iter().map(|p| f64::from(p.year)).collect();
    let totals = series.total_kqi();
    let (xs, ys) = match opts.target {
        BoomTarget::Total => (years, totals),
        BoomTarget::Increments => (
            years[1..].to_vec(),
            totals.windows(2).map(|w| w[1] - w[0]).collect(),
        ),
    };
    let ys = match opts.scale {
        BoomScale::MinMax100 => min_max_100(&ys),
        BoomScale::None => ys,
    };
    let fit = fit_linear(&xs, &ys)?;
    let last = series.points.last().expect("nonempty");
    let a = threshold_statistic(last.m, last.n as f64);
    let threshold_year = a.and_then(|a| {
        series
            .points
            .iter()
            .find(|p| p.n > 1 && p.m > a * (p.n as f64).ln() + 1.0)
            .map(|p| p.year)
    });
    Ok(BoomReport {
        boomed: fit.rss > opts.rss_critical,
        fit,
        a,
        threshold_year,
    })
}
