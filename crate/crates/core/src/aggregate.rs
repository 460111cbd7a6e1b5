//! Additive roll-up of paper KQI by author, affiliation, country or discipline.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::error::{KqiError, Result};
use crate::graph::{CitationGraph, GroupKind};
use crate::kqi::KqiTable;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct GroupScore {
    pub kqi_sum: f64,
    pub paper_count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupAggregate {
    pub kind: GroupKind,
    pub scores: BTreeMap<String, GroupScore>,
    /// Papers carrying no key of this kind.
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupRow {
    pub key: String,
    pub kqi_sum: f64,
    pub paper_count: usize,
}

impl GroupAggregate {
    /// Rows by descending `kqi_sum`, ties by ascending key.
    pub fn ranked(&self) -> Vec<GroupRow> {
        let mut rows: Vec<GroupRow> = self
            .scores
            .iter()
            .map(|(k, s)| GroupRow {
                key: k.clone(),
                kqi_sum: s.kqi_sum,
                paper_count: s.paper_count,
            })
            .collect();
        rows.sort_by(|a, b| b.kqi_sum.total_cmp(&a.kqi_sum).then_with(|| a.key.cmp(&b.key)));
        rows
    }

    /// CSV `key,kqi_sum,paper_count`, ranked, optionally truncated.
    pub fn write_csv<W: Write>(&self, top: Option<usize>, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        w.write_record(["key", "kqi_sum", "paper_count"])?;
        for row in self.ranked().into_iter().take(top.unwrap_or(usize::MAX)) {
            w.serialize(row)?;
        }
        w.flush().map_err(|e| KqiError::Serialize(e.to_string()))
    }
}

/// Sums paper KQI per group key.
///
/// A paper with several keys adds its full KQI to each of them, unless
/// `first_only` is set, in which case only the first listed key counts.
/// Fails with [`KqiError::UnknownGroupKind`] when no node metadata mentions
/// `kind` at all.
pub fn aggregate_kqi(
    g: &CitationGraph,
    kt: &KqiTable,
    kind: GroupKind,
    first_only: bool,
) -> Result<GroupAggregate> {
    if !g.has_group_kind(kind) {
        return Err(KqiError::UnknownGroupKind(kind.to_string()));
    }
    let mut scores: BTreeMap<String, GroupScore> = BTreeMap::new();
    let mut skipped = 0;
    for v in g.paper_indices() {
        let keys = g.node(v).keys(kind);
        if keys.is_empty() {
            skipped += 1;
            continue;
        }
        let take = if first_only { 1 } else { keys.len() };
        for key in &keys[..take] {
            let s = scores.entry(key.clone()).or_default();
            s.kqi_sum += kt.kqi(v);
            s.paper_count += 1;
        }
    }
    Ok(GroupAggregate {
        kind,
        scores,
        skipped,
    })
}
