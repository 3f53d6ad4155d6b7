//! Most-active-cell placement and estimated-versus-actual cell partitions.
//!
//! A broadcast plan for a title assumes each targeted visitor sits in its
//! most active cell (computed over the user's whole trace, not per title).
//! Targeted visitors are the most globally active fraction of the title's
//! distinct visitors. Any visit in a broadcast cell is satisfied, whoever
//! caused the cell to be included.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::fraction::{ceil_count, check_open_unit};
use crate::trace::{CellIx, TitleIx, TraceDataset, UserIx};
use crate::Result;

pub type CellSet = BTreeSet<CellIx>;

/// Split of a title's estimated broadcast cells against the cells its visits
/// actually came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellPartition {
    pub estimated: CellSet,
    pub actual: CellSet,
    pub hit: CellSet,
    pub missing: CellSet,
    pub mistaken: CellSet,
    /// Visits of the title made from `missing` cells.
    pub missed_visits: u64,
}

/// Cardinalities of a [`CellPartition`], one CSV row per title.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionSummary {
    pub title_id: String,
    pub estimated: usize,
    pub actual: usize,
    pub hit: usize,
    pub missing: usize,
    pub mistaken: usize,
    pub missed_visits: u64,
}

impl CellPartition {
    pub fn summary(&self, title_id: impl Into<String>) -> PartitionSummary {
        PartitionSummary {
            title_id: title_id.into(),
            estimated: self.estimated.len(),
            actual: self.actual.len(),
            hit: self.hit.len(),
            missing: self.missing.len(),
            mistaken: self.mistaken.len(),
            missed_visits: self.missed_visits,
        }
    }
}

pub fn most_active_cell<'a>(dataset: &'a TraceDataset, user: &str) -> Result<&'a str> {
    let u = dataset.require_user(user)?;
    Ok(dataset.cell_id(dataset.user_top_cell(u)))
}

/// Distinct visitors of `title` by descending global activity, ties by
/// ascending identifier.
pub(crate) fn ranked_visitors(dataset: &TraceDataset, title: TitleIx) -> Vec<UserIx> {
    let mut users = dataset.title_users(title).to_vec();
    // title_users is ascending, so a stable sort keeps identifier order on ties.
    users.sort_by_key(|&u| std::cmp::Reverse(dataset.user_visits(u)));
    users
}

pub fn rank_title_visitors<'a>(dataset: &'a TraceDataset, title: &str) -> Result<Vec<&'a str>> {
    let t = dataset.require_title(title)?;
    Ok(ranked_visitors(dataset, t)
        .into_iter()
        .map(|u| dataset.user_id(u))
        .collect())
}

/// Number of targeted visitors for a coverage fraction: `⌈coverage · n⌉`.
pub fn target_user_count(coverage: f64, visitors: usize) -> usize {
    ceil_count(coverage, visitors)
}

pub(crate) fn target_cells(dataset: &TraceDataset, title: TitleIx, coverage: f64) -> CellSet {
    let ranked = ranked_visitors(dataset, title);
    let k = target_user_count(coverage, ranked.len());
    ranked[..k]
        .iter()
        .map(|&u| dataset.user_top_cell(u))
        .collect()
}

/// Most-active cells of the top `⌈coverage · n⌉` visitors of `title`.
pub fn estimate_target_cells(
    dataset: &TraceDataset,
    title: &str,
    coverage: f64,
) -> Result<CellSet> {
    let t = dataset.require_title(title)?;
    check_open_unit("coverage", coverage)?;
    Ok(target_cells(dataset, t, coverage))
}

pub(crate) fn partition(
    dataset: &TraceDataset,
    title: TitleIx,
    estimated: &CellSet,
) -> CellPartition {
    let visits = dataset.title_cell_visits(title);
    let actual: CellSet = visits.keys().copied().collect();
    let hit: CellSet = estimated.intersection(&actual).copied().collect();
    let missing: CellSet = actual.difference(estimated).copied().collect();
    let mistaken: CellSet = estimated.difference(&actual).copied().collect();
    let missed_visits = missing.iter().map(|c| visits[c]).sum();
    CellPartition {
        estimated: estimated.clone(),
        actual,
        hit,
        missing,
        mistaken,
        missed_visits,
    }
}

pub fn partition_cells(
    dataset: &TraceDataset,
    title: &str,
    estimated: &CellSet,
) -> Result<CellPartition> {
    let t = dataset.require_title(title)?;
    Ok(partition(dataset, t, estimated))
}
