//! Transmission cost model for pre-push broadcasting.
//!
//! Every visit of a title costs one unicast transmission. Broadcasting a title
//! into a cell costs one transmission and satisfies every visit of the title
//! made from that cell; visits from cells outside the broadcast set are still
//! unicast. Timing is ignored, so a broadcast satisfies a visit regardless of
//! the order in which they happen.
//!
//! The cases evaluated per title:
//!
//! - `Unicast`: no broadcast, cost `V(t)`.
//! - `Perfect`: broadcast into exactly the cells the title was visited from.
//! - `AssumedLocation`: broadcast into the most-active cell of every visitor.
//! - `LimitedCoverage`: as above, restricted to the most active fraction of
//!   visitors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fraction::{ceil_count, check_grid, check_open_unit};
use crate::placement::{self, CellSet};
use crate::trace::{TitleIx, TraceDataset};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostCase {
    Unicast,
    Perfect,
    AssumedLocation,
    LimitedCoverage,
    /// Caller-supplied target cells.
    Explicit,
}

impl CostCase {
    pub fn name(self) -> &'static str {
        match self {
            CostCase::Unicast => "unicast",
            CostCase::Perfect => "perfect",
            CostCase::AssumedLocation => "assumed_location",
            CostCase::LimitedCoverage => "limited_coverage",
            CostCase::Explicit => "explicit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub title_id: String,
    pub case: CostCase,
    pub coverage: f64,
    pub broadcast_transmissions: u64,
    pub missed_visits: u64,
    pub total_transmissions: u64,
}

impl CostBreakdown {
    fn new(title_id: &str, case: CostCase, coverage: f64, broadcast: u64, missed: u64) -> Self {
        CostBreakdown {
            title_id: title_id.to_owned(),
            case,
            coverage,
            broadcast_transmissions: broadcast,
            missed_visits: missed,
            total_transmissions: broadcast + missed,
        }
    }

    /// Transmissions saved against `unicast`; negative when broadcasting
    /// costs more than it saves.
    pub fn savings(&self, unicast: u64) -> i64 {
        unicast as i64 - self.total_transmissions as i64
    }
}

/// `V(t)`: one transmission per visit.
pub fn unicast_cost(dataset: &TraceDataset, title: &str) -> Result<u64> {
    Ok(dataset.title_visits(dataset.require_title(title)?))
}

fn perfect(dataset: &TraceDataset, t: TitleIx) -> CostBreakdown {
    let cells = dataset.title_cell_visits(t).len() as u64;
    CostBreakdown::new(dataset.title_id(t), CostCase::Perfect, 1.0, cells, 0)
}

/// Broadcast into every cell the title was visited from.
pub fn case1_cost(dataset: &TraceDataset, title: &str) -> Result<CostBreakdown> {
    Ok(perfect(dataset, dataset.require_title(title)?))
}

fn targeted(
    dataset: &TraceDataset,
    t: TitleIx,
    targets: &CellSet,
    case: CostCase,
    coverage: f64,
) -> CostBreakdown {
    let missed = placement::partition(dataset, t, targets).missed_visits;
    CostBreakdown::new(
        dataset.title_id(t),
        case,
        coverage,
        targets.len() as u64,
        missed,
    )
}

/// Broadcast into `target_cells`, unicast the visits from everywhere else.
pub fn broadcast_cost(
    dataset: &TraceDataset,
    title: &str,
    target_cells: &CellSet,
) -> Result<CostBreakdown> {
    let t = dataset.require_title(title)?;
    Ok(targeted(dataset, t, target_cells, CostCase::Explicit, 1.0))
}

fn at_coverage(dataset: &TraceDataset, t: TitleIx, coverage: f64) -> CostBreakdown {
    let case = if coverage == 1.0 {
        CostCase::AssumedLocation
    } else {
        CostCase::LimitedCoverage
    };
    let targets = placement::target_cells(dataset, t, coverage);
    targeted(dataset, t, &targets, case, coverage)
}

/// Broadcast into the most-active cells of the top `coverage` fraction of the
/// title's visitors. Coverage 1.0 is the assumed-location case.
pub fn case_cost(dataset: &TraceDataset, title: &str, coverage: f64) -> Result<CostBreakdown> {
    let t = dataset.require_title(title)?;
    check_open_unit("coverage", coverage)?;
    Ok(at_coverage(dataset, t, coverage))
}

/// `0.05, 0.10, ..., 1.00`.
pub fn default_coverage_grid() -> Vec<f64> {
    (1..=20).map(|i| i as f64 / 20.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageSweep {
    pub title_id: String,
    pub grid: Vec<f64>,
    pub costs: Vec<u64>,
    pub unicast_baseline: u64,
    pub optimal_coverage: f64,
    pub optimal_cost: u64,
}

/// Total cost of `title` at every coverage in `grid`, with the cheapest
/// coverage (smallest on ties).
///
/// Visitors are ranked once and the target set grows monotonically along the
/// grid, so the sweep is linear in the number of visitors.
pub fn sweep_coverage(dataset: &TraceDataset, title: &str, grid: &[f64]) -> Result<CoverageSweep> {
    let t = dataset.require_title(title)?;
    check_grid("coverage grid", grid, false)?;
    Ok(sweep(dataset, t, grid))
}

pub(crate) fn sweep(dataset: &TraceDataset, t: TitleIx, grid: &[f64]) -> CoverageSweep {
    let ranked = placement::ranked_visitors(dataset, t);
    let cell_visits = dataset.title_cell_visits(t);
    let baseline = dataset.title_visits(t);

    let mut targets = CellSet::new();
    let mut hit_visits = 0u64;
    let mut taken = 0usize;
    let mut costs = Vec::with_capacity(grid.len());
    for &coverage in grid {
        let k = ceil_count(coverage, ranked.len());
        for &u in &ranked[taken..k.max(taken)] {
            let cell = dataset.user_top_cell(u);
            if targets.insert(cell) {
                hit_visits += cell_visits.get(&cell).copied().unwrap_or(0);
            }
        }
        taken = taken.max(k);
        costs.push(targets.len() as u64 + (baseline - hit_visits));
    }

    let (best, &optimal_cost) = costs
        .iter()
        .enumerate()
        .min_by_key(|&(i, c)| (*c, i))
        .expect("grid is non-empty");
    CoverageSweep {
        title_id: dataset.title_id(t).to_owned(),
        grid: grid.to_vec(),
        costs,
        unicast_baseline: baseline,
        optimal_coverage: grid[best],
        optimal_cost,
    }
}

/// Placement mode of a whole-trace traffic curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanMode {
    Perfect,
    AssumedLocation,
    LimitedCoverage,
}

impl PlanMode {
    /// Coverage default for `LimitedCoverage`.
    pub const DEFAULT_LIMITED_COVERAGE: f64 = 0.2;

    /// Coverage the mode actually evaluates at.
    pub fn effective_coverage(self, coverage: f64) -> f64 {
        match self {
            PlanMode::Perfect | PlanMode::AssumedLocation => 1.0,
            PlanMode::LimitedCoverage => coverage,
        }
    }
}

/// Per-title cost under `mode`. `coverage` only matters for `LimitedCoverage`.
pub fn mode_cost(
    dataset: &TraceDataset,
    title: &str,
    mode: PlanMode,
    coverage: f64,
) -> Result<CostBreakdown> {
    let t = dataset.require_title(title)?;
    if mode == PlanMode::LimitedCoverage {
        check_open_unit("coverage", coverage)?;
    }
    Ok(title_mode_cost(dataset, t, mode, coverage))
}

fn title_mode_cost(
    dataset: &TraceDataset,
    t: TitleIx,
    mode: PlanMode,
    coverage: f64,
) -> CostBreakdown {
    match mode {
        PlanMode::Perfect => perfect(dataset, t),
        PlanMode::AssumedLocation => at_coverage(dataset, t, 1.0),
        PlanMode::LimitedCoverage => {
            let mut b = at_coverage(dataset, t, coverage);
            b.case = CostCase::LimitedCoverage;
            b
        }
    }
}

/// Titles by descending visits, ties by ascending identifier.
pub fn titles_by_popularity(dataset: &TraceDataset) -> Vec<TitleIx> {
    let mut titles: Vec<TitleIx> = dataset.titles().collect();
    titles.sort_by_key(|&t| std::cmp::Reverse(dataset.title_visits(t)));
    titles
}

/// Per-title costs under `mode` for every title, most popular first.
pub fn plan_all(
    dataset: &TraceDataset,
    mode: PlanMode,
    coverage: f64,
) -> Result<Vec<CostBreakdown>> {
    if mode == PlanMode::LimitedCoverage {
        check_open_unit("coverage", coverage)?;
    }
    Ok(titles_by_popularity(dataset)
        .par_iter()
        .map(|&t| title_mode_cost(dataset, t, mode, coverage))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrafficPoint {
    pub broadcast_ratio: f64,
    pub total_transmissions: u64,
    pub fraction_of_baseline: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficCurve {
    pub mode: PlanMode,
    pub coverage: f64,
    pub baseline: u64,
    pub points: Vec<TrafficPoint>,
}

pub fn fraction_of_baseline(total: u64, baseline: u64) -> f64 {
    total as f64 / baseline as f64
}

/// Whole-trace transmissions when the top `⌈p · n_titles⌉` titles are
/// broadcast under `mode` and all other titles stay unicast, for each `p`.
pub fn traffic_vs_broadcast_ratio(
    dataset: &TraceDataset,
    mode: PlanMode,
    coverage: f64,
    ratios: &[f64],
) -> Result<TrafficCurve> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    check_grid("broadcast ratios", ratios, true)?;
    if mode == PlanMode::LimitedCoverage {
        check_open_unit("coverage", coverage)?;
    }

    let ranked = titles_by_popularity(dataset);
    let counts: Vec<usize> = ratios
        .iter()
        .map(|&p| ceil_count(p, ranked.len()))
        .collect();
    let needed = counts.iter().copied().max().unwrap_or(0);
    let costs: Vec<u64> = ranked[..needed]
        .par_iter()
        .map(|&t| title_mode_cost(dataset, t, mode, coverage).total_transmissions)
        .collect();

    let baseline = dataset.total_visits();
    let mut broadcast_cost = vec![0u64; needed + 1];
    let mut broadcast_visits = vec![0u64; needed + 1];
    for (i, (&t, &cost)) in ranked.iter().zip(&costs).enumerate() {
        broadcast_cost[i + 1] = broadcast_cost[i] + cost;
        broadcast_visits[i + 1] = broadcast_visits[i] + dataset.title_visits(t);
    }

    let points = ratios
        .iter()
        .zip(&counts)
        .map(|(&p, &m)| {
            let total = broadcast_cost[m] + (baseline - broadcast_visits[m]);
            TrafficPoint {
                broadcast_ratio: p,
                total_transmissions: total,
                fraction_of_baseline: fraction_of_baseline(total, baseline),
            }
        })
        .collect();

    Ok(TrafficCurve {
        mode,
        coverage: mode.effective_coverage(coverage),
        baseline,
        points,
    })
}
