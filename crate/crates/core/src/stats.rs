//! Concentration ("converging property") statistics.
//!
//! A [`ConcentrationCurve`] sorts the users, titles or cells of a trace by
//! descending visit count and reports, for the top `k` of `n` entities, the
//! share of all visits they account for. A [`GeoProfile`] averages each user's
//! ranked per-cell visit shares.
//!
//! Activity is the raw visit count over the whole trace. Ties always break by
//! ascending identifier.

use serde::{Deserialize, Serialize};

use crate::fraction::{check_open_unit, floor_count};
use crate::trace::{CellIx, TraceDataset, UserIx};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    User,
    Title,
    Cell,
}

impl EntityKind {
    pub fn name(self) -> &'static str {
        match self {
            EntityKind::User => "user",
            EntityKind::Title => "title",
            EntityKind::Cell => "cell",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    #[serde(rename = "fraction")]
    pub entity_fraction: f64,
    #[serde(rename = "share")]
    pub visit_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationCurve {
    pub kind: EntityKind,
    pub points: Vec<CurvePoint>,
}

impl ConcentrationCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Visit counts of every entity of `kind`, in handle (identifier) order.
pub fn entity_counts(dataset: &TraceDataset, kind: EntityKind) -> Vec<u64> {
    match kind {
        EntityKind::User => dataset.users().map(|u| dataset.user_visits(u)).collect(),
        EntityKind::Title => dataset.titles().map(|t| dataset.title_visits(t)).collect(),
        EntityKind::Cell => dataset.cells().map(|c| dataset.cell_visits(c)).collect(),
    }
}

/// Builds the cumulative-share curve from per-entity counts listed in
/// identifier order.
pub fn curve_from_counts(kind: EntityKind, counts: &[u64]) -> Result<ConcentrationCurve> {
    let total: u64 = counts.iter().sum();
    if counts.is_empty() || total == 0 {
        return Err(Error::EmptyDataset);
    }
    let mut order: Vec<usize> = (0..counts.len()).collect();
    // Stable sort keeps identifier order among equal counts.
    order.sort_by(|&a, &b| counts[b].cmp(&counts[a]));

    let n = counts.len() as f64;
    let mut cum = 0u64;
    let points = order
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            cum += counts[i];
            CurvePoint {
                entity_fraction: (k + 1) as f64 / n,
                visit_share: cum as f64 / total as f64,
            }
        })
        .collect();
    Ok(ConcentrationCurve { kind, points })
}

pub fn concentration_curve(dataset: &TraceDataset, kind: EntityKind) -> Result<ConcentrationCurve> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    curve_from_counts(kind, &entity_counts(dataset, kind))
}

/// Visit share of the top `⌊fraction · n⌋` entities; zero when that floor is 0.
pub fn top_fraction_share(curve: &ConcentrationCurve, fraction: f64) -> Result<f64> {
    check_open_unit("fraction", fraction)?;
    match floor_count(fraction, curve.len()) {
        0 => Ok(0.0),
        k => Ok(curve.points[k - 1].visit_share),
    }
}

/// `(cell, visits)` of a user by descending visits, ties by ascending cell.
pub(crate) fn ranked_user_cells(dataset: &TraceDataset, user: UserIx) -> Vec<(CellIx, u64)> {
    let mut cells: Vec<(CellIx, u64)> = dataset
        .user_cell_visits(user)
        .iter()
        .map(|(&c, &n)| (c, n))
        .collect();
    cells.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    cells
}

/// The user's cells by descending share of its visits.
pub fn user_cell_shares<'a>(dataset: &'a TraceDataset, user: &str) -> Result<Vec<(&'a str, f64)>> {
    let u = dataset.require_user(user)?;
    let total = dataset.user_visits(u) as f64;
    Ok(ranked_user_cells(dataset, u)
        .into_iter()
        .map(|(c, n)| (dataset.cell_id(c), n as f64 / total))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoProfile {
    pub mean_share_by_rank: Vec<f64>,
    pub cumulative_by_rank: Vec<f64>,
    pub mean_active_cells: f64,
    pub users: usize,
}

/// Mean over users (each weighted equally) of the share held by the user's
/// rank-`k` cell, for `k` in `1..=max_rank`. Users with fewer than `k` cells
/// contribute zero at that rank.
pub fn geo_concentration_profile(dataset: &TraceDataset, max_rank: usize) -> Result<GeoProfile> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if max_rank == 0 {
        return Err(Error::invalid("max_rank must be at least 1"));
    }
    let mut sums = vec![0.0f64; max_rank];
    let mut active_cells = 0usize;
    for u in dataset.users() {
        let total = dataset.user_visits(u) as f64;
        let ranked = ranked_user_cells(dataset, u);
        active_cells += ranked.len();
        for (slot, (_, n)) in sums.iter_mut().zip(&ranked) {
            *slot += *n as f64 / total;
        }
    }
    let users = dataset.user_count();
    let mean_share_by_rank: Vec<f64> = sums.iter().map(|s| s / users as f64).collect();
    let cumulative_by_rank = mean_share_by_rank
        .iter()
        .scan(0.0, |acc, s| {
            *acc += s;
            Some(*acc)
        })
        .collect();
    Ok(GeoProfile {
        mean_share_by_rank,
        cumulative_by_rank,
        mean_active_cells: active_cells as f64 / users as f64,
        users,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::VisitRecord;

    fn ds(rows: &[(&str, &str, &str)]) -> TraceDataset {
        TraceDataset::build(
            rows.iter()
                .map(|(u, t, c)| VisitRecord::new(*u, *t, *c, None))
                .collect(),
        )
        .unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn five_three_two() {
        let c = curve_from_counts(EntityKind::Title, &[3, 5, 2]).unwrap();
        let want = [(1.0 / 3.0, 0.5), (2.0 / 3.0, 0.8), (1.0, 1.0)];
        for (p, (f, s)) in c.points.iter().zip(want) {
            assert!(
                close(p.entity_fraction, f) && close(p.visit_share, s),
                "{p:?}"
            );
        }
        assert_eq!(c.points.last().unwrap().entity_fraction, 1.0);
        assert_eq!(c.points.last().unwrap().visit_share, 1.0);
        assert!(close(top_fraction_share(&c, 1.0 / 3.0).unwrap(), 0.5));
    }

    #[test]
    fn uniform_counts_follow_diagonal() {
        let c = curve_from_counts(EntityKind::Cell, &[7, 7, 7, 7]).unwrap();
        for p in &c.points {
            assert!(close(p.entity_fraction, p.visit_share));
        }
        let c = curve_from_counts(EntityKind::User, &[1; 10]).unwrap();
        assert!(close(top_fraction_share(&c, 0.2).unwrap(), 0.2));
    }

    #[test]
    fn fraction_below_one_entity_is_zero() {
        let c = curve_from_counts(EntityKind::User, &[5, 1, 1]).unwrap();
        assert_eq!(top_fraction_share(&c, 0.2).unwrap(), 0.0);
        assert_eq!(top_fraction_share(&c, 1.0).unwrap(), 1.0);
        assert!(top_fraction_share(&c, 0.0).is_err());
        assert!(top_fraction_share(&c, 1.5).is_err());
    }

    #[test]
    fn curve_over_dataset_kinds() {
        let d = ds(&[("a", "x", "c1"), ("a", "y", "c1"), ("b", "x", "c2")]);
        let users = concentration_curve(&d, EntityKind::User).unwrap();
        assert_eq!(users.len(), 2);
        assert!(close(users.points[0].visit_share, 2.0 / 3.0));
        let cells = concentration_curve(&d, EntityKind::Cell).unwrap();
        assert!(close(cells.points[0].visit_share, 2.0 / 3.0));
        assert!(
            concentration_curve(&TraceDataset::build(vec![]).unwrap(), EntityKind::User).is_err()
        );
    }

    #[test]
    fn user_shares_sorted() {
        let mut rows = vec![("u", "t", "A"); 6];
        rows.extend(vec![("u", "t", "B"); 3]);
        rows.push(("u", "t", "C"));
        let d = ds(&rows);
        let shares = user_cell_shares(&d, "u").unwrap();
        let want = [("A", 0.6), ("B", 0.3), ("C", 0.1)];
        assert_eq!(shares.len(), 3);
        for ((c, s), (wc, ws)) in shares.iter().zip(want) {
            assert_eq!(*c, wc);
            assert!(close(*s, ws));
        }
    }

    #[test]
    fn user_shares_degenerate_and_ties() {
        let d = ds(&[
            ("u", "t", "A"),
            ("v", "t", "B"),
            ("v", "t", "A"),
            ("v", "t", "A"),
            ("v", "t", "B"),
        ]);
        assert_eq!(user_cell_shares(&d, "u").unwrap(), vec![("A", 1.0)]);
        let v = user_cell_shares(&d, "v").unwrap();
        assert_eq!(v[0].0, "A");
        assert_eq!(v[1].0, "B");
        assert!(matches!(
            user_cell_shares(&d, "nobody"),
            Err(Error::UnknownUser(_))
        ));
    }

    #[test]
    fn single_cell_users_profile() {
        let d = ds(&[("a", "t", "c1"), ("a", "t", "c1"), ("b", "t", "c2")]);
        let g = geo_concentration_profile(&d, 3).unwrap();
        assert_eq!(g.mean_share_by_rank, vec![1.0, 0.0, 0.0]);
        assert_eq!(g.cumulative_by_rank, vec![1.0, 1.0, 1.0]);
        assert_eq!(g.mean_active_cells, 1.0);
        assert!(geo_concentration_profile(&d, 0).is_err());
    }

    #[test]
    fn profile_is_unweighted_mean() {
        // a: 3 of 4 visits in c1; b: one visit. Rank-1 mean = (0.75 + 1) / 2.
        let d = ds(&[
            ("a", "t", "c1"),
            ("a", "t", "c1"),
            ("a", "t", "c1"),
            ("a", "t", "c2"),
            ("b", "t", "c3"),
        ]);
        let g = geo_concentration_profile(&d, 2).unwrap();
        assert!(close(g.mean_share_by_rank[0], 0.875));
        assert!(close(g.mean_share_by_rank[1], 0.125));
        assert!(close(g.mean_active_cells, 1.5));
    }
}
