//! Random small traces and brute-force oracles that work from raw records,
//! never from the dataset indexes.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use prepush::{TraceDataset, VisitRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Row = (String, String, String);

pub fn rows(ds: &TraceDataset) -> Vec<Row> {
    ds.records()
        .iter()
        .map(|r| (r.user_id.clone(), r.title_id.clone(), r.cell_id.clone()))
        .collect()
}

pub fn dataset(rows: &[Row]) -> TraceDataset {
    TraceDataset::build(
        rows.iter()
            .map(|(u, t, c)| VisitRecord::new(u.as_str(), t.as_str(), c.as_str(), None))
            .collect(),
    )
    .unwrap()
}

/// A random trace with at most `users` users, `cells` cells, `titles`
/// titles and `visits` visits. Users favour a home cell, so most-active-cell
/// placement is neither perfect nor hopeless.
pub fn random_rows(
    seed: u64,
    users: usize,
    cells: usize,
    titles: usize,
    visits: usize,
) -> Vec<Row> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_users = rng.random_range(1..=users);
    let n_cells = rng.random_range(1..=cells);
    let n_titles = rng.random_range(1..=titles);
    let n_visits = rng.random_range(1..=visits);
    let homes: Vec<usize> = (0..n_users).map(|_| rng.random_range(0..n_cells)).collect();
    let home_bias: f64 = rng.random_range(0.0..1.0);
    (0..n_visits)
        .map(|_| {
            // Squaring skews activity and popularity towards low indexes.
            let u = ((rng.random::<f64>().powi(2)) * n_users as f64) as usize;
            let t = ((rng.random::<f64>().powi(2)) * n_titles as f64) as usize;
            let c = if rng.random_bool(home_bias) {
                homes[u]
            } else {
                rng.random_range(0..n_cells)
            };
            (format!("u{u}"), format!("t{t}"), format!("c{c}"))
        })
        .collect()
}

pub fn count_by<F: Fn(&Row) -> String>(rows: &[Row], key: F) -> BTreeMap<String, u64> {
    let mut m = BTreeMap::new();
    for r in rows {
        *m.entry(key(r)).or_insert(0) += 1;
    }
    m
}

/// Most visited cell of `user`, smallest identifier on ties.
pub fn oracle_home(rows: &[Row], user: &str) -> String {
    let cells = count_by(
        &rows
            .iter()
            .filter(|r| r.0 == user)
            .cloned()
            .collect::<Vec<_>>(),
        |r| r.2.clone(),
    );
    let best = cells.values().copied().max().unwrap();
    cells.into_iter().find(|(_, n)| *n == best).unwrap().0
}

pub fn oracle_ranked_visitors(rows: &[Row], title: &str) -> Vec<String> {
    let activity = count_by(rows, |r| r.0.clone());
    let mut visitors: Vec<String> = rows
        .iter()
        .filter(|r| r.1 == title)
        .map(|r| r.0.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    visitors.sort_by(|a, b| activity[b].cmp(&activity[a]).then(a.cmp(b)));
    visitors
}

/// Targeted visitors for a coverage of `percent`/100, in exact integer
/// arithmetic: `⌈percent · n / 100⌉`.
pub fn oracle_target_count(percent: u64, n: usize) -> usize {
    ((percent * n as u64).div_ceil(100)) as usize
}

pub fn oracle_targets(rows: &[Row], title: &str, percent: u64) -> BTreeSet<String> {
    let ranked = oracle_ranked_visitors(rows, title);
    let k = oracle_target_count(percent, ranked.len());
    ranked[..k].iter().map(|u| oracle_home(rows, u)).collect()
}

/// `(|targets|, missed visits, total)` for an explicit target set.
pub fn oracle_cost_with(rows: &[Row], title: &str, targets: &BTreeSet<String>) -> (u64, u64, u64) {
    let missed = rows
        .iter()
        .filter(|r| r.1 == title && !targets.contains(&r.2))
        .count() as u64;
    let broadcast = targets.len() as u64;
    (broadcast, missed, broadcast + missed)
}

pub fn oracle_case_cost(rows: &[Row], title: &str, percent: u64) -> (u64, u64, u64) {
    oracle_cost_with(rows, title, &oracle_targets(rows, title, percent))
}

/// Full enumeration of the grid; smallest coverage wins ties.
pub fn oracle_argmin(rows: &[Row], title: &str, percents: &[u64]) -> (u64, u64) {
    let mut best: Option<(u64, u64)> = None;
    for &p in percents {
        let cost = oracle_case_cost(rows, title, p).2;
        if best.is_none_or(|(_, c)| cost < c) {
            best = Some((p, cost));
        }
    }
    best.unwrap()
}

pub fn percent_grid() -> Vec<u64> {
    (1..=20).map(|i| i * 5).collect()
}

pub fn titles(rows: &[Row]) -> Vec<String> {
    rows.iter()
        .map(|r| r.1.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

pub fn users(rows: &[Row]) -> Vec<String> {
    rows.iter()
        .map(|r| r.0.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Rewrites every record's cell to its user's most-active cell.
pub fn collapse_to_homes(rows: &[Row]) -> Vec<Row> {
    let homes: BTreeMap<String, String> = users(rows)
        .into_iter()
        .map(|u| (oracle_home(rows, &u), u))
        .map(|(h, u)| (u, h))
        .collect();
    rows.iter()
        .map(|(u, t, _)| (u.clone(), t.clone(), homes[u].clone()))
        .collect()
}
