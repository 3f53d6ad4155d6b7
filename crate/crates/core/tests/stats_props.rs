mod common;

use std::collections::BTreeMap;

use common::{dataset, random_rows, Row};
use prepush::stats::{
    concentration_curve, curve_from_counts, geo_concentration_profile, top_fraction_share,
    user_cell_shares, EntityKind,
};
use proptest::prelude::*;

/// Per-user share vectors, recomputed from raw rows.
fn oracle_share_vectors(rows: &[Row]) -> Vec<Vec<f64>> {
    let mut per_user: BTreeMap<&str, BTreeMap<&str, u64>> = BTreeMap::new();
    for (u, _, c) in rows {
        *per_user.entry(u).or_default().entry(c).or_insert(0) += 1;
    }
    per_user
        .values()
        .map(|cells| {
            let total: u64 = cells.values().sum();
            let mut counts: Vec<u64> = cells.values().copied().collect();
            counts.sort_unstable_by(|a, b| b.cmp(a));
            counts
                .into_iter()
                .map(|n| n as f64 / total as f64)
                .collect()
        })
        .collect()
}

proptest! {
    #[test]
    fn curves_are_monotone_and_concave(seed in any::<u64>()) {
        let ds = dataset(&random_rows(seed, 30, 10, 10, 300));
        for kind in [EntityKind::User, EntityKind::Title, EntityKind::Cell] {
            let curve = concentration_curve(&ds, kind).unwrap();
            let n = curve.len() as f64;
            prop_assert!((curve.points[0].entity_fraction - 1.0 / n).abs() < 1e-15);
            let last = curve.points.last().unwrap();
            prop_assert_eq!((last.entity_fraction, last.visit_share), (1.0, 1.0));
            let mut prev_step = f64::INFINITY;
            let mut prev = (0.0, 0.0);
            for p in &curve.points {
                prop_assert!(p.entity_fraction > prev.0);
                prop_assert!(p.visit_share >= prev.1);
                let step = p.visit_share - prev.1;
                prop_assert!(step <= prev_step + 1e-12);
                prev_step = step;
                prev = (p.entity_fraction, p.visit_share);
            }
            prop_assert_eq!(top_fraction_share(&curve, 1.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn top_share_matches_exhaustive_recount(
        counts in prop::collection::vec(1u64..50, 1..25),
        percent in 1u64..=100,
    ) {
        let curve = curve_from_counts(EntityKind::Title, &counts).unwrap();
        let fraction = percent as f64 / 100.0;
        let k = (percent as usize * counts.len()) / 100;
        let mut sorted = counts.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let expected = sorted[..k].iter().sum::<u64>() as f64 / counts.iter().sum::<u64>() as f64;
        let got = top_fraction_share(&curve, fraction).unwrap();
        prop_assert!((got - expected).abs() < 1e-12, "{} vs {}", got, expected);
    }

    #[test]
    fn user_shares_sum_to_one(seed in any::<u64>()) {
        let ds = dataset(&random_rows(seed, 30, 10, 10, 300));
        for u in ds.users() {
            let shares = user_cell_shares(&ds, ds.user_id(u)).unwrap();
            let sum: f64 = shares.iter().map(|s| s.1).sum();
            prop_assert!((sum - 1.0).abs() < 1e-9);
            prop_assert!(shares.windows(2).all(|w| w[0].1 > w[1].1 || (w[0].1 == w[1].1 && w[0].0 < w[1].0)));
        }
    }

    #[test]
    fn geo_profile_is_unweighted_mean_of_share_vectors(seed in any::<u64>(), max_rank in 1usize..12) {
        let rows = random_rows(seed, 30, 10, 10, 300);
        let ds = dataset(&rows);
        let vectors = oracle_share_vectors(&rows);
        let g = geo_concentration_profile(&ds, max_rank).unwrap();
        prop_assert_eq!(g.mean_share_by_rank.len(), max_rank);
        for k in 0..max_rank {
            let expected = vectors.iter().map(|v| v.get(k).copied().unwrap_or(0.0)).sum::<f64>()
                / vectors.len() as f64;
            prop_assert!((g.mean_share_by_rank[k] - expected).abs() < 1e-12);
        }
        prop_assert!(g.cumulative_by_rank.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(*g.cumulative_by_rank.last().unwrap() <= 1.0 + 1e-9);
        let mean_cells = vectors.iter().map(Vec::len).sum::<usize>() as f64 / vectors.len() as f64;
        prop_assert!((g.mean_active_cells - mean_cells).abs() < 1e-12);
    }
}
