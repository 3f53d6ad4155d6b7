//! Seeded synthetic traces.
//!
//! Titles and users are drawn independently from bounded Zipf laws over their
//! rank. Each user owns `max_cells_per_user` distinct cells, picked uniformly
//! without replacement when the user is created. Slot `k` of that list is
//! visited with weight `geo_profile[k]`; the remaining mass `1 - Σ geo_profile`
//! is spread evenly over the slots past the profile.
//!
//! Identifiers are zero-padded ranks (`t00001` is the title with the largest
//! expected popularity, `u0001` the most active user), so they sort in rank
//! order.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::trace::{TraceDataset, VisitRecord};
use crate::{Error, Result};

/// Per-user share of the rank-1..5 active cell.
pub const DEFAULT_GEO_PROFILE: [f64; 5] = [0.58, 0.22, 0.09, 0.05, 0.02];

/// Generated timestamps are spread evenly over one week from this instant.
const WINDOW_START: u64 = 1_397_865_600;
const WINDOW_SECONDS: u64 = 7 * 24 * 3600;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub n_users: usize,
    pub n_titles: usize,
    pub n_cells: usize,
    pub n_visits: usize,
    pub title_zipf_exponent: f64,
    pub user_zipf_exponent: f64,
    pub geo_profile: Vec<f64>,
    pub max_cells_per_user: usize,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            n_users: 2_000,
            n_titles: 10_000,
            n_cells: 20_000,
            n_visits: 1_000_000,
            title_zipf_exponent: 1.0,
            user_zipf_exponent: 0.8,
            geo_profile: DEFAULT_GEO_PROFILE.to_vec(),
            max_cells_per_user: 10,
            seed: 0,
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        for (name, n) in [
            ("n_users", self.n_users),
            ("n_titles", self.n_titles),
            ("n_cells", self.n_cells),
            ("n_visits", self.n_visits),
            ("max_cells_per_user", self.max_cells_per_user),
        ] {
            if n == 0 {
                return Err(Error::invalid(format!("{name} must be positive")));
            }
        }
        for (name, s) in [
            ("title_zipf_exponent", self.title_zipf_exponent),
            ("user_zipf_exponent", self.user_zipf_exponent),
        ] {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive, got {s}")));
            }
        }
        if self
            .geo_profile
            .iter()
            .any(|w| !(w.is_finite() && *w >= 0.0))
        {
            return Err(Error::invalid("geo_profile entries must be non-negative"));
        }
        if self.geo_profile.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid("geo_profile must be non-increasing"));
        }
        let mass: f64 = self.geo_profile.iter().sum();
        if mass > 1.0 + 1e-9 {
            return Err(Error::invalid(format!("geo_profile sums to {mass} > 1")));
        }
        if self.max_cells_per_user < self.geo_profile.len() {
            return Err(Error::invalid(format!(
                "max_cells_per_user ({}) is shorter than geo_profile ({})",
                self.max_cells_per_user,
                self.geo_profile.len()
            )));
        }
        if self.n_cells < self.max_cells_per_user {
            return Err(Error::invalid(format!(
                "n_cells ({}) is smaller than max_cells_per_user ({})",
                self.n_cells, self.max_cells_per_user
            )));
        }
        if self.slot_weights().iter().all(|&w| w == 0.0) {
            return Err(Error::invalid(
                "geo_profile leaves no visit mass on any cell",
            ));
        }
        Ok(())
    }

    /// Visit weight of each of a user's cell slots.
    pub fn slot_weights(&self) -> Vec<f64> {
        let mut weights = self.geo_profile.clone();
        let rest = self.max_cells_per_user - self.geo_profile.len().min(self.max_cells_per_user);
        if rest > 0 {
            let residual = (1.0 - self.geo_profile.iter().sum::<f64>()).max(0.0);
            weights.extend(std::iter::repeat_n(residual / rest as f64, rest));
        }
        weights
    }
}

fn zipf_weights(n: usize, exponent: f64) -> Vec<f64> {
    (1..=n).map(|rank| (rank as f64).powf(-exponent)).collect()
}

fn id(prefix: char, ordinal: usize, total: usize) -> String {
    let width = total.to_string().len();
    format!("{prefix}{ordinal:0width$}")
}

/// Generates a trace; identical parameters give an identical dataset.
pub fn generate(params: &SynthParams) -> Result<TraceDataset> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let user_cells: Vec<Vec<usize>> = (0..params.n_users)
        .map(|_| {
            let mut cells =
                rand::seq::index::sample(&mut rng, params.n_cells, params.max_cells_per_user)
                    .into_vec();
            cells.shuffle(&mut rng);
            cells
        })
        .collect();

    let weighted = |w: Vec<f64>| WeightedIndex::new(w).map_err(|e| Error::invalid(e.to_string()));
    let title_dist = weighted(zipf_weights(params.n_titles, params.title_zipf_exponent))?;
    let user_dist = weighted(zipf_weights(params.n_users, params.user_zipf_exponent))?;
    let slot_dist = weighted(params.slot_weights())?;

    let user_ids: Vec<String> = (1..=params.n_users)
        .map(|i| id('u', i, params.n_users))
        .collect();
    let title_ids: Vec<String> = (1..=params.n_titles)
        .map(|i| id('t', i, params.n_titles))
        .collect();
    let cell_ids: Vec<String> = (1..=params.n_cells)
        .map(|i| id('c', i, params.n_cells))
        .collect();

    let n = params.n_visits as u128;
    let records = (0..params.n_visits)
        .map(|i| {
            let title = title_dist.sample(&mut rng);
            let user = user_dist.sample(&mut rng);
            let cell = user_cells[user][slot_dist.sample(&mut rng)];
            let offset = (i as u128 * WINDOW_SECONDS as u128 / n) as u64;
            VisitRecord::new(
                user_ids[user].clone(),
                title_ids[title].clone(),
                cell_ids[cell].clone(),
                Some(WINDOW_START + offset),
            )
        })
        .collect();

    TraceDataset::build(records)
}
