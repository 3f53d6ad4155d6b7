//! Conversions between fractions and entity counts.
//!
//! Fractions such as `0.1` or `0.7` are not exactly representable, so
//! `0.1 * 30` evaluates to `3.0000000000000004`. Both rounding helpers snap
//! products that lie within a relative `1e-9` of an integer onto that integer
//! before rounding, so a grid value of `0.1` over 30 entities selects 3.

use crate::{Error, Result};

const SNAP: f64 = 1e-9;

fn snapped(fraction: f64, n: usize) -> f64 {
    let x = fraction * n as f64;
    let nearest = x.round();
    if (x - nearest).abs() <= SNAP * nearest.abs().max(1.0) {
        nearest
    } else {
        x
    }
}

/// `⌊fraction · n⌋`, clamped to `n`.
pub fn floor_count(fraction: f64, n: usize) -> usize {
    (snapped(fraction, n).floor().max(0.0) as usize).min(n)
}

/// `⌈fraction · n⌉`, clamped to `n`.
pub fn ceil_count(fraction: f64, n: usize) -> usize {
    (snapped(fraction, n).ceil().max(0.0) as usize).min(n)
}

/// Checks `fraction ∈ (0, 1]`.
pub fn check_open_unit(name: &str, fraction: f64) -> Result<f64> {
    if fraction.is_finite() && fraction > 0.0 && fraction <= 1.0 {
        Ok(fraction)
    } else {
        Err(Error::invalid(format!(
            "{name} must lie in (0, 1], got {fraction}"
        )))
    }
}

/// Checks a strictly increasing, non-empty grid within `(0, 1]` (or `[0, 1]`
/// when `allow_zero` is set).
pub fn check_grid(name: &str, grid: &[f64], allow_zero: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid(format!("{name} must not be empty")));
    }
    for &g in grid {
        let lower_ok = if allow_zero { g >= 0.0 } else { g > 0.0 };
        if !(g.is_finite() && lower_ok && g <= 1.0) {
            let range = if allow_zero { "[0, 1]" } else { "(0, 1]" };
            return Err(Error::invalid(format!("{name} value {g} outside {range}")));
        }
    }
    if let Some(w) = grid.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::invalid(format!(
            "{name} must be strictly increasing ({} is followed by {})",
            w[0], w[1]
        )));
    }
    Ok(())
}
