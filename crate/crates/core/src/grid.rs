//! Finite-difference region detector on a uniform grid.
//!
//! With `x_n = (n - 1) / N` for `n = 1..=N`, consecutive secant slopes
//! `g_n` and `g_{n+1}` are compared; `x_{n+1}` is a region boundary when
//! `|g_{n+1} - g_n| >= threshold`. Runs of non-boundary points are counted
//! (the trailing run included) and the longest run divided by `N` is the
//! fineness estimate.

use crate::error::{Error, Result};
use crate::network::Network;

pub const DEFAULT_GRID: usize = 100_000;
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// The grid `x_n = (n - 1) / N`, `n = 1..=N`.
pub fn unit_grid(count: usize) -> Vec<f64> {
    (0..count).map(|i| i as f64 / count as f64).collect()
}

/// Fineness estimate of a `1 -> 1` network.
pub fn grid_fineness(net: &Network, grid_count: usize, threshold: f64) -> Result<f64> {
    if grid_count < 3 {
        return Err(Error::Precondition(format!("grid needs at least 3 points, got {grid_count}")));
    }
    let xs = unit_grid(grid_count);
    let ys = net.eval_scalar(&xs)?;
    Ok(grid_fineness_from_samples(&xs, &ys, threshold))
}

/// Same detector over precomputed samples `(x_n, F(x_n))`.
pub fn grid_fineness_from_samples(xs: &[f64], ys: &[f64], threshold: f64) -> f64 {
    longest_run(xs, ys, threshold) as f64 / xs.len() as f64
}

fn longest_run(xs: &[f64], ys: &[f64], threshold: f64) -> usize {
    let mut count = 0usize;
    let mut count_max = 0usize;
    for n in 0..xs.len().saturating_sub(2) {
        let g0 = (ys[n + 1] - ys[n]) / (xs[n + 1] - xs[n]);
        let g1 = (ys[n + 2] - ys[n + 1]) / (xs[n + 2] - xs[n + 1]);
        if (g1 - g0).abs() < threshold {
            count += 1;
        } else {
            count_max = count_max.max(count);
            count = 0;
        }
    }
    count_max.max(count)
}
