//! Monte Carlo estimate of the ratio of desired parameters.
//!
//! For each parameter draw the network is evaluated on `x_n = (n-1)/N`, its
//! outputs are standardized (the target values are not), and the mean squared
//! difference `d̂` to the target is computed. `R̂(ε_k)` is the fraction of
//! draws with `d̂ <= ε_k`. Draws whose output is constant cannot be
//! standardized and fail every threshold, while still counting in the
//! denominator.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::grid::unit_grid;
use crate::network::NetworkShape;
use crate::parallel::{map_indexed, Workers};
use crate::pwl::fmt_f64;
use crate::sampling::{sample_network, Distribution};
use crate::stats::standardize_in_place;
use crate::target::TargetFunction;

/// `ε_k = offset + step (k - 1)` for `k = 1..=count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonGrid {
    pub offset: f64,
    pub step: f64,
    pub count: usize,
}

impl EpsilonGrid {
    pub const SIN_DEFAULT: EpsilonGrid = EpsilonGrid { offset: 0.4, step: 4e-5, count: 10_000 };
    pub const WEIERSTRASS_DEFAULT: EpsilonGrid = EpsilonGrid { offset: 0.6, step: 2e-5, count: 10_000 };

    pub fn default_for(target: &TargetFunction) -> Self {
        match target {
            TargetFunction::Sin4Pi => Self::SIN_DEFAULT,
            TargetFunction::Weierstrass { .. } => Self::WEIERSTRASS_DEFAULT,
        }
    }

    /// Same span, `count` points.
    pub fn resampled(&self, count: usize) -> Self {
        let span = self.step * (self.count.saturating_sub(1)) as f64;
        let step = if count > 1 { span / (count - 1) as f64 } else { 0.0 };
        EpsilonGrid { offset: self.offset, step, count }
    }

    #[inline]
    pub fn value(&self, k: usize) -> f64 {
        self.offset + self.step * k as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.value(k)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioConfig {
    /// Number of sample points `N`.
    pub grid_count: usize,
    pub theta_draws: usize,
    pub epsilon: EpsilonGrid,
    pub seed: u64,
    pub distribution: Distribution,
}

impl RatioConfig {
    /// `N = 10⁴`, `2×10⁴` standard-normal draws and the target's ε grid.
    pub fn default_for(target: &TargetFunction, seed: u64) -> Self {
        RatioConfig {
            grid_count: 10_000,
            theta_draws: 20_000,
            epsilon: EpsilonGrid::default_for(target),
            seed,
            distribution: Distribution::StandardNormal,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta_draws == 0 {
            return Err(Error::Config("theta_draws must be at least 1".into()));
        }
        if self.grid_count < 2 {
            return Err(Error::Config("the sample grid needs at least 2 points".into()));
        }
        if self.epsilon.count == 0 || !(self.epsilon.step >= 0.0) || !self.epsilon.offset.is_finite() {
            return Err(Error::Config(format!("invalid epsilon grid {:?}", self.epsilon)));
        }
        Ok(())
    }
}

/// `(1/N) Σ (f_n - g_n)²`.
pub fn empirical_distance(f_vals: &[f64], g_vals: &[f64]) -> Result<f64> {
    if f_vals.len() != g_vals.len() || f_vals.is_empty() {
        return Err(Error::Shape(format!("distance needs equal non-empty lengths, got {} and {}", f_vals.len(), g_vals.len())));
    }
    Ok(f_vals.iter().zip(g_vals).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / f_vals.len() as f64)
}

/// `R̂(ε_k)` for every `ε_k` of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioCurve {
    pub shape: NetworkShape,
    pub target: TargetFunction,
    pub seed: u64,
    pub draws: usize,
    pub epsilons: Vec<f64>,
    /// `t_k`: number of draws with `d̂ <= ε_k`.
    pub counts: Vec<usize>,
    /// Draws whose output was constant.
    pub degenerate: usize,
}

impl RatioCurve {
    pub fn ratio(&self, k: usize) -> f64 {
        self.counts[k] as f64 / self.draws as f64
    }

    pub fn ratios(&self) -> Vec<f64> {
        (0..self.counts.len()).map(|k| self.ratio(k)).collect()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.epsilons.iter().copied().zip(self.ratios())
    }

    /// Comment header with provenance, then `epsilon,ratio` rows.
    pub fn to_csv(&self, network_name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# network={network_name} widths={:?} target={} draws={} seed={} version={}",
            self.shape.widths,
            self.target.name(),
            self.draws,
            self.seed,
            env!("CARGO_PKG_VERSION")
        );
        out.push_str("epsilon,ratio\n");
        for (e, r) in self.points() {
            let _ = writeln!(out, "{},{}", fmt_f64(e), fmt_f64(r));
        }
        out
    }
}

/// `d̂` for draw `index`, or `None` when the network output is constant.
pub fn draw_distance(
    shape: &NetworkShape,
    activation: &Activation,
    xs: &[f64],
    target_vals: &[f64],
    cfg: &RatioConfig,
    index: u64,
) -> Result<Option<f64>> {
    let net = sample_network(shape, activation, cfg.distribution, cfg.seed, index)?;
    let mut ys = net.eval_scalar(xs)?;
    match standardize_in_place(&mut ys) {
        Ok(()) => empirical_distance(&ys, target_vals).map(Some),
        Err(Error::DegenerateConstant { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Per-draw distances of a run, in draw order.
pub fn draw_distances(
    shape: &NetworkShape,
    activation: &Activation,
    target: &TargetFunction,
    cfg: &RatioConfig,
    workers: Workers,
) -> Result<Vec<Option<f64>>> {
    cfg.validate()?;
    target.validate()?;
    shape.validate()?;
    if shape.input_dim != 1 || shape.output_dim() != 1 {
        return Err(Error::Shape("the ratio estimate needs a 1 -> 1 network".into()));
    }
    let xs = unit_grid(cfg.grid_count);
    let target_vals = target.eval_grid(&xs);
    map_indexed(cfg.theta_draws, workers, |i| draw_distance(shape, activation, &xs, &target_vals, cfg, i as u64)).into_iter().collect()
}

/// Counting step of the estimator: `t_k = #{draws : d̂ <= ε_k}`.
pub fn ratio_curve_from_distances(
    shape: &NetworkShape,
    target: &TargetFunction,
    cfg: &RatioConfig,
    distances: &[Option<f64>],
) -> RatioCurve {
    let mut sorted: Vec<f64> = distances.iter().flatten().copied().filter(|d| !d.is_nan()).collect();
    sorted.sort_by(f64::total_cmp);
    let epsilons = cfg.epsilon.values();
    let counts = epsilons.iter().map(|&e| sorted.partition_point(|&d| d <= e)).collect();
    RatioCurve {
        shape: shape.clone(),
        target: *target,
        seed: cfg.seed,
        draws: distances.len(),
        epsilons,
        counts,
        degenerate: distances.iter().filter(|d| d.is_none()).count(),
    }
}

pub fn estimate_ratio_curve(
    shape: &NetworkShape,
    activation: &Activation,
    target: &TargetFunction,
    cfg: &RatioConfig,
    workers: Workers,
) -> Result<RatioCurve> {
    let distances = draw_distances(shape, activation, target, cfg, workers)?;
    Ok(ratio_curve_from_distances(shape, target, cfg, &distances))
}

/// Fraction of shared ε values at which `a`'s ratio is at least `b`'s.
pub fn dominance(a: &RatioCurve, b: &RatioCurve) -> Result<f64> {
    if a.epsilons != b.epsilons {
        return Err(Error::Precondition("curves were computed on different epsilon grids".into()));
    }
    if a.epsilons.is_empty() {
        return Err(Error::Precondition("empty curves".into()));
    }
    let wins = (0..a.counts.len()).filter(|&k| a.ratio(k) >= b.ratio(k)).count();
    Ok(wins as f64 / a.counts.len() as f64)
}
