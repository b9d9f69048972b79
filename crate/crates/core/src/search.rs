//! Random search for the smallest grid-detected fineness.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::grid::{grid_fineness, DEFAULT_GRID, DEFAULT_THRESHOLD};
use crate::network::NetworkShape;
use crate::parallel::{map_indexed, Workers};
use crate::pwl::{fmt_f64, Interval};
use crate::sampling::{sample_network, Distribution};
use crate::trace::trace_exact;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinenessSearchConfig {
    pub draws: usize,
    pub grid_count: usize,
    pub threshold: f64,
    pub seed: u64,
    pub distribution: Distribution,
}

impl FinenessSearchConfig {
    /// 10³ draws from `U(0, 1)`, a 10⁵-point grid, threshold 0.5.
    pub fn with_seed(seed: u64) -> Self {
        FinenessSearchConfig {
            draws: 1000,
            grid_count: DEFAULT_GRID,
            threshold: DEFAULT_THRESHOLD,
            seed,
            distribution: Distribution::Uniform01,
        }
    }
}

/// Exact fineness of the best draw, compared against its grid estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossCheck {
    pub exact_fineness: f64,
    pub min_slope_jump: f64,
    /// `|grid - exact| <= 3 / grid_count`.
    pub agrees: bool,
    /// Every true slope jump reaches the detector threshold.
    pub detectable: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FinenessSearchReport {
    pub min_fineness: f64,
    pub argmin: usize,
    pub draws: usize,
    pub seed: u64,
    pub per_draw: Vec<f64>,
    pub cross_check: CrossCheck,
}

impl FinenessSearchReport {
    /// `draw_index,fineness` rows and a trailing `min` row.
    pub fn to_csv(&self, network_name: &str, shape: &NetworkShape) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# network={network_name} widths={:?} draws={} seed={} version={}",
            shape.widths,
            self.draws,
            self.seed,
            env!("CARGO_PKG_VERSION")
        );
        out.push_str("draw_index,fineness\n");
        for (i, f) in self.per_draw.iter().enumerate() {
            let _ = writeln!(out, "{i},{}", fmt_f64(*f));
        }
        let _ = writeln!(out, "min,{}", fmt_f64(self.min_fineness));
        out
    }
}

pub fn min_fineness_search(
    shape: &NetworkShape,
    activation: &Activation,
    cfg: &FinenessSearchConfig,
    workers: Workers,
) -> Result<FinenessSearchReport> {
    if cfg.draws == 0 {
        return Err(Error::Config("fineness search needs at least one draw".into()));
    }
    shape.validate()?;
    let per_draw: Vec<f64> = map_indexed(cfg.draws, workers, |i| {
        let net = sample_network(shape, activation, cfg.distribution, cfg.seed, i as u64)?;
        grid_fineness(&net, cfg.grid_count, cfg.threshold)
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let (argmin, min_fineness) =
        per_draw.iter().copied().enumerate().fold((0, f64::INFINITY), |best, (i, f)| if f < best.1 { (i, f) } else { best });

    let best = sample_network(shape, activation, cfg.distribution, cfg.seed, argmin as u64)?;
    let exact = trace_exact(&best, Interval::UNIT)?;
    let min_slope_jump = exact.slope_jumps().into_iter().fold(f64::INFINITY, f64::min);
    let exact_fineness = exact.fineness();
    let agrees = (exact_fineness - min_fineness).abs() <= 3.0 / cfg.grid_count as f64;
    let detectable = min_slope_jump >= cfg.threshold;
    if !agrees {
        log::warn!(
            "grid fineness {min_fineness} of draw {argmin} differs from exact {exact_fineness} (smallest slope jump {min_slope_jump})"
        );
    }
    Ok(FinenessSearchReport {
        min_fineness,
        argmin,
        draws: cfg.draws,
        seed: cfg.seed,
        per_draw,
        cross_check: CrossCheck { exact_fineness, min_slope_jump, agrees, detectable },
    })
}
