use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use pwl_expressivity::pwl::fmt_f64;
use pwl_expressivity::ratio::dominance;
use pwl_expressivity::{
    build_fold_network, estimate_ratio_curve, min_fineness_search, pwl_fold_bound, relu_fold_bound, trace_exact, FinenessSearchConfig,
    FinenessSearchReport, FoldSpec, Interval, Network, RatioCurve,
};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}

/// One summary row of the fineness experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct FinenessSummary {
    pub network: String,
    pub report: FinenessSearchReport,
    /// `None` when some hidden width is below `2 n₀`.
    pub pwl_fold_bound: Option<f64>,
    pub relu_fold_bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FinenessOutcome {
    pub summaries: Vec<FinenessSummary>,
    pub files: Vec<PathBuf>,
}

pub const FINENESS_SUMMARY_HEADER: &str =
    "network,hidden_widths,draws,seed,min_fineness,argmin,exact_fineness_at_argmin,grid_exact_agree,pwl_fold_bound,relu_fold_bound";

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".into(), fmt_f64)
}

fn join(v: &[usize]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

pub fn cmd_fineness(cfg: &ExperimentConfig) -> Result<FinenessOutcome> {
    cfg.validate()?;
    cfg.require_networks()?;
    let search = FinenessSearchConfig {
        draws: cfg.fineness.draws,
        grid_count: cfg.fineness.grid_count,
        threshold: cfg.fineness.threshold,
        seed: cfg.seed,
        distribution: cfg.fineness.distribution,
    };
    let mut summaries = Vec::new();
    let mut files = Vec::new();
    let mut table = format!("# seed={} version={}\n{FINENESS_SUMMARY_HEADER}\n", cfg.seed, env!("CARGO_PKG_VERSION"));
    for net in &cfg.networks {
        let shape = net.shape()?;
        log::info!("fineness search for {} ({} draws)", net.name, search.draws);
        let report = min_fineness_search(&shape, &net.activation.resolve()?, &search, cfg.workers())?;
        let path = cfg.out_dir.join(format!("fineness_{}.csv", net.name));
        write_file(&path, &report.to_csv(&net.name, &shape))?;
        files.push(path);

        let summary = FinenessSummary {
            network: net.name.clone(),
            pwl_fold_bound: pwl_fold_bound(net.input_dim, &net.hidden_widths).ok(),
            relu_fold_bound: relu_fold_bound(net.input_dim, &net.hidden_widths).ok(),
            report,
        };
        let r = &summary.report;
        let _ = writeln!(
            table,
            "{},{},{},{},{},{},{},{},{},{}",
            net.name,
            join(&net.hidden_widths),
            r.draws,
            r.seed,
            fmt_f64(r.min_fineness),
            r.argmin,
            fmt_f64(r.cross_check.exact_fineness),
            r.cross_check.agrees,
            opt(summary.pwl_fold_bound),
            opt(summary.relu_fold_bound)
        );
        summaries.push(summary);
    }
    let path = cfg.out_dir.join("fineness_summary.csv");
    write_file(&path, &table)?;
    files.push(path);
    Ok(FinenessOutcome { summaries, files })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DominanceRow {
    pub target: String,
    pub network_a: String,
    pub network_b: String,
    /// Fraction of ε values where `network_a`'s ratio is at least `network_b`'s.
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioOutcome {
    /// `(network, target, curve)` in configuration order.
    pub curves: Vec<(String, String, RatioCurve)>,
    pub dominance: Vec<DominanceRow>,
    pub files: Vec<PathBuf>,
}

pub fn cmd_ratio(cfg: &ExperimentConfig) -> Result<RatioOutcome> {
    cfg.validate()?;
    cfg.require_networks()?;
    let targets = cfg.ratio_targets();
    if targets.is_empty() {
        return Err(HarnessError::Config("no targets configured".into()));
    }
    let mut curves = Vec::new();
    let mut files = Vec::new();
    let mut rows = Vec::new();
    for target in targets {
        let function = target.function()?;
        let rc = cfg.ratio_config(target)?;
        let mut per_target = Vec::new();
        for net in &cfg.networks {
            log::info!("ratio curve for {} on {} ({} draws)", net.name, target.name, rc.theta_draws);
            let curve = estimate_ratio_curve(&net.shape()?, &net.activation.resolve()?, &function, &rc, cfg.workers())?;
            let path = cfg.out_dir.join(format!("ratio_{}_{}.csv", net.name, target.name));
            write_file(&path, &curve.to_csv(&net.name))?;
            files.push(path);
            per_target.push((net.name.clone(), curve));
        }
        for (a, ca) in &per_target {
            for (b, cb) in &per_target {
                if a != b {
                    rows.push(DominanceRow {
                        target: target.name.clone(),
                        network_a: a.clone(),
                        network_b: b.clone(),
                        fraction: dominance(ca, cb)?,
                    });
                }
            }
        }
        curves.extend(per_target.into_iter().map(|(n, c)| (n, target.name.clone(), c)));
    }
    let mut table = format!("# seed={} version={}\ntarget,network_a,network_b,fraction\n", cfg.seed, env!("CARGO_PKG_VERSION"));
    for r in &rows {
        let _ = writeln!(table, "{},{},{},{}", r.target, r.network_a, r.network_b, fmt_f64(r.fraction));
    }
    let path = cfg.out_dir.join("dominance.csv");
    write_file(&path, &table)?;
    files.push(path);
    Ok(RatioOutcome { curves, dominance: rows, files })
}

/// JSON of the ReLU fold network with the given hidden widths.
pub fn cmd_construct(input_dim: usize, hidden_widths: &[usize]) -> Result<String> {
    let net = build_fold_network(&FoldSpec::new(input_dim, hidden_widths.to_vec()))?;
    Ok(net.to_json()?)
}

/// Piece table of a serialized `1 -> 1` network on `[0, 1]`.
pub fn cmd_trace(path: &Path) -> Result<String> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let net = Network::from_json(&text)?;
    Ok(trace_exact(&net, Interval::UNIT)?.to_csv())
}
