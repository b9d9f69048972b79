//! Property suites behind `pwlx verify`.

use std::fmt::Write as _;

use pwl_expressivity::construction::{relu_fold_bound, BOUND_TOL};
use pwl_expressivity::grid::grid_fineness;
use pwl_expressivity::pwl::RefinementWitness;
use pwl_expressivity::sampling::{draw_rng, sample_network};
use pwl_expressivity::{
    build_fold_network, check_identification, check_refinement, fixtures, trace_exact, verify_depth_bound, Activation, BoundReport,
    Distribution, FoldSpec, Interval, Network, NetworkShape, PiecewiseLinear1D,
};
use rand::Rng;

use crate::commands::write_file;
use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

/// Outcome of one named check; `detail` carries the witness on failure.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub bounds: Vec<BoundReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(out, "{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
        }
        out
    }

    pub fn into_result(self) -> Result<Self> {
        if self.passed() {
            Ok(self)
        } else {
            let failed: Vec<String> = self.checks.iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.name, c.detail)).collect();
            Err(HarnessError::Property(failed.join("\n")))
        }
    }
}

/// The depth bound is attained for one shape.
pub fn bound_check(name: &str, input_dim: usize, hidden_widths: &[usize], activation: &Activation) -> (Check, Option<BoundReport>) {
    match verify_depth_bound(input_dim, hidden_widths, activation) {
        Ok(rep) => {
            let detail = format!(
                "n0={input_dim} widths={hidden_widths:?} achieved={:e} bound={:e} value_error={:e}",
                rep.achieved_fineness, rep.bound, rep.max_value_error
            );
            (Check::new(format!("depth bound [{name}]"), rep.attains, detail), Some(rep))
        }
        Err(e) => (Check::new(format!("depth bound [{name}]"), false, format!("n0={input_dim} widths={hidden_widths:?}: {e}")), None),
    }
}

/// A single-hidden-layer fold network with `p` teeth identifies `p` regions
/// onto `[0, 1]`.
pub fn identification_check(name: &str, net: &Network, p: usize) -> Check {
    let h = match trace_exact(net, Interval::UNIT) {
        Ok(h) => h,
        Err(e) => return Check::new(name, false, e.to_string()),
    };
    let rep = check_identification(&h, Interval::UNIT);
    match rep.witness {
        Some((iv, (y0, y1))) if !rep.holds => Check::new(
            name,
            false,
            format!("region [{}, {}] maps to [{y0}, {y1}] instead of [0, 1] (teeth expected {p})", iv.left, iv.right),
        ),
        _ if rep.pieces != p => Check::new(name, false, format!("found {} identified regions, expected {p}", rep.pieces)),
        _ => Check::new(name, true, format!("{p} regions identified onto [0, 1]")),
    }
}

fn fold_trace(widths: &[usize]) -> Result<PiecewiseLinear1D> {
    Ok(trace_exact(&build_fold_network(&FoldSpec::new(1, widths.to_vec()))?, Interval::UNIT)?)
}

/// Per-layer identification plus the geometric depth law for one shape.
pub fn fold_suite(name: &str, hidden_widths: &[usize]) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (l, &n) in hidden_widths.iter().enumerate() {
        let net = build_fold_network(&FoldSpec::new(1, vec![n]))?;
        checks.push(identification_check(&format!("identification [{name}, layer {}]", l + 1), &net, n));
    }
    let f = fold_trace(hidden_widths)?;
    let exact: f64 = hidden_widths.iter().map(|&n| 1.0 / n as f64).product();
    let bound = relu_fold_bound(1, hidden_widths)?;
    let ok = (f.fineness() - exact).abs() <= 1e-12 && f.fineness() <= bound + BOUND_TOL;
    checks.push(Check::new(format!("composition [{name}]"), ok, format!("fineness={:e} product={exact:e} bound={bound:e}", f.fineness())));

    let last = *hidden_widths.last().unwrap_or(&2);
    let mut deeper = hidden_widths.to_vec();
    deeper.push(last);
    let g = fold_trace(&deeper)?;
    let ok = (g.fineness() * last as f64 - f.fineness()).abs() <= 1e-12;
    checks.push(Check::new(format!("extra layer [{name}]"), ok, format!("{:e} -> {:e} with p={last}", f.fineness(), g.fineness())));
    Ok(checks)
}

fn random_widths<R: Rng>(rng: &mut R, max_depth: usize) -> Vec<usize> {
    let depth = rng.random_range(1..=max_depth);
    (0..depth).map(|_| rng.random_range(1..=5)).collect()
}

/// Composing any fold-built `f` (positive output weight) after an
/// identifying fold `g` refines `g` with ratio at most `I(f)`, and the
/// composite's fineness is at most `r · I(g)`.
pub fn refinement_suite(pairs: usize, seed: u64) -> Result<Check> {
    let mut worst_r_gap = f64::NEG_INFINITY;
    let mut worst_fineness_gap = f64::NEG_INFINITY;
    for i in 0..pairs {
        let mut rng = draw_rng(seed, i as u64);
        let g_widths = random_widths(&mut rng, 3);
        let f_widths = random_widths(&mut rng, 2);
        let weight = rng.random_range(0.1..3.0);
        let bias = rng.random_range(-1.0..1.0);
        let g = fold_trace(&g_widths)?;
        let f_spec = FoldSpec::new(1, f_widths.clone()).with_output(vec![vec![weight]], vec![bias]);
        let f = trace_exact(&build_fold_network(&f_spec)?, Interval::UNIT)?;
        let fg = f.compose(&g)?;
        let witness = || format!("pair {i} (seed {seed}): g widths {g_widths:?}, f widths {f_widths:?}, weight {weight}, bias {bias}");

        if !check_identification(&g, Interval::UNIT).holds {
            return Ok(Check::new("refinement", false, format!("{}: g does not identify its regions", witness())));
        }
        let rep = check_refinement(&fg, &g);
        if !rep.holds {
            let RefinementWitness::MissingBreakpoint(t) = rep.witness.expect("failure carries a witness");
            return Ok(Check::new("refinement", false, format!("{}: breakpoint {t} of g missing from f∘g", witness())));
        }
        worst_r_gap = worst_r_gap.max(rep.r - f.fineness());
        worst_fineness_gap = worst_fineness_gap.max(fg.fineness() - rep.r * g.fineness());
        if rep.r > f.fineness() + 1e-9 || fg.fineness() > rep.r * g.fineness() + 1e-12 {
            return Ok(Check::new(
                "refinement",
                false,
                format!("{}: r={} I(f)={} I(f∘g)={} I(g)={}", witness(), rep.r, f.fineness(), fg.fineness(), g.fineness()),
            ));
        }
    }
    Ok(Check::new(
        "refinement",
        true,
        format!("{pairs} pairs; max r - I(f) = {worst_r_gap:e}; max I(f∘g) - r I(g) = {worst_fineness_gap:e}"),
    ))
}

/// Random networks alternating over `shapes` and both samplers.
pub fn random_network(shapes: &[NetworkShape], seed: u64, i: usize) -> Result<(Network, Distribution)> {
    let shape = &shapes[i % shapes.len()];
    let dist = if (i / shapes.len()) % 2 == 0 { Distribution::StandardNormal } else { Distribution::Uniform01 };
    Ok((sample_network(shape, &Activation::Relu, dist, seed, i as u64)?, dist))
}

/// The region count is at least the inverse fineness on every network.
pub fn region_count_suite(shapes: &[NetworkShape], count: usize, seed: u64) -> Result<Check> {
    for i in 0..count {
        let (net, dist) = random_network(shapes, seed, i)?;
        let regions = trace_exact(&net, Interval::UNIT)?.regions();
        let c = regions.region_count_check();
        if !c.holds || !regions.is_partition() {
            return Ok(Check::new(
                "region count",
                false,
                format!("network {i} ({:?}, {dist:?}, seed {seed}): {} regions, 1/I = {}", net.hidden_widths(), c.count, c.bound),
            ));
        }
    }
    Ok(Check::new("region count", true, format!("{count} networks")))
}

/// Grid detector against the exact tracer.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OracleStats {
    pub networks: usize,
    /// Networks whose every slope jump reaches the threshold.
    pub detectable: usize,
    pub detectable_disagreements: Vec<String>,
    /// Networks whose every slope jump reaches twice the threshold and whose
    /// breakpoints are at least three grid steps apart.
    pub resolvable: usize,
    pub resolvable_disagreements: Vec<String>,
    pub shallow_disagreements: usize,
}

pub fn grid_oracle_stats(shapes: &[NetworkShape], count: usize, seed: u64, grid_count: usize, threshold: f64) -> Result<OracleStats> {
    let mut stats = OracleStats { networks: count, ..OracleStats::default() };
    let tol = 3.0 / grid_count as f64;
    for i in 0..count {
        let (net, dist) = random_network(shapes, seed, i)?;
        let exact = trace_exact(&net, Interval::UNIT)?;
        let grid = grid_fineness(&net, grid_count, threshold)?;
        let min_jump = exact.slope_jumps().into_iter().fold(f64::INFINITY, f64::min);
        let min_gap = exact.breakpoints().windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let agrees = (grid - exact.fineness()).abs() <= tol;
        let witness = || {
            format!(
                "network {i} ({:?}, {dist:?}, seed {seed}): grid {grid} exact {} min jump {min_jump}",
                net.hidden_widths(),
                exact.fineness()
            )
        };
        if min_jump >= 2.0 * threshold && min_gap >= 3.0 / grid_count as f64 {
            stats.resolvable += 1;
            if !agrees {
                stats.resolvable_disagreements.push(witness());
            }
        }
        if min_jump >= threshold {
            stats.detectable += 1;
            if !agrees {
                log::warn!("{}", witness());
                stats.detectable_disagreements.push(witness());
            }
        } else if !agrees {
            stats.shallow_disagreements += 1;
            log::info!("network {i}: grid {grid} vs exact {} with a slope jump of {min_jump}", exact.fineness());
        }
    }
    Ok(stats)
}

/// Fails only when a resolvable network disagrees: a kink falling inside a
/// grid cell spreads its jump over two secant differences, so jumps below
/// twice the threshold may go unseen.
pub fn grid_oracle_suite(shapes: &[NetworkShape], count: usize, seed: u64, grid_count: usize, threshold: f64) -> Result<Check> {
    let s = grid_oracle_stats(shapes, count, seed, grid_count, threshold)?;
    let detail = if s.resolvable_disagreements.is_empty() {
        format!(
            "{} networks; {} resolvable all agree; {} of {} with jumps >= {threshold} disagree; {} shallow-kink disagreements",
            s.networks,
            s.resolvable,
            s.detectable_disagreements.len(),
            s.detectable,
            s.shallow_disagreements
        )
    } else {
        s.resolvable_disagreements.join("; ")
    };
    Ok(Check::new("grid vs exact", s.resolvable_disagreements.is_empty(), detail))
}

/// The three-piece worked example and its refinement.
pub fn golden_checks() -> Vec<Check> {
    let f = fixtures::three_piece_example();
    let fineness = f.fineness();
    let rep = check_refinement(&fixtures::refined_example(), &f);
    vec![
        Check::new("golden fineness", (fineness - 5.0 / 12.0).abs() <= 1e-12, format!("{fineness} (expected 5/12)")),
        Check::new(
            "golden refinement",
            rep.holds && (rep.r - 5.0 / 9.0).abs() <= 1e-12,
            format!("holds={} r={} (expected 5/9)", rep.holds, rep.r),
        ),
    ]
}

/// Run every suite; writes `verify_bounds.csv` and returns the report
/// without failing on property violations.
pub fn run_verify(cfg: &ExperimentConfig) -> Result<VerifyReport> {
    cfg.validate()?;
    cfg.require_networks()?;
    let act = cfg.verify.activation.resolve()?;
    let mut report = VerifyReport::default();
    let mut shapes = Vec::new();
    for net in &cfg.networks {
        let (check, bound) = bound_check(&net.name, net.input_dim, &net.hidden_widths, &act);
        report.checks.push(check);
        report.bounds.extend(bound);
        if net.input_dim == 1 {
            report.checks.extend(fold_suite(&net.name, &net.hidden_widths)?);
            if net.output_dim == 1 {
                shapes.push(net.shape()?);
            }
        }
    }
    report.checks.push(refinement_suite(cfg.verify.refinement_pairs, cfg.seed)?);
    if !shapes.is_empty() {
        report.checks.push(region_count_suite(&shapes, cfg.verify.random_networks, cfg.seed)?);
        report.checks.push(grid_oracle_suite(&shapes, cfg.verify.random_networks, cfg.seed, cfg.verify.grid_count, cfg.verify.threshold)?);
    }
    report.checks.extend(golden_checks());

    let mut csv = format!("{}\n", BoundReport::CSV_HEADER);
    for b in &report.bounds {
        csv.push_str(&b.csv_row());
        csv.push('\n');
    }
    write_file(&cfg.out_dir.join("verify_bounds.csv"), &csv)?;
    Ok(report)
}

/// [`run_verify`], failing with every witness if any check fails.
pub fn cmd_verify(cfg: &ExperimentConfig) -> Result<VerifyReport> {
    run_verify(cfg)?.into_result()
}
