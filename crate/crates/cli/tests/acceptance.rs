//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero when any
//! criterion fails.

use std::path::Path;
use std::time::Instant;

use pwl_expressivity::convert::relu_to_pwl_detailed;
use pwl_expressivity::ratio::dominance;
use pwl_expressivity::sampling::sample_network;
use pwl_expressivity::{
    build_fold_network, check_refinement, estimate_ratio_curve, fixtures, min_fineness_search, pwl_fold_bound, trace_exact,
    verify_depth_bound, Activation, Distribution, EpsilonGrid, FinenessSearchConfig, FoldSpec, Interval, NetworkShape, RatioConfig,
    TargetFunction, Workers,
};
use pwl_expressivity_cli::config::ExperimentConfig;
use pwl_expressivity_cli::verify::{grid_oracle_stats, refinement_suite, region_count_suite};
use pwl_expressivity_cli::{cmd_fineness, cmd_ratio, run_verify};

const SEED: u64 = 20_190_417;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn reference_shapes() -> Vec<NetworkShape> {
    vec![NetworkShape::new(1, vec![4, 4, 4, 4, 4, 1]).unwrap(), NetworkShape::new(1, vec![20, 1]).unwrap()]
}

fn bound_values() -> Outcome {
    let a = pwl_fold_bound(1, &[4, 4, 4, 4, 4]).unwrap();
    let b = pwl_fold_bound(1, &[20]).unwrap();
    outcome(a == 0.03125 && b == 0.1, format!("network1 {a}, network2 {b}"))
}

fn constructive_attainment() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for widths in [vec![4, 4, 4, 4, 4], vec![20]] {
        let rep = verify_depth_bound(1, &widths, &Activation::hard_tanh()).unwrap();
        ok &= rep.attains && rep.achieved_fineness <= rep.bound + 1e-12;
        parts.push(format!("{widths:?}: {:e} <= {:e}", rep.achieved_fineness, rep.bound));
    }
    let relu = trace_exact(&build_fold_network(&FoldSpec::new(1, vec![4; 5])).unwrap(), Interval::UNIT).unwrap().fineness();
    ok &= (relu - 4f64.powi(-5)).abs() <= 1e-9;
    parts.push(format!("relu fold {relu:e} vs 4^-5"));
    outcome(ok, parts.join("; "))
}

fn golden_examples() -> Outcome {
    let f = fixtures::three_piece_example();
    let rep = check_refinement(&fixtures::refined_example(), &f);
    let ok = (f.fineness() - 5.0 / 12.0).abs() <= 1e-12 && rep.holds && (rep.r - 5.0 / 9.0).abs() <= 1e-12;
    outcome(ok, format!("fineness {}, r {}", f.fineness(), rep.r))
}

fn region_count_bound() -> Outcome {
    let c = region_count_suite(&reference_shapes(), 1000, SEED).unwrap();
    outcome(c.passed, c.detail)
}

fn oracle_equivalence() -> Outcome {
    let s = grid_oracle_stats(&reference_shapes(), 100, SEED, 100_000, 0.5).unwrap();
    let detail = format!(
        "{} of {} networks with all jumps >= 0.5 disagree beyond 3e-5 ({}); {} networks with jumps >= 1.0 all agree: {}",
        s.detectable_disagreements.len(),
        s.detectable,
        s.detectable_disagreements.join("; "),
        s.resolvable,
        s.resolvable_disagreements.is_empty()
    );
    outcome(s.detectable_disagreements.is_empty(), detail)
}

fn min_fineness_reproduction() -> Outcome {
    let cfg = FinenessSearchConfig::with_seed(SEED);
    assert_eq!((cfg.draws, cfg.grid_count, cfg.distribution), (1000, 100_000, Distribution::Uniform01));
    let shapes = reference_shapes();
    let n1 = min_fineness_search(&shapes[0], &Activation::Relu, &cfg, Workers::ALL).unwrap();
    let n2 = min_fineness_search(&shapes[1], &Activation::Relu, &cfg, Workers::ALL).unwrap();
    let (a, b) = (n1.min_fineness, n2.min_fineness);
    outcome(
        a < 0.01 && b > 0.02 && a < b,
        format!("network1 min {a} (< 0.01: {}), network2 min {b} (> 0.02: {}), ordered: {}", a < 0.01, b > 0.02, a < b),
    )
}

fn dominance_of(draws: usize, grid: usize, eps_count: Option<usize>, target: TargetFunction) -> f64 {
    let shapes = reference_shapes();
    let mut cfg = RatioConfig { grid_count: grid, theta_draws: draws, ..RatioConfig::default_for(&target, SEED) };
    if let Some(n) = eps_count {
        cfg.epsilon = EpsilonGrid::default_for(&target).resampled(n);
    }
    let c1 = estimate_ratio_curve(&shapes[0], &Activation::Relu, &target, &cfg, Workers::ALL).unwrap();
    let c2 = estimate_ratio_curve(&shapes[1], &Activation::Relu, &target, &cfg, Workers::ALL).unwrap();
    dominance(&c1, &c2).unwrap()
}

fn ratio_dominance() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for target in [TargetFunction::Sin4Pi, TargetFunction::DEFAULT_WEIERSTRASS] {
        let full = dominance_of(20_000, 10_000, None, target);
        let ci = dominance_of(2_000, 1_000, Some(100), target);
        ok &= full >= 0.95 && ci >= 0.90;
        parts.push(format!("{} full {full} (>= 0.95: {}), ci {ci} (>= 0.90: {})", target.name(), full >= 0.95, ci >= 0.90));
    }
    outcome(ok, parts.join("; "))
}

fn conversion() -> Outcome {
    let xs: Vec<f64> = (0..10_000).map(|i| i as f64 / 10_000.0).collect();
    let mut worst: f64 = 0.0;
    let mut doubled = true;
    for shape in reference_shapes() {
        for index in 0..10 {
            let net = sample_network(&shape, &Activation::Relu, Distribution::StandardNormal, SEED, index).unwrap();
            let conv = relu_to_pwl_detailed(&net, &Activation::hard_tanh(), &[(0.0, 1.0)]).unwrap();
            doubled &= conv.network.hidden_widths() == shape.hidden_widths().iter().map(|w| 2 * w).collect::<Vec<_>>();
            let a = net.eval_scalar(&xs).unwrap();
            let b = conv.network.eval_scalar(&xs).unwrap();
            worst = a.iter().zip(&b).map(|(u, v)| (u - v).abs()).fold(worst, f64::max);
        }
    }
    outcome(worst < 1e-6 && doubled, format!("max deviation {worst:e}, widths doubled: {doubled}"))
}

fn refinement_suites() -> Outcome {
    let c = refinement_suite(200, SEED).unwrap();
    outcome(c.passed, c.detail)
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let mut outputs = Vec::new();
    for workers in [1, 2, 0] {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig { seed: SEED, workers, out_dir: dir.path().to_path_buf(), ..ExperimentConfig::default() };
        cfg.fineness.draws = 40;
        cfg.fineness.grid_count = 10_000;
        cfg.ratio.theta_draws = 300;
        cfg.ratio.grid_count = 1_000;
        cfg.ratio.epsilon_count = Some(100);
        cfg.verify.random_networks = 20;
        cfg.verify.refinement_pairs = 20;
        cmd_fineness(&cfg).unwrap();
        cmd_ratio(&cfg).unwrap();
        run_verify(&cfg).unwrap();
        outputs.push(read_dir_sorted(dir.path()));
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    outcome(same, format!("{} files compared across 1, 2 and all workers", outputs[0].len()))
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria: [Criterion; 10] = [
        ("1 fold bound values", bound_values),
        ("2 constructive attainment", constructive_attainment),
        ("3 golden examples", golden_examples),
        ("4 region count lower bound", region_count_bound),
        ("5 grid detector vs exact tracer", oracle_equivalence),
        ("6 min-fineness reproduction", min_fineness_reproduction),
        ("7 ratio-curve dominance", ratio_dominance),
        ("8 activation conversion", conversion),
        ("9 refinement and composition", refinement_suites),
        ("10 determinism across workers", determinism),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let o = run();
        if !o.passed {
            failures += 1;
        }
        println!("{} criterion {name} [{:.1?}]: {}", if o.passed { "PASS" } else { "FAIL" }, start.elapsed(), o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
