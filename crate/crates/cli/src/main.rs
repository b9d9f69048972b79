use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pwl_expressivity_cli::commands::write_file;
use pwl_expressivity_cli::{cmd_construct, cmd_fineness, cmd_ratio, cmd_trace, run_verify, ExperimentConfig, Result};

#[derive(Parser)]
#[command(name = "pwlx", version, about = "Expressivity experiments for piecewise-linear networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML experiment configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Parameter draws for `fineness` and `ratio`.
    #[arg(long)]
    draws: Option<usize>,
    /// Sample-grid size for `fineness` and `ratio`.
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Random search for the smallest linear-region fineness.
    Fineness(Common),
    /// Ratio-of-desired-parameters curves and their dominance report.
    Ratio(Common),
    /// Depth bound, identification, refinement and oracle suites.
    Verify(Common),
    /// Emit a fold network as JSON.
    Construct {
        /// Hidden widths, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        widths: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        input_dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the piece table of a serialized 1 -> 1 network on [0, 1].
    Trace {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(w) = common.workers {
        cfg.workers = w;
    }
    if let Some(o) = &common.out {
        cfg.out_dir = o.clone();
    }
    if let Some(d) = common.draws {
        cfg.fineness.draws = d;
        cfg.ratio.theta_draws = d;
    }
    if let Some(g) = common.grid {
        cfg.fineness.grid_count = g;
        cfg.ratio.grid_count = g;
    }
    Ok(cfg)
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fineness(c) => {
            let outcome = cmd_fineness(&load(&c)?)?;
            for s in &outcome.summaries {
                println!("{}: min fineness {} (draw {})", s.network, s.report.min_fineness, s.report.argmin);
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
        }
        Command::Ratio(c) => {
            let outcome = cmd_ratio(&load(&c)?)?;
            for r in &outcome.dominance {
                println!("{}: {} >= {} at {:.4} of epsilon values", r.target, r.network_a, r.network_b, r.fraction);
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
        }
        Command::Verify(c) => {
            let report = run_verify(&load(&c)?)?;
            print!("{}", report.render());
            report.into_result()?;
        }
        Command::Construct { widths, input_dim, out } => emit(out.as_ref(), &cmd_construct(input_dim, &widths)?)?,
        Command::Trace { network, out } => emit(out.as_ref(), &cmd_trace(&network)?)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
