use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use minimax_cli::config::parse_count;
use minimax_cli::{emit_plot, grid_search, load_config, rate_study, run_experiment, PlotSpec};

#[derive(Parser)]
#[command(
    name = "minimax",
    version,
    about = "Stochastic minimax optimization experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ConfigArgs {
    /// Experiment configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Override a setting, e.g. `--set run.T=500`.
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_override)]
    overrides: Vec<(String, String)>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every optimizer and seed, writing traces and summaries.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        /// Run only this seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: run.output_dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid search over schedule value lists, then rerun the best points.
    Grid {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plot a trace column from a run directory as SVG.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "p_x")]
        metric: String,
        #[arg(long)]
        title: Option<String>,
    },
    /// Fit the log-log slope of the averaged gradient norm over horizons.
    Rate {
        #[command(flatten)]
        config: ConfigArgs,
        /// Comma-separated horizons, e.g. `1e3,1e4,1e5`.
        #[arg(long = "T", value_delimiter = ',', value_parser = parse_horizons)]
        horizons: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a configuration and report every problem.
    Validate {
        #[command(flatten)]
        config: ConfigArgs,
    },
}

fn parse_override(s: &str) -> Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected KEY=VALUE, found `{s}`"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn parse_horizons(s: &str) -> Result<usize, String> {
    parse_count(s.trim())
        .and_then(|v| usize::try_from(v).ok())
        .ok_or_else(|| format!("`{s}` is not a horizon"))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run { config, seed, out } => {
            let mut overrides = config.overrides;
            if let Some(seed) = seed {
                overrides.push(("run.seeds".into(), seed.to_string()));
            }
            let cfg = load_config(&config.config, &overrides)?;
            let out = out.unwrap_or_else(|| cfg.run.output_dir.clone());
            let report = run_experiment(&cfg, &out)?;
            for r in &report.runs {
                println!(
                    "{} seed {}: final P(x) = {}",
                    r.optimizer, r.seed, r.final_p_x
                );
            }
            println!("wrote {}", out.display());
        }
        Command::Grid { config, out } => {
            let cfg = load_config(&config.config, &config.overrides)?;
            let out = out.unwrap_or_else(|| cfg.run.output_dir.clone());
            let report = grid_search(&cfg, &out)?;
            for kind in &cfg.optimizers {
                let best = report
                    .best_entry(kind.name())
                    .ok_or_else(|| anyhow!("no grid entry for {}", kind.name()))?;
                println!(
                    "{}: best mean final P(x) = {} at {:?}",
                    best.optimizer, best.mean_final_p_x, best.point
                );
            }
            println!("wrote {}", out.display());
        }
        Command::Plot {
            input,
            out,
            metric,
            title,
        } => {
            let spec = PlotSpec {
                metric,
                title,
                ..PlotSpec::default()
            };
            let series = emit_plot(&input, &out, &spec)?;
            println!("plotted {} series to {}", series.len(), out.display());
        }
        Command::Rate {
            config,
            horizons,
            out,
        } => {
            let cfg = load_config(&config.config, &config.overrides)?;
            let out = out.unwrap_or_else(|| cfg.run.output_dir.clone());
            let horizons = if horizons.is_empty() {
                vec![1_000, 10_000, 100_000]
            } else {
                horizons
            };
            let report = rate_study(&cfg, &horizons, &out)?;
            for p in &report.points {
                println!("{} T={}: {} +- {}", p.optimizer, p.horizon, p.mean, p.std);
            }
            for f in &report.fits {
                println!(
                    "{}: slope {} (monotone: {})",
                    f.optimizer, f.slope, f.monotone
                );
            }
        }
        Command::Validate { config } => {
            let cfg = load_config(&config.config, &config.overrides)
                .with_context(|| format!("validating {}", config.config.display()))?;
            println!(
                "{}: ok ({} optimizer(s), {} seed(s), T = {})",
                config.config.display(),
                cfg.optimizers.len(),
                cfg.run.seeds.len(),
                cfg.run.horizon
            );
        }
    }
    Ok(())
}
