//! Convergence-rate study: time-averaged `||grad P||` against the horizon.

use std::path::Path;

use crate::config::{ExperimentConfig, ScheduleKind};
use crate::error::{HarnessError, Result};
use crate::experiment::{execute_run, mean_std, prepare, run_parallel, TraceMode};
use crate::trace::{csv_bytes, write_atomic};

/// Relative slack allowed when checking that a longer horizon does not
/// raise the averaged metric.
pub const MONOTONE_SLACK: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct RatePoint {
    pub optimizer: &'static str,
    pub horizon: usize,
    /// Mean over seeds of the time-averaged `||grad P(x_i)||`.
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub optimizer: &'static str,
    /// Least-squares slope of `log10 mean` against `log10 T`.
    pub slope: f64,
    pub intercept: f64,
    /// Every longer horizon stays within `1 + MONOTONE_SLACK` of the shorter.
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub points: Vec<RatePoint>,
    pub fits: Vec<RateFit>,
}

impl RateReport {
    pub fn fit(&self, optimizer: &str) -> Option<&RateFit> {
        self.fits.iter().find(|f| f.optimizer == optimizer)
    }
}

/// Least-squares line through `(x, y)`; returns `(slope, intercept)`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Runs every seed at each horizon with a theorem schedule rebuilt for that
/// horizon, writes `rate.csv` and `rate_fit.csv` to `out_dir`, and fits the
/// log-log slope per optimizer.
pub fn rate_study(
    config: &ExperimentConfig,
    horizons: &[usize],
    out_dir: &Path,
) -> Result<RateReport> {
    if config.schedule.kind == ScheduleKind::Explicit {
        return Err(HarnessError::Unsupported(
            "rate study needs a theorem1 or theorem2 schedule".into(),
        ));
    }
    if !config.problem.is_synthetic() {
        return Err(HarnessError::Unsupported(
            "rate study needs a problem with a closed-form inner maximum".into(),
        ));
    }
    if horizons.len() < 3 || horizons.windows(2).any(|w| w[1] <= w[0]) || horizons[0] == 0 {
        return Err(HarnessError::Unsupported(format!(
            "rate study needs at least three increasing horizons, got {horizons:?}"
        )));
    }
    let mut points = Vec::new();
    for &horizon in horizons {
        let mut cfg = config.clone();
        cfg.run.horizon = horizon;
        let prepared = prepare(&cfg)?;
        let jobs: Vec<_> = prepared
            .schedules
            .iter()
            .flat_map(|(kind, s)| cfg.run.seeds.iter().map(move |&seed| (*kind, s, seed)))
            .collect();
        let avgs = run_parallel(cfg.run.threads, &jobs, |&(kind, schedule, seed)| {
            let out = execute_run(
                &cfg,
                &prepared.problem,
                kind,
                schedule,
                seed,
                TraceMode::FinalOnly,
            )?;
            Ok(out.summary.avg_grad_p_norm.unwrap_or(f64::NAN))
        })?;
        let seeds = cfg.run.seeds.len();
        for (k, (kind, _)) in prepared.schedules.iter().enumerate() {
            let (mean, std) = mean_std(&avgs[k * seeds..(k + 1) * seeds]);
            log::info!("{} T={horizon}: mean avg ||grad P|| = {mean}", kind.name());
            points.push(RatePoint {
                optimizer: kind.name(),
                horizon,
                mean,
                std,
            });
        }
    }
    let fits = config
        .optimizers
        .iter()
        .map(|kind| {
            let mine: Vec<&RatePoint> = points
                .iter()
                .filter(|p| p.optimizer == kind.name())
                .collect();
            let xs: Vec<f64> = mine.iter().map(|p| (p.horizon as f64).log10()).collect();
            let ys: Vec<f64> = mine.iter().map(|p| p.mean.log10()).collect();
            let (slope, intercept) = fit_line(&xs, &ys);
            let monotone = mine
                .windows(2)
                .all(|w| w[1].mean <= w[0].mean * (1.0 + MONOTONE_SLACK));
            RateFit {
                optimizer: kind.name(),
                slope,
                intercept,
                monotone,
            }
        })
        .collect::<Vec<_>>();

    let seeds = config.run.seeds.len().to_string();
    let rows = points.iter().map(|p| {
        vec![
            p.optimizer.to_string(),
            p.horizon.to_string(),
            seeds.clone(),
            p.mean.to_string(),
            p.std.to_string(),
        ]
    });
    write_atomic(
        &out_dir.join("rate.csv"),
        &csv_bytes(
            &[
                "optimizer",
                "T",
                "seeds",
                "avg_grad_p_norm_mean",
                "avg_grad_p_norm_std",
            ],
            rows,
        ),
    )?;
    let rows = fits.iter().map(|f| {
        vec![
            f.optimizer.to_string(),
            f.slope.to_string(),
            f.intercept.to_string(),
            f.monotone.to_string(),
        ]
    });
    write_atomic(
        &out_dir.join("rate_fit.csv"),
        &csv_bytes(&["optimizer", "slope", "intercept", "monotone"], rows),
    )?;
    Ok(RateReport { points, fits })
}
