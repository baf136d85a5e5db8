//! Grid search over explicit schedule values.

use std::cmp::Ordering;
use std::path::Path;

use minimax_core::optimizers::OptimizerKind;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::experiment::{
    build_problem, build_schedule, execute_run, grid_points, mean_std, prepare_constants,
    run_parallel, run_prepared, ExperimentReport, Prepared, SchedulePoint, TraceMode,
};
use crate::trace::{csv_bytes, write_atomic};

#[derive(Debug, Clone, PartialEq)]
pub struct GridEntry {
    pub optimizer: &'static str,
    /// 1 is best.
    pub rank: usize,
    pub point: Option<SchedulePoint>,
    pub mean_final_p_x: f64,
    pub std_final_p_x: f64,
}

#[derive(Debug, Clone)]
pub struct GridReport {
    /// Ranked entries, grouped by optimizer in configuration order.
    pub leaderboard: Vec<GridEntry>,
    /// Full rerun of each optimizer's best point.
    pub best: ExperimentReport,
}

impl GridReport {
    pub fn best_entry(&self, optimizer: &str) -> Option<&GridEntry> {
        self.leaderboard
            .iter()
            .find(|e| e.optimizer == optimizer && e.rank == 1)
    }
}

pub const LEADERBOARD_COLUMNS: [&str; 11] = [
    "optimizer",
    "rank",
    "mu_x",
    "mu_y",
    "beta_x",
    "beta_y",
    "clip_threshold",
    "clip_norm",
    "mean_final_p_x",
    "std_final_p_x",
    "seeds",
];

/// NaN and infinite results rank after every finite one.
fn score_order(a: f64, b: f64) -> Ordering {
    let key = |v: f64| if v.is_finite() { v } else { f64::INFINITY };
    key(a).total_cmp(&key(b))
}

/// Runs the cross product of each optimizer's schedule values over all seeds,
/// ranks points by mean final `P(x)` (ties keep grid order), writes
/// `leaderboard.csv` and reruns each optimizer's best point with full traces
/// into `out_dir`.
pub fn grid_search(config: &ExperimentConfig, out_dir: &Path) -> Result<GridReport> {
    let problem = build_problem(&config.problem)?;
    let constants = prepare_constants(config, &problem)?;
    let mut jobs: Vec<(OptimizerKind, usize, Option<SchedulePoint>, u64)> = Vec::new();
    let mut points_of = Vec::new();
    for &kind in &config.optimizers {
        let points = grid_points(config, kind);
        for (k, &point) in points.iter().enumerate() {
            for &seed in &config.run.seeds {
                jobs.push((kind, k, point, seed));
            }
        }
        points_of.push((kind, points));
    }
    log::info!("grid search: {} runs", jobs.len());
    let finals = run_parallel(config.run.threads, &jobs, |&(kind, _, point, seed)| {
        let schedule = build_schedule(config, point, constants, config.run.horizon)?;
        Ok(execute_run(
            config,
            &problem,
            kind,
            &schedule,
            seed,
            TraceMode::FinalOnly,
        )?
        .summary
        .final_p_x)
    })?;

    let mut leaderboard = Vec::new();
    let mut best = Vec::new();
    let mut cursor = 0;
    let seeds = config.run.seeds.len();
    for (kind, points) in &points_of {
        let mut entries: Vec<GridEntry> = points
            .iter()
            .map(|&point| {
                let (mean, std) = mean_std(&finals[cursor..cursor + seeds]);
                cursor += seeds;
                GridEntry {
                    optimizer: kind.name(),
                    rank: 0,
                    point,
                    mean_final_p_x: mean,
                    std_final_p_x: std,
                }
            })
            .collect();
        entries.sort_by(|a, b| score_order(a.mean_final_p_x, b.mean_final_p_x));
        for (r, e) in entries.iter_mut().enumerate() {
            e.rank = r + 1;
        }
        best.push((
            *kind,
            build_schedule(config, entries[0].point, constants, config.run.horizon)?,
        ));
        leaderboard.extend(entries);
    }
    write_atomic(
        &out_dir.join("leaderboard.csv"),
        &leaderboard_bytes(&leaderboard, seeds),
    )?;
    let prepared = Prepared {
        problem,
        constants,
        schedules: best,
    };
    let best = run_prepared(config, &prepared, out_dir)?;
    Ok(GridReport { leaderboard, best })
}

fn leaderboard_bytes(entries: &[GridEntry], seeds: usize) -> Vec<u8> {
    let rows = entries.iter().map(|e| {
        let p = e.point;
        let field = |f: &dyn Fn(&SchedulePoint) -> Option<f64>| {
            p.as_ref()
                .and_then(f)
                .map(|v| v.to_string())
                .unwrap_or_default()
        };
        vec![
            e.optimizer.to_string(),
            e.rank.to_string(),
            field(&|p| Some(p.mu_x)),
            field(&|p| Some(p.mu_y)),
            field(&|p| Some(p.beta_x)),
            field(&|p| Some(p.beta_y)),
            field(&|p| p.clip.map(|c| c.0)),
            field(&|p| p.clip.map(|c| c.1)),
            e.mean_final_p_x.to_string(),
            e.std_final_p_x.to_string(),
            seeds.to_string(),
        ]
    });
    csv_bytes(&LEADERBOARD_COLUMNS, rows)
}
