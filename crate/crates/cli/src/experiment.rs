//! Building problems and schedules from a configuration, running seeds and
//! writing trace, summary and curve files.

use std::path::{Path, PathBuf};
use std::time::Instant;

use minimax_core::estimate::{max_sample_gradient_norm, power_iteration_lipschitz};
use minimax_core::libsvm::{load_dataset, LoadError, LoadOptions};
use minimax_core::optimizers::{run_with, Optimizer, OptimizerKind};
use minimax_core::oracle::{evaluate_p, metric_ci, MinimaxProblem};
use minimax_core::problems::{
    synthetic_dataset, PlToyProblem, QuadraticMinimaxProblem, RobustLogisticParams,
    RobustLogisticProblem,
};
use minimax_core::schedule::{schedule_hcmm1, schedule_hcmm2, HyperSchedule, ProblemConstants};
use minimax_core::vector::{self, norm2, Vec64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::config::{DataSource, Estimate, ExperimentConfig, ProblemConfig, ScheduleKind};
use crate::error::{HarnessError, Result};
use crate::trace::{csv_bytes, trace_file_name, write_atomic, write_trace, TraceRecord};

pub const DATA_DIR_ENV: &str = "MINIMAX_DATA_DIR";

/// Offset between a run seed and the seed of its random starting direction.
const X0_SEED_OFFSET: u64 = 1000;
const GRADIENT_BOUND_DRAWS: usize = 1000;
const POWER_ITERATIONS: usize = 200;

pub enum BuiltProblem {
    Logistic(RobustLogisticProblem),
    Quadratic(QuadraticMinimaxProblem),
    PlToy(PlToyProblem),
}

impl BuiltProblem {
    pub fn as_dyn(&self) -> &dyn MinimaxProblem {
        match self {
            BuiltProblem::Logistic(p) => p,
            BuiltProblem::Quadratic(p) => p,
            BuiltProblem::PlToy(p) => p,
        }
    }

    /// Starting point of a run: `x0 = 0` and the problem's default `y` for
    /// logistic regression; a seeded direction of norm `x0_radius` and
    /// `y0 = 0` for the synthetic problems.
    pub fn initial_point(&self, config: &ProblemConfig, seed: u64) -> (Vec64, Vec64) {
        let p = self.as_dyn();
        let radius = match config {
            ProblemConfig::Quadratic { x0_radius, .. } | ProblemConfig::PlToy { x0_radius, .. } => {
                *x0_radius
            }
            ProblemConfig::RobustLogistic(_) => 0.0,
        };
        let mut x0 = vec![0.0; p.dim_x()];
        if radius > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(X0_SEED_OFFSET));
            let dir: Vec64 = (0..p.dim_x()).map(|_| rng.sample(StandardNormal)).collect();
            let len = norm2(&dir);
            if len > 0.0 {
                x0 = vector::scale(radius / len, &dir);
            }
        }
        (x0, p.default_y())
    }
}

/// Looks `path` up as given, then under `data_dir`.
pub fn resolve_dataset_path_with(path: &Path, data_dir: Option<&Path>) -> Result<PathBuf> {
    let mut tried = vec![path.to_path_buf()];
    if path.is_file() {
        return Ok(path.to_path_buf());
    }
    if let Some(dir) = data_dir.filter(|_| path.is_relative()) {
        let candidate = dir.join(path);
        if candidate.is_file() {
            return Ok(candidate);
        }
        tried.push(candidate);
    }
    Err(HarnessError::DatasetNotFound {
        path: path.to_path_buf(),
        tried,
    })
}

/// [`resolve_dataset_path_with`] using `$MINIMAX_DATA_DIR`.
pub fn resolve_dataset_path(path: &Path) -> Result<PathBuf> {
    let dir = std::env::var_os(DATA_DIR_ENV).map(PathBuf::from);
    resolve_dataset_path_with(path, dir.as_deref())
}

pub fn build_problem(config: &ProblemConfig) -> Result<BuiltProblem> {
    match config {
        ProblemConfig::Quadratic { spec, .. } => Ok(BuiltProblem::Quadratic(
            QuadraticMinimaxProblem::random(spec)?,
        )),
        ProblemConfig::PlToy { spec, .. } => Ok(BuiltProblem::PlToy(PlToyProblem::random(spec)?)),
        ProblemConfig::RobustLogistic(c) => {
            let (full, path) = match &c.source {
                DataSource::File(path) => {
                    let path = resolve_dataset_path(path)?;
                    let options = LoadOptions {
                        binarize_labels: true,
                        subsample: None,
                        ..LoadOptions::default()
                    };
                    (load_dataset(&path, &options)?, path)
                }
                DataSource::Synthetic {
                    n,
                    d,
                    density,
                    seed,
                } => (
                    synthetic_dataset(*n, *d, *density, *seed),
                    PathBuf::from("synthetic"),
                ),
            };
            if c.expect_n.is_some_and(|n| n != full.n())
                || c.expect_d.is_some_and(|d| d != full.d())
            {
                return Err(HarnessError::DatasetShape {
                    path,
                    expected_n: c.expect_n.unwrap_or(full.n()),
                    expected_d: c.expect_d.unwrap_or(full.d()),
                    n: full.n(),
                    d: full.d(),
                });
            }
            let data = match c.subsample {
                None => full,
                Some(k) => {
                    let available = full.n();
                    full.subsample(k, c.data_seed, c.stratify).ok_or(
                        LoadError::SubsampleTooLarge {
                            path,
                            requested: k,
                            available,
                        },
                    )?
                }
            };
            let params = RobustLogisticParams {
                lambda1: c.lambda1,
                lambda2: c.lambda2,
                rho: c.rho,
            };
            Ok(BuiltProblem::Logistic(RobustLogisticProblem::new(
                data, params,
            )?))
        }
    }
}

/// Fills `auto` constants at the starting point `(x0, y0)`.
///
/// `L_f` is the problem's own bound when it has one and a power-iteration
/// estimate otherwise; `G` is the largest of 1000 sampled gradient norms;
/// `sigma` is the root-mean-square sampled gradient deviation.
pub fn resolve_constants(
    config: &ExperimentConfig,
    problem: &BuiltProblem,
    x0: &[f64],
    y0: &[f64],
) -> Result<ProblemConstants> {
    let p = problem.as_dyn();
    let c = &config.constants;
    let pick = |e: Estimate, auto: &dyn Fn() -> Result<f64>| -> Result<f64> {
        match e {
            Estimate::Value(v) => Ok(v),
            Estimate::Auto => auto(),
        }
    };
    let oracle = HarnessError::Estimate;
    let l_f = pick(c.l_f, &|| {
        Ok(p.gradient_lipschitz()
            .unwrap_or_else(|| power_iteration_lipschitz(p, x0, y0, POWER_ITERATIONS, 0)))
    })?;
    let nu = pick(c.nu, &|| {
        Ok(match problem {
            BuiltProblem::Quadratic(q) => q.nu(),
            BuiltProblem::Logistic(l) => l.y_curvature(),
            BuiltProblem::PlToy(_) => 0.0,
        })
    })?;
    let delta = pick(c.delta, &|| {
        Ok(match problem {
            BuiltProblem::Quadratic(q) => q.nu(),
            BuiltProblem::PlToy(t) => t.delta(),
            BuiltProblem::Logistic(_) => 0.0,
        })
    })?;
    let sigma = pick(c.sigma, &|| gradient_deviation(p, x0, y0).map_err(oracle))?;
    let sigma_h = pick(c.sigma_h, &|| Ok(noise_sigma_h(config).unwrap_or(0.0)))?;
    let l_h = pick(c.l_h, &|| Ok(0.0))?;
    let g = pick(c.g, &|| {
        max_sample_gradient_norm(p, x0, y0, GRADIENT_BOUND_DRAWS, 0).map_err(oracle)
    })?;
    Ok(ProblemConstants {
        l_f,
        l_h,
        nu,
        delta,
        sigma,
        sigma_h,
        g,
    })
}

fn noise_sigma_h(config: &ExperimentConfig) -> Option<f64> {
    match &config.problem {
        ProblemConfig::Quadratic { spec, .. } => Some(spec.noise_sigma_h),
        _ => None,
    }
}

fn gradient_deviation(
    p: &dyn MinimaxProblem,
    x: &[f64],
    y: &[f64],
) -> std::result::Result<f64, minimax_core::oracle::OracleError> {
    let full = p.full_gradient(x, y);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut total = 0.0;
    for _ in 0..GRADIENT_BOUND_DRAWS {
        let g = p.sample_gradient(x, y, p.draw_sample(&mut rng))?;
        total += vector::dist2(&g.gx, &full.gx).powi(2) + vector::dist2(&g.gy, &full.gy).powi(2);
    }
    Ok((total / GRADIENT_BOUND_DRAWS as f64).sqrt())
}

/// One point of an explicit schedule; clipping entries are `None` when the
/// optimizer does not clip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchedulePoint {
    pub mu_x: f64,
    pub mu_y: f64,
    pub beta_x: f64,
    pub beta_y: f64,
    pub clip: Option<(f64, f64)>,
}

/// Every explicit schedule point an optimizer distinguishes: step sizes for
/// all, smoothing factors for the momentum methods, and `(N, N1)` for HCMM-1.
/// Theorem schedules yield a single `None` point.
pub fn grid_points(config: &ExperimentConfig, kind: OptimizerKind) -> Vec<Option<SchedulePoint>> {
    let s = &config.schedule;
    if s.kind != ScheduleKind::Explicit {
        return vec![None];
    }
    let first = |v: &[f64]| vec![v.first().copied().unwrap_or(1.0)];
    let (beta_x, beta_y) = if kind == OptimizerKind::Sagda {
        (first(&s.beta_x), first(&s.beta_y))
    } else {
        (s.beta_x.clone(), s.beta_y.clone())
    };
    let clips: Vec<Option<(f64, f64)>> = if kind.uses_clipping() {
        s.clip_threshold
            .iter()
            .flat_map(|&n| s.clip_norm.iter().map(move |&n1| Some((n, n1))))
            .collect()
    } else {
        vec![None]
    };
    let mut points = Vec::new();
    for &mu_x in &s.mu_x {
        for &mu_y in &s.mu_y {
            for &beta_x in &beta_x {
                for &beta_y in &beta_y {
                    for &clip in &clips {
                        points.push(Some(SchedulePoint {
                            mu_x,
                            mu_y,
                            beta_x,
                            beta_y,
                            clip,
                        }));
                    }
                }
            }
        }
    }
    points
}

/// Builds the schedule an optimizer runs with at one grid point.
pub fn build_schedule(
    config: &ExperimentConfig,
    point: Option<SchedulePoint>,
    constants: ProblemConstants,
    horizon: usize,
) -> Result<HyperSchedule> {
    let s = &config.schedule;
    let schedule = match (s.kind, point) {
        (ScheduleKind::Explicit, Some(p)) => {
            let base = HyperSchedule::explicit(p.mu_x, p.mu_y, p.beta_x, p.beta_y, horizon)?;
            let base = match p.clip {
                Some((n, n1)) => base.with_clipping(n, n1)?,
                None => base,
            };
            base.with_constants(constants)?
        }
        (ScheduleKind::Explicit, None) => {
            return Err(HarnessError::Unsupported(
                "explicit schedule without a grid point".into(),
            ))
        }
        (ScheduleKind::Theorem1, _) => {
            let norm = s.clip_norm[0];
            let threshold = s.clip_threshold.first().copied().unwrap_or(norm);
            let base = schedule_hcmm1(horizon, constants, norm)?;
            if threshold == norm {
                base
            } else {
                base.with_clipping(threshold, norm)?
            }
        }
        (ScheduleKind::Theorem2, _) => schedule_hcmm2(horizon, constants)?,
    };
    Ok(schedule)
}

/// What to record while running.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMode {
    /// A trace row per step.
    Full,
    /// Only the final values, for grid search.
    FinalOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub optimizer: &'static str,
    pub seed: u64,
    /// `P(x_T)` at the final iterate.
    pub final_p_x: f64,
    pub final_grad_p_norm: Option<f64>,
    /// Mean of `||grad P(x_i)||` over `i = 0..T-1`.
    pub avg_grad_p_norm: Option<f64>,
    /// Inner maximizations that hit the iteration cap.
    pub inner_unconverged: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub summary: RunSummary,
    /// Empty in [`TraceMode::FinalOnly`].
    pub records: Vec<TraceRecord>,
}

fn inner_tol(config: &ExperimentConfig) -> f64 {
    config
        .run
        .inner_tol
        .unwrap_or(if config.problem.is_synthetic() {
            1e-8
        } else {
            1e-6
        })
}

/// Runs one optimizer for one seed.
pub fn execute_run(
    config: &ExperimentConfig,
    problem: &BuiltProblem,
    kind: OptimizerKind,
    schedule: &HyperSchedule,
    seed: u64,
    mode: TraceMode,
) -> Result<RunOutput> {
    let p = problem.as_dyn();
    let cf = p.closed_form();
    let tol = inner_tol(config);
    let max_iters = config.run.inner_max_iters;
    let every = config.run.eval_every;
    let full = mode == TraceMode::Full;
    let mut unconverged = 0;
    let mut eval = |x: &[f64]| {
        let report = evaluate_p(p, x, tol, max_iters);
        if !report.converged {
            unconverged += 1;
        }
        report.p_value
    };
    let (x0, y0) = problem.initial_point(&config.problem, seed);
    let optimizer = Optimizer {
        kind,
        project_y: config.project_y,
    };
    let mut records = Vec::with_capacity(if full { schedule.horizon } else { 0 });
    let mut grad_sum = 0.0;
    let mut clock = Instant::now();
    let (last, _) = run_with(
        &optimizer,
        p,
        schedule,
        x0,
        y0,
        schedule.horizon,
        seed,
        |pre, out| {
            let x = &pre.x_curr;
            let grad_p_norm = cf.map(|cf| norm2(&cf.grad_p(x)));
            grad_sum += grad_p_norm.unwrap_or(0.0);
            if !full {
                return;
            }
            let d = &out.diagnostics;
            let metric = match kind {
                OptimizerKind::Sagda => None,
                _ => metric_ci(p, pre, &out.next_momentum).ok(),
            };
            let wall_ns = config.run.wall_clock.then(|| {
                let now = Instant::now();
                let ns = now.duration_since(clock).as_nanos() as u64;
                clock = now;
                ns
            });
            records.push(TraceRecord {
                iter: pre.iter,
                p_x: (pre.iter % every == 0).then(|| eval(x)),
                grad_p_norm,
                metric_ci: metric,
                m_x_norm: d.m_x_norm,
                m_y_norm: d.m_y_norm,
                clipped_x: d.clipped_x,
                clipped_y: d.clipped_y,
                wall_ns,
            });
        },
    )
    .map_err(|source| HarnessError::Run {
        optimizer: kind.name(),
        seed,
        source,
    })?;
    let final_p_x = eval(&last.x_curr);
    let summary = RunSummary {
        optimizer: kind.name(),
        seed,
        final_p_x,
        final_grad_p_norm: cf.map(|cf| norm2(&cf.grad_p(&last.x_curr))),
        avg_grad_p_norm: cf.map(|_| grad_sum / schedule.horizon as f64),
        inner_unconverged: unconverged,
    };
    Ok(RunOutput { summary, records })
}

/// Runs `jobs` on a pool of `threads` workers (0 = default), keeping order.
pub fn run_parallel<J, T, F>(threads: usize, jobs: &[J], f: F) -> Result<Vec<T>>
where
    J: Sync,
    T: Send,
    F: Fn(&J) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::Unsupported(format!("thread pool: {e}")))?;
    pool.install(|| jobs.par_iter().map(&f).collect())
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub out_dir: PathBuf,
    pub constants: ProblemConstants,
    pub schedules: Vec<(&'static str, HyperSchedule)>,
    pub runs: Vec<RunSummary>,
}

impl ExperimentReport {
    /// Runs of one optimizer, in seed order.
    pub fn runs_of<'a>(&'a self, optimizer: &'a str) -> impl Iterator<Item = &'a RunSummary> + 'a {
        self.runs.iter().filter(move |r| r.optimizer == optimizer)
    }
}

/// Problem, starting-point constants and per-optimizer schedules of a
/// singleton configuration.
pub struct Prepared {
    pub problem: BuiltProblem,
    pub constants: ProblemConstants,
    pub schedules: Vec<(OptimizerKind, HyperSchedule)>,
}

pub fn prepare(config: &ExperimentConfig) -> Result<Prepared> {
    let problem = build_problem(&config.problem)?;
    let constants = prepare_constants(config, &problem)?;
    let mut schedules = Vec::new();
    for &kind in &config.optimizers {
        let points = grid_points(config, kind);
        if points.len() != 1 {
            return Err(HarnessError::Unsupported(format!(
                "{} has {} schedule points; use `grid` for value lists",
                kind.name(),
                points.len()
            )));
        }
        schedules.push((
            kind,
            build_schedule(config, points[0], constants, config.run.horizon)?,
        ));
    }
    Ok(Prepared {
        problem,
        constants,
        schedules,
    })
}

/// Constants resolved at the first seed's starting point.
pub fn prepare_constants(
    config: &ExperimentConfig,
    problem: &BuiltProblem,
) -> Result<ProblemConstants> {
    let (x0, y0) = problem.initial_point(&config.problem, config.run.seeds[0]);
    resolve_constants(config, problem, &x0, &y0)
}

/// Runs every optimizer and seed of a singleton configuration into `out_dir`.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentReport> {
    let prepared = prepare(config)?;
    run_prepared(config, &prepared, out_dir)
}

pub fn run_prepared(
    config: &ExperimentConfig,
    prepared: &Prepared,
    out_dir: &Path,
) -> Result<ExperimentReport> {
    for (kind, schedule) in &prepared.schedules {
        for w in &schedule.warnings {
            log::warn!("{}: {w}", kind.name());
        }
    }
    let jobs: Vec<(OptimizerKind, &HyperSchedule, u64)> = prepared
        .schedules
        .iter()
        .flat_map(|(kind, s)| config.run.seeds.iter().map(move |&seed| (*kind, s, seed)))
        .collect();
    let outputs = run_parallel(config.run.threads, &jobs, |&(kind, schedule, seed)| {
        let out = execute_run(
            config,
            &prepared.problem,
            kind,
            schedule,
            seed,
            TraceMode::Full,
        )?;
        write_trace(
            &out_dir.join(trace_file_name(kind.name(), seed)),
            &out.records,
        )?;
        Ok(out)
    })?;
    let schedules: Vec<_> = prepared
        .schedules
        .iter()
        .map(|(k, s)| (k.name(), s.clone()))
        .collect();
    write_atomic(
        &out_dir.join("config.txt"),
        config_echo(config, prepared.constants, &schedules).as_bytes(),
    )?;
    write_atomic(&out_dir.join("summary.csv"), &summary_bytes(&outputs))?;
    write_atomic(&out_dir.join("curves.csv"), &curves_bytes(&outputs))?;
    Ok(ExperimentReport {
        out_dir: out_dir.to_path_buf(),
        constants: prepared.constants,
        schedules,
        runs: outputs.into_iter().map(|o| o.summary).collect(),
    })
}

/// Canonical configuration followed by the resolved constants and schedules
/// as comments.
pub fn config_echo(
    config: &ExperimentConfig,
    constants: ProblemConstants,
    schedules: &[(&'static str, HyperSchedule)],
) -> String {
    let mut out = config.to_text();
    let c = constants;
    out.push_str(&format!(
        "# resolved constants: l_f={} l_h={} nu={} delta={} sigma={} sigma_h={} g={}\n",
        c.l_f, c.l_h, c.nu, c.delta, c.sigma, c.sigma_h, c.g
    ));
    for (name, s) in schedules {
        out.push_str(&format!(
            "# schedule {name}: mu_x={} mu_y={} beta_x={} beta_y={} clip_threshold={} clip_norm={} T={}\n",
            s.mu_x, s.mu_y, s.beta_x, s.beta_y, s.clip_threshold, s.clip_norm, s.horizon
        ));
        for w in &s.warnings {
            out.push_str(&format!("# warning {name}: {w}\n"));
        }
    }
    out
}

fn opt_string(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Population mean and standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub const SUMMARY_COLUMNS: [&str; 6] = [
    "optimizer",
    "seed",
    "final_p_x",
    "final_grad_p_norm",
    "avg_grad_p_norm",
    "inner_unconverged",
];

/// Per-seed rows followed by `mean` and `std` rows per optimizer.
fn summary_bytes(outputs: &[RunOutput]) -> Vec<u8> {
    let mut rows: Vec<Vec<String>> = Vec::new();
    for name in optimizer_order(outputs) {
        let runs: Vec<&RunSummary> = outputs
            .iter()
            .map(|o| &o.summary)
            .filter(|s| s.optimizer == name)
            .collect();
        for r in &runs {
            rows.push(vec![
                name.into(),
                r.seed.to_string(),
                r.final_p_x.to_string(),
                opt_string(r.final_grad_p_norm),
                opt_string(r.avg_grad_p_norm),
                r.inner_unconverged.to_string(),
            ]);
        }
        let column = |f: &dyn Fn(&RunSummary) -> Option<f64>| -> Option<(f64, f64)> {
            let values: Option<Vec<f64>> = runs.iter().map(|r| f(r)).collect();
            values.map(|v| mean_std(&v))
        };
        let p = column(&|r| Some(r.final_p_x));
        let g = column(&|r| r.final_grad_p_norm);
        let a = column(&|r| r.avg_grad_p_norm);
        let unconverged: usize = runs.iter().map(|r| r.inner_unconverged).sum();
        for (label, pick) in [("mean", 0usize), ("std", 1)] {
            let get =
                |v: Option<(f64, f64)>| opt_string(v.map(|(m, s)| if pick == 0 { m } else { s }));
            rows.push(vec![
                name.into(),
                label.into(),
                get(p),
                get(g),
                get(a),
                if pick == 0 {
                    unconverged.to_string()
                } else {
                    String::new()
                },
            ]);
        }
    }
    csv_bytes(&SUMMARY_COLUMNS, rows)
}

fn optimizer_order(outputs: &[RunOutput]) -> Vec<&'static str> {
    let mut names: Vec<&'static str> = Vec::new();
    for o in outputs {
        if !names.contains(&o.summary.optimizer) {
            names.push(o.summary.optimizer);
        }
    }
    names
}

pub const CURVE_COLUMNS: [&str; 7] = [
    "optimizer",
    "iter",
    "seeds",
    "p_x_mean",
    "p_x_std",
    "grad_p_norm_mean",
    "grad_p_norm_std",
];

/// Mean and standard deviation over seeds at every `P(x)` evaluation.
fn curves_bytes(outputs: &[RunOutput]) -> Vec<u8> {
    let mut rows: Vec<Vec<String>> = Vec::new();
    for name in optimizer_order(outputs) {
        let runs: Vec<&RunOutput> = outputs
            .iter()
            .filter(|o| o.summary.optimizer == name)
            .collect();
        let len = runs[0].records.len();
        for i in 0..len {
            let p: Option<Vec<f64>> = runs.iter().map(|r| r.records[i].p_x).collect();
            let Some(p) = p else { continue };
            let g: Option<Vec<f64>> = runs.iter().map(|r| r.records[i].grad_p_norm).collect();
            let (pm, ps) = mean_std(&p);
            let gs = g.map(|g| mean_std(&g));
            rows.push(vec![
                name.into(),
                runs[0].records[i].iter.to_string(),
                runs.len().to_string(),
                pm.to_string(),
                ps.to_string(),
                opt_string(gs.map(|v| v.0)),
                opt_string(gs.map(|v| v.1)),
            ]);
        }
    }
    csv_bytes(&CURVE_COLUMNS, rows)
}
