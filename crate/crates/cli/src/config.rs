//! Line-based experiment configuration.
//!
//! ```text
//! # comment
//! [problem]
//! kind = quadratic
//! spectrum = 0.5, 1.5
//!
//! [run]
//! T = 1000
//! seeds = 1, 2, 3
//! ```
//!
//! A `[section]` header (dotted names such as `[problem.data]` are allowed)
//! prefixes every following key; a fully qualified `section.key = value`
//! line works anywhere. Lists are comma separated. Every violation found is
//! reported at once.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::PathBuf;

use minimax_core::optimizers::{OptimizerKind, DEFAULT_NORM_FLOOR};
use minimax_core::problems::{PlToySpec, QuadraticSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

/// Every problem found in a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "invalid configuration ({} problem(s))",
            self.violations.len()
        )?;
        for v in &self.violations {
            write!(f, "\n  - {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    line: usize,
}

/// Untyped `key -> value` map with source line numbers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, Entry>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<RawConfig, ConfigError> {
        let mut entries = BTreeMap::new();
        let mut violations = Vec::new();
        let mut section = String::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                match rest.strip_suffix(']').map(str::trim) {
                    Some(name) if is_key(name) => section = name.to_string(),
                    _ => violations.push(Violation {
                        line: Some(line),
                        message: format!("malformed section header `{content}`"),
                    }),
                }
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                violations.push(Violation {
                    line: Some(line),
                    message: format!("expected `key = value`, found `{content}`"),
                });
                continue;
            };
            let key = key.trim();
            if !is_key(key) {
                violations.push(Violation {
                    line: Some(line),
                    message: format!("malformed key `{key}`"),
                });
                continue;
            }
            let full = if section.is_empty() || key.contains('.') {
                key.to_string()
            } else {
                format!("{section}.{key}")
            };
            let entry = Entry {
                value: value.trim().to_string(),
                line,
            };
            if let Some(prev) = entries.insert(full.clone(), entry) {
                violations.push(Violation {
                    line: Some(line),
                    message: format!("duplicate key `{full}` (first set on line {})", prev.line),
                });
            }
        }
        if violations.is_empty() {
            Ok(RawConfig { entries })
        } else {
            Err(ConfigError { violations })
        }
    }

    /// Sets or replaces a value, as from a command-line override.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(
            key.to_string(),
            Entry {
                value: value.into(),
                line: 0,
            },
        );
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }
}

fn is_key(s: &str) -> bool {
    !s.is_empty()
        && s.split('.').all(|part| {
            !part.is_empty() && part.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        })
}

/// A problem constant given explicitly or left to the harness to estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimate {
    Auto,
    Value(f64),
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Estimate::Auto => write!(f, "auto"),
            Estimate::Value(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    /// A LIBSVM file; relative paths are also tried under `MINIMAX_DATA_DIR`.
    File(PathBuf),
    /// Random sparse data from a seed.
    Synthetic {
        n: usize,
        d: usize,
        density: f64,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticConfig {
    pub source: DataSource,
    pub subsample: Option<usize>,
    pub stratify: bool,
    pub data_seed: u64,
    /// Expected `(n, d)` of the full file, checked before subsampling.
    pub expect_n: Option<usize>,
    pub expect_d: Option<usize>,
    /// `None` means `1/n^2`.
    pub lambda1: Option<f64>,
    pub lambda2: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemConfig {
    RobustLogistic(LogisticConfig),
    /// `x0` has norm `x0_radius` in a direction drawn from the run seed.
    Quadratic {
        spec: QuadraticSpec,
        x0_radius: f64,
    },
    PlToy {
        spec: PlToySpec,
        x0_radius: f64,
    },
}

impl ProblemConfig {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ProblemConfig::RobustLogistic(_) => "robust_logistic",
            ProblemConfig::Quadratic { .. } => "quadratic",
            ProblemConfig::PlToy { .. } => "pl_toy",
        }
    }

    pub fn is_synthetic(&self) -> bool {
        !matches!(self, ProblemConfig::RobustLogistic(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    Explicit,
    Theorem1,
    Theorem2,
}

impl ScheduleKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScheduleKind::Explicit => "explicit",
            ScheduleKind::Theorem1 => "theorem1",
            ScheduleKind::Theorem2 => "theorem2",
        }
    }
}

/// Step-size settings. Value lists are only meaningful for grid search.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleConfig {
    pub kind: ScheduleKind,
    pub mu_x: Vec<f64>,
    pub mu_y: Vec<f64>,
    pub beta_x: Vec<f64>,
    pub beta_y: Vec<f64>,
    /// Clipping threshold `N`.
    pub clip_threshold: Vec<f64>,
    /// Clipping norm `N1`.
    pub clip_norm: Vec<f64>,
}

impl ScheduleConfig {
    pub fn is_singleton(&self) -> bool {
        [
            &self.mu_x,
            &self.mu_y,
            &self.beta_x,
            &self.beta_y,
            &self.clip_threshold,
            &self.clip_norm,
        ]
        .iter()
        .all(|v| v.len() <= 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantsConfig {
    pub l_f: Estimate,
    pub l_h: Estimate,
    pub nu: Estimate,
    pub delta: Estimate,
    pub sigma: Estimate,
    pub sigma_h: Estimate,
    pub g: Estimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub horizon: usize,
    pub seeds: Vec<u64>,
    pub eval_every: usize,
    pub output_dir: PathBuf,
    /// Inner-maximization tolerance; `None` picks the per-problem default.
    pub inner_tol: Option<f64>,
    pub inner_max_iters: usize,
    /// Record per-step wall-clock time (makes traces machine dependent).
    pub wall_clock: bool,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    pub optimizers: Vec<OptimizerKind>,
    pub project_y: bool,
    pub schedule: ScheduleConfig,
    pub constants: ConstantsConfig,
    pub run: RunConfig,
}

/// Typed reader that records which keys were consumed and every failure.
struct Reader<'a> {
    raw: &'a RawConfig,
    used: RefCell<BTreeSet<String>>,
    violations: RefCell<Vec<Violation>>,
}

impl<'a> Reader<'a> {
    fn new(raw: &'a RawConfig) -> Self {
        Reader {
            raw,
            used: RefCell::default(),
            violations: RefCell::default(),
        }
    }

    fn fail(&self, key: &str, message: String) {
        let line = self.raw.entries.get(key).map(|e| e.line).filter(|&l| l > 0);
        self.violations
            .borrow_mut()
            .push(Violation { line, message });
    }

    fn raw(&self, key: &str) -> Option<&'a str> {
        self.used.borrow_mut().insert(key.to_string());
        self.raw.get(key)
    }

    fn parsed<T>(&self, key: &str, what: &str, parse: impl Fn(&str) -> Option<T>) -> Option<T> {
        let value = self.raw(key)?;
        let out = parse(value);
        if out.is_none() {
            self.fail(key, format!("`{key}` must be {what}, found `{value}`"));
        }
        out
    }

    fn string(&self, key: &str) -> Option<String> {
        self.raw(key).map(str::to_string)
    }

    fn f64(&self, key: &str) -> Option<f64> {
        self.parsed(key, "a number", parse_f64)
    }

    fn usize(&self, key: &str) -> Option<usize> {
        self.parsed(key, "a nonnegative integer", |s| {
            parse_count(s).and_then(|v| usize::try_from(v).ok())
        })
    }

    fn u64(&self, key: &str) -> Option<u64> {
        self.parsed(key, "a nonnegative integer", parse_count)
    }

    fn bool(&self, key: &str) -> Option<bool> {
        self.parsed(key, "true or false", |s| match s {
            "true" => Some(true),
            "false" => Some(false),
            _ => None,
        })
    }

    fn f64_list(&self, key: &str) -> Option<Vec<f64>> {
        self.parsed(key, "a comma-separated list of numbers", |s| {
            split_list(s).map(parse_f64).collect()
        })
    }

    fn u64_list(&self, key: &str) -> Option<Vec<u64>> {
        self.parsed(key, "a comma-separated list of nonnegative integers", |s| {
            split_list(s).map(parse_count).collect()
        })
    }

    fn pair(&self, key: &str) -> Option<(f64, f64)> {
        self.parsed(key, "two comma-separated numbers `lo, hi`", |s| {
            let v: Vec<f64> = split_list(s).map(parse_f64).collect::<Option<_>>()?;
            (v.len() == 2).then(|| (v[0], v[1]))
        })
    }

    fn estimate(&self, key: &str) -> Estimate {
        self.parsed(key, "a number or `auto`", |s| {
            if s == "auto" {
                Some(Estimate::Auto)
            } else {
                parse_f64(s).map(Estimate::Value)
            }
        })
        .unwrap_or(Estimate::Auto)
    }

    fn require<T>(&self, key: &str, value: Option<T>) -> Option<T> {
        if value.is_none() && self.raw.get(key).is_none() {
            self.fail(key, format!("missing required key `{key}`"));
        }
        value
    }

    fn positive(&self, key: &str, value: f64) {
        if !(value > 0.0) {
            self.fail(key, format!("`{key}` must be > 0, found {value}"));
        }
    }

    fn unused_keys(&self) {
        let used = self.used.borrow();
        for (key, entry) in &self.raw.entries {
            if !used.contains(key) {
                self.violations.borrow_mut().push(Violation {
                    line: (entry.line > 0).then_some(entry.line),
                    message: format!("unknown or unused key `{key}` for this configuration"),
                });
            }
        }
    }
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim)
}

fn parse_f64(s: &str) -> Option<f64> {
    match s {
        "inf" | "+inf" | "infinity" => Some(f64::INFINITY),
        _ => s.parse::<f64>().ok().filter(|v| v.is_finite()),
    }
}

/// Integers, also accepting exact scientific notation such as `1e4`.
pub fn parse_count(s: &str) -> Option<u64> {
    s.parse::<u64>().ok().or_else(|| {
        let v = s.parse::<f64>().ok()?;
        (v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64).then_some(v as u64)
    })
}

pub fn parse_optimizer_name(name: &str) -> Option<OptimizerKind> {
    match name {
        "hcmm1" => Some(OptimizerKind::hcmm1()),
        "hcmm2" => Some(OptimizerKind::hcmm2()),
        "storm_gda" => Some(OptimizerKind::StormGda),
        "sagda" => Some(OptimizerKind::Sagda),
        _ => None,
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
        Self::from_raw(&RawConfig::parse(text)?)
    }

    pub fn from_raw(raw: &RawConfig) -> Result<ExperimentConfig, ConfigError> {
        let r = Reader::new(raw);
        let problem = read_problem(&r);
        let (optimizers, project_y) = read_optimizers(&r);
        let schedule = read_schedule(&r, &optimizers);
        let constants = read_constants(&r);
        let run = read_run(&r);
        if let Some(problem) = &problem {
            check_schedule_inputs(&r, problem, &schedule, &constants);
        }
        r.unused_keys();
        let violations = r.violations.into_inner();
        match problem {
            Some(problem) if violations.is_empty() => Ok(ExperimentConfig {
                problem,
                optimizers,
                project_y,
                schedule,
                constants,
                run,
            }),
            _ => Err(ConfigError { violations }),
        }
    }

    /// Canonical text form with every setting spelled out; parses back to
    /// the same configuration.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        let mut push = |key: &str, value: String| out.push_str(&format!("{key} = {value}\n"));
        push("problem.kind", self.problem.kind_name().into());
        match &self.problem {
            ProblemConfig::RobustLogistic(c) => {
                match &c.source {
                    DataSource::File(path) => push("problem.dataset", path.display().to_string()),
                    DataSource::Synthetic {
                        n,
                        d,
                        density,
                        seed,
                    } => {
                        push("problem.dataset", "synthetic".into());
                        push("problem.synthetic_n", n.to_string());
                        push("problem.synthetic_d", d.to_string());
                        push("problem.synthetic_density", density.to_string());
                        push("problem.synthetic_seed", seed.to_string());
                    }
                }
                if let Some(k) = c.subsample {
                    push("problem.subsample", k.to_string());
                }
                push("problem.stratify", c.stratify.to_string());
                push("problem.data_seed", c.data_seed.to_string());
                if let Some(n) = c.expect_n {
                    push("problem.expect_n", n.to_string());
                }
                if let Some(d) = c.expect_d {
                    push("problem.expect_d", d.to_string());
                }
                push(
                    "problem.lambda1",
                    c.lambda1.map_or("auto".into(), |v| v.to_string()),
                );
                push("problem.lambda2", c.lambda2.to_string());
                push("problem.rho", c.rho.to_string());
            }
            ProblemConfig::Quadratic { spec, x0_radius } => {
                push("problem.d", spec.d.to_string());
                push("problem.m", spec.m.to_string());
                push(
                    "problem.spectrum",
                    list(&[spec.spectrum.0, spec.spectrum.1]),
                );
                push("problem.nu", spec.nu.to_string());
                push("problem.coupling", spec.coupling.to_string());
                push("problem.noise_sigma", spec.noise_sigma.to_string());
                push("problem.noise_sigma_h", spec.noise_sigma_h.to_string());
                push("problem.seed", spec.seed.to_string());
                push("problem.x0_radius", x0_radius.to_string());
            }
            ProblemConfig::PlToy { spec, x0_radius } => {
                push("problem.d", spec.d.to_string());
                push("problem.m", spec.m.to_string());
                push("problem.rank", spec.rank.to_string());
                push(
                    "problem.spectrum",
                    list(&[spec.spectrum.0, spec.spectrum.1]),
                );
                push(
                    "problem.c_spectrum",
                    list(&[spec.c_spectrum.0, spec.c_spectrum.1]),
                );
                push("problem.coupling", spec.coupling.to_string());
                push("problem.noise_sigma", spec.noise_sigma.to_string());
                push("problem.seed", spec.seed.to_string());
                push("problem.x0_radius", x0_radius.to_string());
            }
        }
        push(
            "optimizer.kind",
            self.optimizers
                .iter()
                .map(|k| k.name())
                .collect::<Vec<_>>()
                .join(", "),
        );
        for kind in &self.optimizers {
            match kind {
                OptimizerKind::Hcmm1 {
                    update_from_clipped,
                } => push(
                    "optimizer.update_from_clipped",
                    update_from_clipped.to_string(),
                ),
                OptimizerKind::Hcmm2 { norm_floor } => {
                    push("optimizer.norm_floor", norm_floor.to_string())
                }
                _ => {}
            }
        }
        push("optimizer.project_y", self.project_y.to_string());
        let s = &self.schedule;
        push("schedule.kind", s.kind.name().into());
        for (key, values) in [
            ("schedule.mu_x", &s.mu_x),
            ("schedule.mu_y", &s.mu_y),
            ("schedule.beta_x", &s.beta_x),
            ("schedule.beta_y", &s.beta_y),
            ("schedule.clip_threshold", &s.clip_threshold),
            ("schedule.clip_norm", &s.clip_norm),
        ] {
            if !values.is_empty() {
                push(key, list(values));
            }
        }
        let c = &self.constants;
        for (key, value) in [
            ("constants.l_f", c.l_f),
            ("constants.l_h", c.l_h),
            ("constants.nu", c.nu),
            ("constants.delta", c.delta),
            ("constants.sigma", c.sigma),
            ("constants.sigma_h", c.sigma_h),
            ("constants.g", c.g),
        ] {
            push(key, value.to_string());
        }
        let run = &self.run;
        push("run.T", run.horizon.to_string());
        push(
            "run.seeds",
            run.seeds
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(", "),
        );
        push("run.eval_every", run.eval_every.to_string());
        push("run.output_dir", run.output_dir.display().to_string());
        if let Some(tol) = run.inner_tol {
            push("run.inner_tol", tol.to_string());
        }
        push("run.inner_max_iters", run.inner_max_iters.to_string());
        push("run.wall_clock", run.wall_clock.to_string());
        push("run.threads", run.threads.to_string());
        out
    }
}

fn read_problem(r: &Reader) -> Option<ProblemConfig> {
    let kind = r.require("problem.kind", r.string("problem.kind"))?;
    match kind.as_str() {
        "robust_logistic" => {
            let dataset = r.require("problem.dataset", r.string("problem.dataset"));
            let source = match dataset.as_deref() {
                Some("synthetic") => {
                    let n = r
                        .require("problem.synthetic_n", r.usize("problem.synthetic_n"))
                        .unwrap_or(1);
                    let d = r
                        .require("problem.synthetic_d", r.usize("problem.synthetic_d"))
                        .unwrap_or(1);
                    let density = r.f64("problem.synthetic_density").unwrap_or(0.1);
                    if n == 0 || d == 0 {
                        r.fail(
                            "problem.synthetic_n",
                            "synthetic dataset dimensions must be positive".into(),
                        );
                    }
                    if !(density > 0.0 && density <= 1.0) {
                        r.fail(
                            "problem.synthetic_density",
                            format!(
                                "`problem.synthetic_density` must be in (0, 1], found {density}"
                            ),
                        );
                    }
                    DataSource::Synthetic {
                        n,
                        d,
                        density,
                        seed: r.u64("problem.synthetic_seed").unwrap_or(0),
                    }
                }
                Some(path) => DataSource::File(PathBuf::from(path)),
                None => DataSource::File(PathBuf::new()),
            };
            let subsample = r.usize("problem.subsample");
            if subsample == Some(0) {
                r.fail(
                    "problem.subsample",
                    "`problem.subsample` must be at least 1".into(),
                );
            }
            let lambda1 = match r.string("problem.lambda1").as_deref() {
                None | Some("auto") => None,
                Some(_) => r.f64("problem.lambda1"),
            };
            let cfg = LogisticConfig {
                source,
                subsample,
                stratify: r.bool("problem.stratify").unwrap_or(false),
                data_seed: r.u64("problem.data_seed").unwrap_or(0),
                expect_n: r.usize("problem.expect_n"),
                expect_d: r.usize("problem.expect_d"),
                lambda1,
                lambda2: r.f64("problem.lambda2").unwrap_or(0.001),
                rho: r.f64("problem.rho").unwrap_or(10.0),
            };
            if let Some(l) = cfg.lambda1 {
                r.positive("problem.lambda1", l);
            }
            r.positive("problem.lambda2", cfg.lambda2);
            r.positive("problem.rho", cfg.rho);
            Some(ProblemConfig::RobustLogistic(cfg))
        }
        "quadratic" => {
            let base = QuadraticSpec::default();
            let spec = QuadraticSpec {
                d: r.usize("problem.d").unwrap_or(base.d),
                m: r.usize("problem.m").unwrap_or(base.m),
                spectrum: r.pair("problem.spectrum").unwrap_or(base.spectrum),
                nu: r.f64("problem.nu").unwrap_or(base.nu),
                coupling: r.f64("problem.coupling").unwrap_or(base.coupling),
                noise_sigma: r.f64("problem.noise_sigma").unwrap_or(base.noise_sigma),
                noise_sigma_h: r.f64("problem.noise_sigma_h").unwrap_or(base.noise_sigma_h),
                seed: r.u64("problem.seed").unwrap_or(base.seed),
            };
            check_dims(r, spec.d, spec.m, spec.spectrum);
            r.positive("problem.nu", spec.nu);
            nonneg(r, "problem.noise_sigma", spec.noise_sigma);
            nonneg(r, "problem.noise_sigma_h", spec.noise_sigma_h);
            let x0_radius = r.f64("problem.x0_radius").unwrap_or(0.0);
            nonneg(r, "problem.x0_radius", x0_radius);
            Some(ProblemConfig::Quadratic { spec, x0_radius })
        }
        "pl_toy" => {
            let base = PlToySpec::default();
            let spec = PlToySpec {
                d: r.usize("problem.d").unwrap_or(base.d),
                m: r.usize("problem.m").unwrap_or(base.m),
                rank: r.usize("problem.rank").unwrap_or(base.rank),
                spectrum: r.pair("problem.spectrum").unwrap_or(base.spectrum),
                c_spectrum: r.pair("problem.c_spectrum").unwrap_or(base.c_spectrum),
                coupling: r.f64("problem.coupling").unwrap_or(base.coupling),
                noise_sigma: r.f64("problem.noise_sigma").unwrap_or(base.noise_sigma),
                seed: r.u64("problem.seed").unwrap_or(base.seed),
            };
            check_dims(r, spec.d, spec.m, spec.spectrum);
            if spec.rank == 0 || spec.rank >= spec.m {
                r.fail(
                    "problem.rank",
                    format!("`problem.rank` must be in 1..m-1, found {}", spec.rank),
                );
            }
            nonneg(r, "problem.noise_sigma", spec.noise_sigma);
            let x0_radius = r.f64("problem.x0_radius").unwrap_or(0.0);
            nonneg(r, "problem.x0_radius", x0_radius);
            Some(ProblemConfig::PlToy { spec, x0_radius })
        }
        other => {
            r.fail(
                "problem.kind",
                format!("unknown problem kind `{other}` (expected robust_logistic, quadratic or pl_toy)"),
            );
            None
        }
    }
}

fn check_dims(r: &Reader, d: usize, m: usize, spectrum: (f64, f64)) {
    if d == 0 || m == 0 {
        r.fail(
            "problem.d",
            "problem dimensions `d` and `m` must be positive".into(),
        );
    }
    if !(spectrum.0 > 0.0 && spectrum.0 <= spectrum.1) {
        r.fail(
            "problem.spectrum",
            format!("`problem.spectrum` must satisfy 0 < lo <= hi, found {spectrum:?}"),
        );
    }
}

fn nonneg(r: &Reader, key: &str, value: f64) {
    if !(value >= 0.0) {
        r.fail(key, format!("`{key}` must be >= 0, found {value}"));
    }
}

fn read_optimizers(r: &Reader) -> (Vec<OptimizerKind>, bool) {
    let mut kinds = Vec::new();
    if let Some(names) = r.require("optimizer.kind", r.string("optimizer.kind")) {
        for name in split_list(&names) {
            match parse_optimizer_name(name) {
                Some(k) if kinds.iter().any(|p: &OptimizerKind| p.name() == k.name()) => {
                    r.fail("optimizer.kind", format!("optimizer `{name}` listed twice"))
                }
                Some(k) => kinds.push(k),
                None => r.fail(
                    "optimizer.kind",
                    format!(
                        "unknown optimizer `{name}` (expected hcmm1, hcmm2, storm_gda or sagda)"
                    ),
                ),
            }
        }
    }
    for kind in kinds.iter_mut() {
        match kind {
            OptimizerKind::Hcmm1 {
                update_from_clipped,
            } => {
                *update_from_clipped = r.bool("optimizer.update_from_clipped").unwrap_or(false);
            }
            OptimizerKind::Hcmm2 { norm_floor } => {
                *norm_floor = r.f64("optimizer.norm_floor").unwrap_or(DEFAULT_NORM_FLOOR);
                r.positive("optimizer.norm_floor", *norm_floor);
            }
            _ => {}
        }
    }
    (kinds, r.bool("optimizer.project_y").unwrap_or(true))
}

fn read_schedule(r: &Reader, optimizers: &[OptimizerKind]) -> ScheduleConfig {
    let kind = match r.string("schedule.kind").as_deref().unwrap_or("explicit") {
        "explicit" => ScheduleKind::Explicit,
        "theorem1" => ScheduleKind::Theorem1,
        "theorem2" => ScheduleKind::Theorem2,
        other => {
            r.fail(
                "schedule.kind",
                format!(
                    "unknown schedule kind `{other}` (expected explicit, theorem1 or theorem2)"
                ),
            );
            ScheduleKind::Explicit
        }
    };
    let mut s = ScheduleConfig {
        kind,
        mu_x: vec![],
        mu_y: vec![],
        beta_x: vec![],
        beta_y: vec![],
        clip_threshold: vec![],
        clip_norm: vec![],
    };
    let clipping = optimizers.iter().any(|k| k.uses_clipping());
    match kind {
        ScheduleKind::Explicit => {
            s.mu_x = r
                .require("schedule.mu_x", r.f64_list("schedule.mu_x"))
                .unwrap_or_default();
            s.mu_y = r
                .require("schedule.mu_y", r.f64_list("schedule.mu_y"))
                .unwrap_or_default();
            let beta = r.f64_list("schedule.beta");
            s.beta_x = r
                .f64_list("schedule.beta_x")
                .or(beta.clone())
                .unwrap_or_else(|| vec![1.0]);
            s.beta_y = r
                .f64_list("schedule.beta_y")
                .or(beta)
                .unwrap_or_else(|| vec![1.0]);
            if clipping {
                s.clip_threshold = r
                    .f64_list("schedule.clip_threshold")
                    .unwrap_or_else(|| vec![f64::INFINITY]);
                s.clip_norm = r
                    .f64_list("schedule.clip_norm")
                    .unwrap_or_else(|| s.clip_threshold.clone());
            }
            for (key, values) in [("schedule.mu_x", &s.mu_x), ("schedule.mu_y", &s.mu_y)] {
                for &v in values {
                    r.positive(key, v);
                }
            }
            let source = |key: &'static str| {
                if r.raw.get(key).is_some() {
                    key
                } else {
                    "schedule.beta"
                }
            };
            let beta_keys = [
                ("schedule.beta_x", source("schedule.beta_x")),
                ("schedule.beta_y", source("schedule.beta_y")),
            ];
            for ((key, from), values) in beta_keys.into_iter().zip([&s.beta_x, &s.beta_y]) {
                for &v in values {
                    if !(v > 0.0 && v <= 1.0) {
                        let via = if from == key {
                            String::new()
                        } else {
                            format!(" (set by `{from}`)")
                        };
                        r.fail(from, format!("`{key}`{via} must be in (0, 1], found {v}"));
                    }
                }
            }
        }
        ScheduleKind::Theorem1 => {
            s.clip_norm = r
                .require("schedule.clip_norm", r.f64_list("schedule.clip_norm"))
                .unwrap_or_default();
            s.clip_threshold = r
                .f64_list("schedule.clip_threshold")
                .unwrap_or_else(|| s.clip_norm.clone());
            if s.clip_norm.len() > 1 || s.clip_threshold.len() > 1 {
                r.fail(
                    "schedule.clip_norm",
                    "theorem schedules take a single clipping threshold and norm".into(),
                );
            }
        }
        ScheduleKind::Theorem2 => {}
    }
    for (key, values) in [
        ("schedule.clip_threshold", &s.clip_threshold),
        ("schedule.clip_norm", &s.clip_norm),
    ] {
        for &v in values {
            r.positive(key, v);
        }
    }
    s
}

fn read_constants(r: &Reader) -> ConstantsConfig {
    let c = ConstantsConfig {
        l_f: r.estimate("constants.l_f"),
        l_h: r.estimate("constants.l_h"),
        nu: r.estimate("constants.nu"),
        delta: r.estimate("constants.delta"),
        sigma: r.estimate("constants.sigma"),
        sigma_h: r.estimate("constants.sigma_h"),
        g: r.estimate("constants.g"),
    };
    for (key, value) in [
        ("constants.l_f", c.l_f),
        ("constants.l_h", c.l_h),
        ("constants.nu", c.nu),
        ("constants.delta", c.delta),
        ("constants.sigma", c.sigma),
        ("constants.sigma_h", c.sigma_h),
        ("constants.g", c.g),
    ] {
        if let Estimate::Value(v) = value {
            nonneg(r, key, v);
        }
    }
    c
}

fn check_schedule_inputs(
    r: &Reader,
    problem: &ProblemConfig,
    s: &ScheduleConfig,
    c: &ConstantsConfig,
) {
    let need = |key: &str, value: Estimate, why: &str| match value {
        Estimate::Value(v) if v > 0.0 => {}
        Estimate::Value(v) => r.fail(key, format!("`{key}` must be > 0 for {why}, found {v}")),
        Estimate::Auto => r.fail(key, format!("`{key}` must be given explicitly for {why}")),
    };
    match s.kind {
        ScheduleKind::Theorem1 => {
            need("constants.l_h", c.l_h, "the theorem1 schedule");
            need("constants.sigma_h", c.sigma_h, "the theorem1 schedule");
            if matches!(problem, ProblemConfig::PlToy { .. }) && c.nu == Estimate::Auto {
                r.fail(
                    "constants.nu",
                    "`constants.nu` cannot be estimated for pl_toy (not strongly concave)".into(),
                );
            }
        }
        ScheduleKind::Theorem2 => {
            if matches!(problem, ProblemConfig::RobustLogistic(_)) && c.delta == Estimate::Auto {
                r.fail(
                    "constants.delta",
                    "`constants.delta` must be given explicitly for robust_logistic".into(),
                );
            }
        }
        ScheduleKind::Explicit => {}
    }
}

fn read_run(r: &Reader) -> RunConfig {
    let horizon = r.require("run.T", r.usize("run.T")).unwrap_or(1);
    if horizon == 0 {
        r.fail("run.T", "`run.T` must be at least 1".into());
    }
    let seeds = r
        .require("run.seeds", r.u64_list("run.seeds"))
        .unwrap_or_else(|| vec![0]);
    let distinct: BTreeSet<_> = seeds.iter().collect();
    if seeds.is_empty() || distinct.len() != seeds.len() {
        r.fail(
            "run.seeds",
            "`run.seeds` must be a nonempty list of distinct seeds".into(),
        );
    }
    let eval_every = r.usize("run.eval_every").unwrap_or(10);
    if eval_every == 0 {
        r.fail(
            "run.eval_every",
            "`run.eval_every` must be at least 1".into(),
        );
    }
    let inner_tol = r.f64("run.inner_tol");
    if let Some(tol) = inner_tol {
        r.positive("run.inner_tol", tol);
    }
    RunConfig {
        horizon,
        seeds,
        eval_every,
        output_dir: PathBuf::from(r.string("run.output_dir").unwrap_or_else(|| "runs".into())),
        inner_tol,
        inner_max_iters: r.usize("run.inner_max_iters").unwrap_or(10_000),
        wall_clock: r.bool("run.wall_clock").unwrap_or(false),
        threads: r.usize("run.threads").unwrap_or(0),
    }
}
