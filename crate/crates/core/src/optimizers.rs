//! HCMM-1, HCMM-2 and the STORM-GDA / SAGDA baselines as step functions.
//!
//! A step reads the iterate pair `(z_i, z_{i-1})`, the momentum carried from
//! the previous step and the schedule, draws its samples from `rng` and returns
//! the next state. Nothing is mutated in place.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::oracle::{MinimaxProblem, OracleError, SampleId};
use crate::schedule::HyperSchedule;
use crate::state::{clip_momentum, IterateState, MomentumState};
use crate::vector::{self, norm2, Vec64};

/// Default norm below which HCMM-2 skips a block's position update.
pub const DEFAULT_NORM_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptimizerKind {
    /// Clipped Hessian-corrected momentum. With `update_from_clipped` the
    /// momentum recursion starts from the clipped momentum; otherwise from
    /// the raw one.
    Hcmm1 {
        update_from_clipped: bool,
    },
    /// Normalized Hessian-corrected momentum.
    Hcmm2 {
        norm_floor: f64,
    },
    StormGda,
    Sagda,
}

impl OptimizerKind {
    pub fn hcmm1() -> Self {
        OptimizerKind::Hcmm1 {
            update_from_clipped: false,
        }
    }

    pub fn hcmm2() -> Self {
        OptimizerKind::Hcmm2 {
            norm_floor: DEFAULT_NORM_FLOOR,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OptimizerKind::Hcmm1 { .. } => "hcmm1",
            OptimizerKind::Hcmm2 { .. } => "hcmm2",
            OptimizerKind::StormGda => "storm_gda",
            OptimizerKind::Sagda => "sagda",
        }
    }

    /// Whether the momentum state carries clipped counterparts.
    pub fn uses_clipping(&self) -> bool {
        matches!(self, OptimizerKind::Hcmm1 { .. })
    }
}

/// An optimizer together with its constraint-handling knob.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimizer {
    pub kind: OptimizerKind,
    /// Apply the problem's y-projection after every y update.
    pub project_y: bool,
}

impl Optimizer {
    pub fn new(kind: OptimizerKind) -> Self {
        Optimizer {
            kind,
            project_y: true,
        }
    }

    pub fn step(
        &self,
        state: &IterateState,
        momentum: &MomentumState,
        schedule: &HyperSchedule,
        problem: &dyn MinimaxProblem,
        rng: &mut dyn RngCore,
    ) -> Result<StepOutput, OracleError> {
        match self.kind {
            OptimizerKind::Hcmm1 {
                update_from_clipped,
            } => hcmm1_step(
                state,
                momentum,
                schedule,
                problem,
                rng,
                update_from_clipped,
                self.project_y,
            ),
            OptimizerKind::Hcmm2 { norm_floor } => hcmm2_step(
                state,
                momentum,
                schedule,
                problem,
                rng,
                norm_floor,
                self.project_y,
            ),
            OptimizerKind::StormGda => {
                storm_gda_step(state, momentum, schedule, problem, rng, self.project_y)
            }
            OptimizerKind::Sagda => {
                sagda_step(state, momentum, schedule, problem, rng, self.project_y)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepDiagnostics {
    pub m_x_norm: f64,
    pub m_y_norm: f64,
    pub clipped_x: bool,
    pub clipped_y: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutput {
    pub next_state: IterateState,
    pub next_momentum: MomentumState,
    pub sample_used: SampleId,
    /// Second sample of the alternating y update (SAGDA only).
    pub second_sample: Option<SampleId>,
    pub diagnostics: StepDiagnostics,
}

/// `(1 - beta) (prev_m + hvp_sample) + beta grad_sample`.
pub fn hcmm_momentum_update(
    prev_m: &[f64],
    beta: f64,
    grad_sample: &[f64],
    hvp_sample: &[f64],
) -> Vec64 {
    assert_eq!(prev_m.len(), grad_sample.len(), "dimension mismatch");
    assert_eq!(prev_m.len(), hvp_sample.len(), "dimension mismatch");
    prev_m
        .iter()
        .zip(hvp_sample)
        .zip(grad_sample)
        .map(|((m, h), g)| (1.0 - beta) * (m + h) + beta * g)
        .collect()
}

/// Bias-corrected momentum pair from one shared sample at `z_i`, with the
/// Hessian correction applied along `z_i - z_{i-1}`.
fn corrected_momentum(
    state: &IterateState,
    base_x: &[f64],
    base_y: &[f64],
    schedule: &HyperSchedule,
    problem: &dyn MinimaxProblem,
    rng: &mut dyn RngCore,
) -> Result<(Vec64, Vec64, SampleId), OracleError> {
    let xi = problem.draw_sample(rng);
    let (x, y) = (&state.x_curr, &state.y_curr);
    let g = problem.sample_gradient(x, y, xi)?;
    let h = problem.sample_hvp(x, y, xi, &state.dx(), &state.dy())?;
    let m_x = hcmm_momentum_update(base_x, schedule.beta_x, &g.gx, &h.hx);
    let m_y = hcmm_momentum_update(base_y, schedule.beta_y, &g.gy, &h.hy);
    Ok((m_x, m_y, xi))
}

fn ascend_y(
    problem: &dyn MinimaxProblem,
    y: &[f64],
    step: f64,
    dir: &[f64],
    project: bool,
) -> Vec64 {
    let mut next = vector::axpy(step, dir, y);
    if project {
        problem.project_y(&mut next);
    }
    next
}

/// One HCMM-1 iteration: corrected momentum, clipping, two-time-scale GDA.
pub fn hcmm1_step(
    state: &IterateState,
    momentum: &MomentumState,
    schedule: &HyperSchedule,
    problem: &dyn MinimaxProblem,
    rng: &mut dyn RngCore,
    update_from_clipped: bool,
    project_y: bool,
) -> Result<StepOutput, OracleError> {
    let (base_x, base_y) = if update_from_clipped {
        (momentum.effective_x(), momentum.effective_y())
    } else {
        (&momentum.m_x[..], &momentum.m_y[..])
    };
    let (m_x, m_y, xi) = corrected_momentum(state, base_x, base_y, schedule, problem, rng)?;
    let (nx, ny) = (norm2(&m_x), norm2(&m_y));
    let (n, n1) = (schedule.clip_threshold, schedule.clip_norm);
    let c_x = clip_momentum(&m_x, n, n1);
    let c_y = clip_momentum(&m_y, n, n1);

    let x_next = vector::axpy(-schedule.mu_x, &c_x, &state.x_curr);
    let y_next = ascend_y(problem, &state.y_curr, schedule.mu_y, &c_y, project_y);
    Ok(StepOutput {
        next_state: state.advance(x_next, y_next),
        next_momentum: MomentumState {
            m_x,
            m_y,
            m_x_clipped: Some(c_x),
            m_y_clipped: Some(c_y),
        },
        sample_used: xi,
        second_sample: None,
        diagnostics: StepDiagnostics {
            m_x_norm: nx,
            m_y_norm: ny,
            clipped_x: nx >= n,
            clipped_y: ny >= n,
        },
    })
}

/// One HCMM-2 iteration: corrected momentum and normalized GDA. A block whose
/// momentum norm is at most `norm_floor` keeps its position.
pub fn hcmm2_step(
    state: &IterateState,
    momentum: &MomentumState,
    schedule: &HyperSchedule,
    problem: &dyn MinimaxProblem,
    rng: &mut dyn RngCore,
    norm_floor: f64,
    project_y: bool,
) -> Result<StepOutput, OracleError> {
    let (m_x, m_y, xi) =
        corrected_momentum(state, &momentum.m_x, &momentum.m_y, schedule, problem, rng)?;
    let (nx, ny) = (norm2(&m_x), norm2(&m_y));
    let (x_next, y_next) =
        hcmm2_weight_update(state, &m_x, &m_y, schedule, problem, norm_floor, project_y);
    Ok(StepOutput {
        next_state: state.advance(x_next, y_next),
        next_momentum: MomentumState::new(m_x, m_y),
        sample_used: xi,
        second_sample: None,
        diagnostics: StepDiagnostics {
            m_x_norm: nx,
            m_y_norm: ny,
            ..Default::default()
        },
    })
}

/// Normalized weight update `x - mu_x m_x/||m_x||`, `y + mu_y m_y/||m_y||`;
/// a block whose momentum norm is at most `norm_floor` stays put.
pub fn hcmm2_weight_update(
    state: &IterateState,
    m_x: &[f64],
    m_y: &[f64],
    schedule: &HyperSchedule,
    problem: &dyn MinimaxProblem,
    norm_floor: f64,
    project_y: bool,
) -> (Vec64, Vec64) {
    let (nx, ny) = (norm2(m_x), norm2(m_y));
    let x_next = if nx > norm_floor {
        vector::axpy(-schedule.mu_x / nx, m_x, &state.x_curr)
    } else {
        state.x_curr.clone()
    };
    let y_next = if ny > norm_floor {
        ascend_y(problem, &state.y_curr, schedule.mu_y / ny, m_y, project_y)
    } else {
        state.y_curr.clone()
    };
    (x_next, y_next)
}

/// One STORM-GDA iteration: the same sample is evaluated at `z_i` and
/// `z_{i-1}` and `m <- g(z_i) + (1 - beta)(m - g(z_{i-1}))`.
pub fn storm_gda_step(
    state: &IterateState,
    momentum: &MomentumState,
    schedule: &HyperSchedule,
    problem: &dyn MinimaxProblem,
    rng: &mut dyn RngCore,
    project_y: bool,
) -> Result<StepOutput, OracleError> {
    let xi = problem.draw_sample(rng);
    let curr = problem.sample_gradient(&state.x_curr, &state.y_curr, xi)?;
    let prev = problem.sample_gradient(&state.x_prev, &state.y_prev, xi)?;
    let storm = |g: &[f64], m: &[f64], g_prev: &[f64], beta: f64| -> Vec64 {
        g.iter()
            .zip(m)
            .zip(g_prev)
            .map(|((g, m), gp)| g + (1.0 - beta) * (m - gp))
            .collect()
    };
    let m_x = storm(&curr.gx, &momentum.m_x, &prev.gx, schedule.beta_x);
    let m_y = storm(&curr.gy, &momentum.m_y, &prev.gy, schedule.beta_y);

    let x_next = vector::axpy(-schedule.mu_x, &m_x, &state.x_curr);
    let y_next = ascend_y(problem, &state.y_curr, schedule.mu_y, &m_y, project_y);
    Ok(StepOutput {
        next_state: state.advance(x_next, y_next),
        diagnostics: StepDiagnostics {
            m_x_norm: norm2(&m_x),
            m_y_norm: norm2(&m_y),
            ..Default::default()
        },
        next_momentum: MomentumState::new(m_x, m_y),
        sample_used: xi,
        second_sample: None,
    })
}

/// One SAGDA iteration: x descends on a fresh sample, then y ascends on a
/// second fresh sample evaluated at the updated x. The momentum is passed
/// through untouched; diagnostics report the two gradient norms.
pub fn sagda_step(
    state: &IterateState,
    momentum: &MomentumState,
    schedule: &HyperSchedule,
    problem: &dyn MinimaxProblem,
    rng: &mut dyn RngCore,
    project_y: bool,
) -> Result<StepOutput, OracleError> {
    let xi = problem.draw_sample(rng);
    let gx = problem
        .sample_gradient(&state.x_curr, &state.y_curr, xi)?
        .gx;
    let x_next = vector::axpy(-schedule.mu_x, &gx, &state.x_curr);
    let xi2 = problem.draw_sample(rng);
    let gy = problem.sample_gradient(&x_next, &state.y_curr, xi2)?.gy;
    let y_next = ascend_y(problem, &state.y_curr, schedule.mu_y, &gy, project_y);
    Ok(StepOutput {
        next_state: state.advance(x_next, y_next),
        next_momentum: momentum.clone(),
        sample_used: xi,
        second_sample: Some(xi2),
        diagnostics: StepDiagnostics {
            m_x_norm: norm2(&gx),
            m_y_norm: norm2(&gy),
            ..Default::default()
        },
    })
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error("oracle error at iteration {iter}: {source}")]
    Oracle {
        iter: usize,
        #[source]
        source: OracleError,
    },
    #[error("run length {requested} does not match the schedule horizon {horizon}")]
    HorizonMismatch { requested: usize, horizon: usize },
    #[error(
        "initial point has wrong dimensions: x {x} (expected {dim_x}), y {y} (expected {dim_y})"
    )]
    InitDimension {
        x: usize,
        y: usize,
        dim_x: usize,
        dim_y: usize,
    },
}

/// Initial momentum: one fresh stochastic gradient at `z0` (clipped as well
/// for HCMM-1). SAGDA carries no momentum and draws nothing.
pub fn initial_momentum(
    optimizer: &Optimizer,
    problem: &dyn MinimaxProblem,
    schedule: &HyperSchedule,
    state: &IterateState,
    rng: &mut dyn RngCore,
) -> Result<MomentumState, OracleError> {
    if optimizer.kind == OptimizerKind::Sagda {
        return Ok(MomentumState::zeros(problem.dim_x(), problem.dim_y()));
    }
    let xi = problem.draw_sample(rng);
    let g = problem.sample_gradient(&state.x_curr, &state.y_curr, xi)?;
    Ok(if optimizer.kind.uses_clipping() {
        MomentumState::with_clipping(g.gx, g.gy, schedule.clip_threshold, schedule.clip_norm)
    } else {
        MomentumState::new(g.gx, g.gy)
    })
}

/// Runs `horizon` steps from `(x0, y0)` with a fresh RNG seeded by `seed`,
/// calling `observer(z_i, step_i)` after each step. Returns the final state
/// and momentum.
///
/// The run starts with `z_{-1} = z_0`, so the first correction term is zero.
#[allow(clippy::too_many_arguments)]
pub fn run_with<F>(
    optimizer: &Optimizer,
    problem: &dyn MinimaxProblem,
    schedule: &HyperSchedule,
    x0: Vec64,
    mut y0: Vec64,
    horizon: usize,
    seed: u64,
    mut observer: F,
) -> Result<(IterateState, MomentumState), RunError>
where
    F: FnMut(&IterateState, &StepOutput),
{
    if horizon > 0 && horizon != schedule.horizon {
        return Err(RunError::HorizonMismatch {
            requested: horizon,
            horizon: schedule.horizon,
        });
    }
    if x0.len() != problem.dim_x() || y0.len() != problem.dim_y() {
        return Err(RunError::InitDimension {
            x: x0.len(),
            y: y0.len(),
            dim_x: problem.dim_x(),
            dim_y: problem.dim_y(),
        });
    }
    if optimizer.project_y {
        problem.project_y(&mut y0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = IterateState::new(x0, y0);
    if horizon == 0 {
        return Ok((
            state,
            MomentumState::zeros(problem.dim_x(), problem.dim_y()),
        ));
    }
    let mut momentum = initial_momentum(optimizer, problem, schedule, &state, &mut rng)
        .map_err(|source| RunError::Oracle { iter: 0, source })?;
    for iter in 0..horizon {
        let out = optimizer
            .step(&state, &momentum, schedule, problem, &mut rng)
            .map_err(|source| RunError::Oracle { iter, source })?;
        observer(&state, &out);
        state = out.next_state;
        momentum = out.next_momentum;
    }
    Ok((state, momentum))
}

/// Collects every [`StepOutput`] of a run.
pub fn run(
    optimizer: &Optimizer,
    problem: &dyn MinimaxProblem,
    schedule: &HyperSchedule,
    x0: Vec64,
    y0: Vec64,
    horizon: usize,
    seed: u64,
) -> Result<Vec<StepOutput>, RunError> {
    let mut trace = Vec::with_capacity(horizon);
    run_with(
        optimizer,
        problem,
        schedule,
        x0,
        y0,
        horizon,
        seed,
        |_, out| trace.push(out.clone()),
    )?;
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn momentum_update_extremes() {
        let m = [1.0, -2.0];
        let g = [0.5, 0.25];
        let h = [3.0, 4.0];
        assert_eq!(hcmm_momentum_update(&m, 1.0, &g, &h), g.to_vec());
        assert_eq!(hcmm_momentum_update(&m, 0.0, &g, &[0.0, 0.0]), m.to_vec());
        assert_eq!(hcmm_momentum_update(&m, 0.5, &g, &h), vec![2.25, 1.125]);
    }

    #[test]
    fn kind_names() {
        assert_eq!(OptimizerKind::hcmm1().name(), "hcmm1");
        assert_eq!(OptimizerKind::hcmm2().name(), "hcmm2");
        assert!(OptimizerKind::hcmm1().uses_clipping());
        assert!(!OptimizerKind::StormGda.uses_clipping());
    }
}
