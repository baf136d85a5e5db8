//! The minimax problem interface and problem-independent diagnostics.
//!
//! A [`MinimaxProblem`] exposes single-sample gradients and block
//! Hessian-vector products of a loss `Q(x, y; xi)` whose expectation over the
//! sample space is the risk `J(x, y)`. The functions in this module check and
//! consume that interface: a central-difference HVP reference, the worst-case
//! objective `P(x) = max_y J(x, y)` and the convergence metric `C_i`.

use rand::RngCore;
use thiserror::Error;

use crate::state::{IterateState, MomentumState};
use crate::vector::{self, norm2, norm2_pair, Vec64};

/// Identifies one stochastic sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SampleId {
    /// Row of a finite dataset.
    Index(usize),
    /// Seed of a synthetic noise draw.
    Draw(u64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("sample index {index} out of range for {n} samples")]
    SampleOutOfRange { index: usize, n: usize },
    #[error("sample {0:?} does not belong to this problem's sample space")]
    WrongSampleKind(SampleId),
    #[error("dimension mismatch for `{what}`: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("problem does not support {0}")]
    Unsupported(&'static str),
}

/// Gradient with respect to the x and y blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct GradPair {
    pub gx: Vec64,
    pub gy: Vec64,
}

/// Block Hessian-vector product:
/// `hx = H_xx dx + H_xy dy`, `hy = H_yx dx + H_yy dy`.
#[derive(Debug, Clone, PartialEq)]
pub struct HvpResult {
    pub hx: Vec64,
    pub hy: Vec64,
}

/// Closed-form inner maximizer, available on synthetic problems.
pub trait ClosedFormMax {
    /// A maximizer `y^o(x)` of `J(x, .)` (minimum-norm when not unique).
    fn y_opt(&self, x: &[f64]) -> Vec64;
    fn p_value(&self, x: &[f64]) -> f64;
    fn grad_p(&self, x: &[f64]) -> Vec64;
}

/// A stochastic minimax problem `min_x max_y E_xi Q(x, y; xi)`.
///
/// Implementations are immutable; every method is a pure function of its
/// arguments, so a problem can be shared across threads.
pub trait MinimaxProblem: Send + Sync {
    fn dim_x(&self) -> usize;
    fn dim_y(&self) -> usize;

    /// Size of the sample space when it is finite.
    fn num_samples(&self) -> Option<usize>;

    /// Draws one sample uniformly from the sample space.
    fn draw_sample(&self, rng: &mut dyn RngCore) -> SampleId;

    fn sample_objective(&self, x: &[f64], y: &[f64], xi: SampleId) -> Result<f64, OracleError>;
    fn objective(&self, x: &[f64], y: &[f64]) -> f64;

    fn sample_gradient(&self, x: &[f64], y: &[f64], xi: SampleId) -> Result<GradPair, OracleError>;
    fn full_gradient(&self, x: &[f64], y: &[f64]) -> GradPair;

    fn sample_hvp(
        &self,
        x: &[f64],
        y: &[f64],
        xi: SampleId,
        dx: &[f64],
        dy: &[f64],
    ) -> Result<HvpResult, OracleError>;
    fn full_hvp(&self, x: &[f64], y: &[f64], dx: &[f64], dy: &[f64]) -> HvpResult;

    /// Projection onto the feasible set of y. Identity when unconstrained.
    fn project_y(&self, _y: &mut [f64]) {}

    /// Whether [`MinimaxProblem::project_y`] is a nontrivial projection.
    fn constrains_y(&self) -> bool {
        false
    }

    /// Curvature bound `L_yy` of `-J(x, .)`, used as the inverse inner step.
    fn y_curvature(&self) -> f64;

    /// Feasible starting point for the inner maximization.
    fn default_y(&self) -> Vec64 {
        vec![0.0; self.dim_y()]
    }

    fn closed_form(&self) -> Option<&dyn ClosedFormMax> {
        None
    }

    /// Lipschitz constant `L_f` of the full gradient if known.
    fn gradient_lipschitz(&self) -> Option<f64> {
        None
    }
}

pub(crate) fn check_dim(
    what: &'static str,
    expected: usize,
    got: usize,
) -> Result<(), OracleError> {
    if expected == got {
        Ok(())
    } else {
        Err(OracleError::DimensionMismatch {
            what,
            expected,
            got,
        })
    }
}

/// Default base step of [`finite_difference_hvp`].
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Central-difference block HVP of the single-sample gradient.
///
/// The step along the unit direction is `h * max(1, ||z||)`.
pub fn finite_difference_hvp(
    problem: &dyn MinimaxProblem,
    x: &[f64],
    y: &[f64],
    xi: SampleId,
    dx: &[f64],
    dy: &[f64],
    h: f64,
) -> Result<HvpResult, OracleError> {
    check_dim("dx", problem.dim_x(), dx.len())?;
    check_dim("dy", problem.dim_y(), dy.len())?;
    let dnorm = norm2_pair(dx, dy);
    if dnorm == 0.0 {
        return Ok(HvpResult {
            hx: vec![0.0; dx.len()],
            hy: vec![0.0; dy.len()],
        });
    }
    let t = h * norm2_pair(x, y).max(1.0) / dnorm;
    let xp = vector::axpy(t, dx, x);
    let yp = vector::axpy(t, dy, y);
    let xm = vector::axpy(-t, dx, x);
    let ym = vector::axpy(-t, dy, y);
    let gp = problem.sample_gradient(&xp, &yp, xi)?;
    let gm = problem.sample_gradient(&xm, &ym, xi)?;
    let inv = 1.0 / (2.0 * t);
    Ok(HvpResult {
        hx: gp
            .gx
            .iter()
            .zip(&gm.gx)
            .map(|(a, b)| (a - b) * inv)
            .collect(),
        hy: gp
            .gy
            .iter()
            .zip(&gm.gy)
            .map(|(a, b)| (a - b) * inv)
            .collect(),
    })
}

/// Outcome of the inner maximization behind `P(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerMaxReport {
    pub y_star: Vec64,
    pub p_value: f64,
    /// Norm of the projected-gradient mapping at `y_star`.
    pub residual: f64,
    pub iters_used: usize,
    /// `false` when the iteration cap was hit before `residual <= tol`.
    pub converged: bool,
}

/// Projected-gradient mapping `L (proj(y + grad / L) - y)` of `J(x, .)` at `y`.
///
/// Returns the mapping norm and the projected point.
pub fn projected_gradient_mapping(
    problem: &dyn MinimaxProblem,
    x: &[f64],
    y: &[f64],
) -> (f64, Vec64) {
    let l = problem.y_curvature();
    let g = problem.full_gradient(x, y).gy;
    let mut next = vector::axpy(1.0 / l, &g, y);
    problem.project_y(&mut next);
    (l * vector::dist2(&next, y), next)
}

/// Evaluates `P(x) = max_y J(x, y)`.
///
/// Problems with a closed-form maximizer return it with zero residual. Others
/// run projected gradient ascent with step `1 / L_yy` from the problem's
/// default y.
pub fn evaluate_p(
    problem: &dyn MinimaxProblem,
    x: &[f64],
    tol: f64,
    max_iters: usize,
) -> InnerMaxReport {
    if let Some(cf) = problem.closed_form() {
        return InnerMaxReport {
            y_star: cf.y_opt(x),
            p_value: cf.p_value(x),
            residual: 0.0,
            iters_used: 0,
            converged: true,
        };
    }
    evaluate_p_from(problem, x, problem.default_y(), tol, max_iters)
}

/// Iterative inner maximization warm-started at `y_start`.
pub fn evaluate_p_from(
    problem: &dyn MinimaxProblem,
    x: &[f64],
    mut y: Vec64,
    tol: f64,
    max_iters: usize,
) -> InnerMaxReport {
    assert!(tol > 0.0, "tolerance must be positive");
    problem.project_y(&mut y);
    let mut iters = 0;
    loop {
        let (residual, next) = projected_gradient_mapping(problem, x, &y);
        let converged = residual <= tol;
        if converged || iters >= max_iters {
            if !converged {
                log::warn!(
                    "inner maximization hit the {max_iters}-iteration cap (residual {residual:e})"
                );
            }
            return InnerMaxReport {
                p_value: problem.objective(x, &y),
                y_star: y,
                residual,
                iters_used: iters,
                converged,
            };
        }
        y = next;
        iters += 1;
    }
}

/// `C_i = L_f ||y^o(x_i) - y_i|| + ||grad_x J(x_i, y_i) - m^c_x|| + ||m^c_x||`.
///
/// Uses the clipped x-momentum when present and the raw one otherwise.
pub fn metric_ci(
    problem: &dyn MinimaxProblem,
    state: &IterateState,
    momentum: &MomentumState,
) -> Result<f64, OracleError> {
    let cf = problem
        .closed_form()
        .ok_or(OracleError::Unsupported("closed-form inner maximizer"))?;
    let l_f = problem
        .gradient_lipschitz()
        .ok_or(OracleError::Unsupported(
            "known gradient Lipschitz constant",
        ))?;
    let x = &state.x_curr;
    let y = &state.y_curr;
    let y_opt = cf.y_opt(x);
    let gx = problem.full_gradient(x, y).gx;
    let m = momentum.effective_x();
    Ok(l_f * vector::dist2(&y_opt, y) + vector::dist2(&gx, m) + norm2(m))
}
