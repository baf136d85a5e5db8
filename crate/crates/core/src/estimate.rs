//! Empirical estimates of the problem constants a schedule needs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::oracle::{MinimaxProblem, OracleError};
use crate::vector::{self, norm2_pair};

/// Spectral-norm estimate of the full Hessian `d^2 J(x, y)` by power
/// iteration on the full HVP, started from a seeded Gaussian direction.
///
/// For quadratics the Hessian is constant and this estimates `L_f`.
pub fn power_iteration_lipschitz(
    problem: &dyn MinimaxProblem,
    x: &[f64],
    y: &[f64],
    iters: usize,
    seed: u64,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vx: Vec<f64> = (0..problem.dim_x())
        .map(|_| rng.sample(StandardNormal))
        .collect();
    let mut vy: Vec<f64> = (0..problem.dim_y())
        .map(|_| rng.sample(StandardNormal))
        .collect();
    let mut estimate = 0.0;
    for _ in 0..iters {
        let len = norm2_pair(&vx, &vy);
        if len == 0.0 {
            return 0.0;
        }
        vx = vector::scale(1.0 / len, &vx);
        vy = vector::scale(1.0 / len, &vy);
        let h = problem.full_hvp(x, y, &vx, &vy);
        estimate = norm2_pair(&h.hx, &h.hy);
        vx = h.hx;
        vy = h.hy;
    }
    estimate
}

/// Largest stochastic gradient norm `||grad_z Q(x, y; xi)||` over `draws`
/// seeded samples at `(x, y)`, an empirical stand-in for `G`.
pub fn max_sample_gradient_norm(
    problem: &dyn MinimaxProblem,
    x: &[f64],
    y: &[f64],
    draws: usize,
    seed: u64,
) -> Result<f64, OracleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: f64 = 0.0;
    for _ in 0..draws {
        let xi = problem.draw_sample(&mut rng);
        let g = problem.sample_gradient(x, y, xi)?;
        best = best.max(norm2_pair(&g.gx, &g.gy));
    }
    Ok(best)
}
