//! Benchmark fixtures shared by the targets in `benches/`.

use minimax_core::problems::{
    synthetic_dataset, QuadraticMinimaxProblem, QuadraticSpec, RobustLogisticParams,
    RobustLogisticProblem,
};

/// Robust logistic regression on a synthetic `n x d` dataset of density 0.2.
pub fn logistic(n: usize, d: usize) -> RobustLogisticProblem {
    RobustLogisticProblem::new(
        synthetic_dataset(n, d, 0.2, 7),
        RobustLogisticParams::default(),
    )
    .expect("synthetic data is valid")
}

pub fn quadratic(d: usize) -> QuadraticMinimaxProblem {
    let spec = QuadraticSpec {
        d,
        m: d,
        noise_sigma: 0.1,
        noise_sigma_h: 0.01,
        seed: 1,
        ..Default::default()
    };
    QuadraticMinimaxProblem::random(&spec).expect("default spectrum is valid")
}
