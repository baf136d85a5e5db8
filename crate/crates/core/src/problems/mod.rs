//! Concrete minimax problems.

pub mod quadratic;
pub mod robust_logistic;

pub use quadratic::{PlToyProblem, PlToySpec, QuadraticMinimaxProblem, QuadraticSpec};
pub use robust_logistic::{
    synthetic_dataset, ProblemError, RobustLogisticParams, RobustLogisticProblem,
};
