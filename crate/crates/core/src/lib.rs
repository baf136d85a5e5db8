//! Stochastic minimax optimization with bias-corrected Hessian momentum.
//!
//! The crate provides
//!
//! - a generic problem oracle ([`oracle::MinimaxProblem`]) with single-sample
//!   gradients and matrix-free block Hessian-vector products,
//! - the HCMM-1 / HCMM-2 methods and the STORM-GDA and SAGDA baselines
//!   ([`optimizers`]),
//! - theorem-driven step-size schedules ([`schedule`]),
//! - distributionally robust logistic regression and synthetic quadratic
//!   problems ([`problems`]), a LIBSVM loader ([`libsvm`]) and simplex
//!   projection ([`simplex`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod estimate;
pub mod libsvm;
pub mod optimizers;
pub mod oracle;
pub mod problems;
pub mod schedule;
pub mod simplex;
pub mod state;
pub mod vector;

pub use libsvm::{load_dataset, Dataset, LoadOptions};
pub use optimizers::{run, run_with, Optimizer, OptimizerKind, RunError, StepOutput};
pub use oracle::{
    evaluate_p, metric_ci, GradPair, HvpResult, InnerMaxReport, MinimaxProblem, SampleId,
};
pub use problems::{PlToyProblem, QuadraticMinimaxProblem, RobustLogisticProblem};
pub use schedule::{schedule_hcmm1, schedule_hcmm2, HyperSchedule, ProblemConstants};
pub use simplex::{project_simplex, SimplexPoint};
pub use state::{clip_momentum, IterateState, MomentumState};
pub use vector::Vec64;
