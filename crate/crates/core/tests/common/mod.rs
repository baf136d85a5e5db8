#![allow(dead_code)]

use minimax_core::libsvm::Dataset;
use minimax_core::problems::{synthetic_dataset, RobustLogisticParams, RobustLogisticProblem};
use minimax_core::simplex::project_simplex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n)
        .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

pub fn random_simplex(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n)
        .map(|_| rng.random::<f64>() * 2.0 / n as f64)
        .collect();
    project_simplex(&v).unwrap().into_inner()
}

pub fn logistic_instance(n: usize, d: usize, seed: u64) -> RobustLogisticProblem {
    let data: Dataset = synthetic_dataset(n, d, 0.5, seed);
    RobustLogisticProblem::new(data, RobustLogisticParams::default()).unwrap()
}

pub fn concat(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().chain(b).copied().collect()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `||a - b|| / ||b||`, with `0` when both are zero.
pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let den = norm(b);
    if den == 0.0 {
        norm(&diff)
    } else {
        norm(&diff) / den
    }
}

/// Largest `|a_j - b_j|` relative to `max(|b_j|, max_k |b_k|)`.
pub fn elementwise_rel_err(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let den = y.abs().max(scale);
            if den == 0.0 {
                (x - y).abs()
            } else {
                (x - y).abs() / den
            }
        })
        .fold(0.0, f64::max)
}

use minimax_core::oracle::{GradPair, HvpResult, MinimaxProblem, OracleError, SampleId};
use std::sync::atomic::{AtomicUsize, Ordering};

/// Delegating problem that counts sample draws and oracle calls.
pub struct Counting<P> {
    pub inner: P,
    pub draws: AtomicUsize,
    pub gradients: AtomicUsize,
    pub hvps: AtomicUsize,
}

impl<P> Counting<P> {
    pub fn new(inner: P) -> Self {
        Counting {
            inner,
            draws: AtomicUsize::new(0),
            gradients: AtomicUsize::new(0),
            hvps: AtomicUsize::new(0),
        }
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        (
            self.draws.load(Ordering::SeqCst),
            self.gradients.load(Ordering::SeqCst),
            self.hvps.load(Ordering::SeqCst),
        )
    }

    pub fn reset(&self) {
        self.draws.store(0, Ordering::SeqCst);
        self.gradients.store(0, Ordering::SeqCst);
        self.hvps.store(0, Ordering::SeqCst);
    }
}

impl<P: MinimaxProblem> MinimaxProblem for Counting<P> {
    fn dim_x(&self) -> usize {
        self.inner.dim_x()
    }
    fn dim_y(&self) -> usize {
        self.inner.dim_y()
    }
    fn num_samples(&self) -> Option<usize> {
        self.inner.num_samples()
    }
    fn draw_sample(&self, rng: &mut dyn rand::RngCore) -> SampleId {
        self.draws.fetch_add(1, Ordering::SeqCst);
        self.inner.draw_sample(rng)
    }
    fn sample_objective(&self, x: &[f64], y: &[f64], xi: SampleId) -> Result<f64, OracleError> {
        self.inner.sample_objective(x, y, xi)
    }
    fn objective(&self, x: &[f64], y: &[f64]) -> f64 {
        self.inner.objective(x, y)
    }
    fn sample_gradient(&self, x: &[f64], y: &[f64], xi: SampleId) -> Result<GradPair, OracleError> {
        self.gradients.fetch_add(1, Ordering::SeqCst);
        self.inner.sample_gradient(x, y, xi)
    }
    fn full_gradient(&self, x: &[f64], y: &[f64]) -> GradPair {
        self.inner.full_gradient(x, y)
    }
    fn sample_hvp(
        &self,
        x: &[f64],
        y: &[f64],
        xi: SampleId,
        dx: &[f64],
        dy: &[f64],
    ) -> Result<HvpResult, OracleError> {
        self.hvps.fetch_add(1, Ordering::SeqCst);
        self.inner.sample_hvp(x, y, xi, dx, dy)
    }
    fn full_hvp(&self, x: &[f64], y: &[f64], dx: &[f64], dy: &[f64]) -> HvpResult {
        self.inner.full_hvp(x, y, dx, dy)
    }
    fn project_y(&self, y: &mut [f64]) {
        self.inner.project_y(y)
    }
    fn constrains_y(&self) -> bool {
        self.inner.constrains_y()
    }
    fn y_curvature(&self) -> f64 {
        self.inner.y_curvature()
    }
    fn default_y(&self) -> Vec<f64> {
        self.inner.default_y()
    }
}
