//! Distributionally robust logistic regression.
//!
//! `J(x, y) = sum_i y_i Q_i(x) - V(y) + g(x)` over `y` in the simplex, with
//! `Q_i(x) = log(1 + exp(-l_i r_i^T x))`,
//! `g(x) = lambda2 sum_j rho x_j^2 / (1 + rho x_j^2)` and
//! `V(y) = lambda1 / 2 ||n y - 1||^2`.
//!
//! The single-sample loss is `Q(x, y; i) = n y_i Q_i(x) - V(y) + g(x)` with
//! `i` uniform, which is unbiased for `J`. The regularizers are deterministic.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::libsvm::Dataset;
use crate::oracle::{check_dim, GradPair, HvpResult, MinimaxProblem, OracleError, SampleId};
use crate::simplex::project_simplex_in_place;
use crate::vector::Vec64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("label at row {row} is {label}, expected +1 or -1")]
    BadLabel { row: usize, label: f64 },
    #[error("parameter `{0}` must be positive")]
    NonPositive(&'static str),
    #[error("dataset must have at least one row and one feature")]
    EmptyDataset,
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustLogisticParams {
    /// Defaults to `1 / n^2` when `None`.
    pub lambda1: Option<f64>,
    pub lambda2: f64,
    pub rho: f64,
}

impl Default for RobustLogisticParams {
    fn default() -> Self {
        RobustLogisticParams {
            lambda1: None,
            lambda2: 0.001,
            rho: 10.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RobustLogisticProblem {
    data: Dataset,
    lambda1: f64,
    lambda2: f64,
    rho: f64,
}

#[inline]
fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(u))` without overflow.
#[inline]
fn softplus(u: f64) -> f64 {
    u.max(0.0) + (-u.abs()).exp().ln_1p()
}

impl RobustLogisticProblem {
    pub fn new(data: Dataset, params: RobustLogisticParams) -> Result<Self, ProblemError> {
        if data.n() == 0 || data.d() == 0 {
            return Err(ProblemError::EmptyDataset);
        }
        if let Some((row, &label)) = data
            .labels()
            .iter()
            .enumerate()
            .find(|(_, &l)| l != 1.0 && l != -1.0)
        {
            return Err(ProblemError::BadLabel { row, label });
        }
        let n = data.n() as f64;
        let lambda1 = params.lambda1.unwrap_or(1.0 / (n * n));
        for (name, v) in [
            ("lambda1", lambda1),
            ("lambda2", params.lambda2),
            ("rho", params.rho),
        ] {
            if !(v > 0.0) {
                return Err(ProblemError::NonPositive(name));
            }
        }
        Ok(RobustLogisticProblem {
            data,
            lambda1,
            lambda2: params.lambda2,
            rho: params.rho,
        })
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    fn n(&self) -> usize {
        self.data.n()
    }

    fn row_dot(&self, i: usize, v: &[f64]) -> f64 {
        let (idx, val) = self.data.row(i);
        idx.iter().zip(val).map(|(&j, &r)| r * v[j]).sum()
    }

    fn row_axpy(&self, i: usize, alpha: f64, out: &mut [f64]) {
        let (idx, val) = self.data.row(i);
        for (&j, &r) in idx.iter().zip(val) {
            out[j] += alpha * r;
        }
    }

    /// `Q_i(x)`.
    pub fn logistic_loss(&self, i: usize, x: &[f64]) -> f64 {
        let s = self.data.labels()[i] * self.row_dot(i, x);
        softplus(-s)
    }

    /// Scalar `c` with `grad Q_i(x) = c r_i`, and `Q_i''` along `r_i`.
    fn loss_derivatives(&self, i: usize, x: &[f64]) -> (f64, f64, f64) {
        let l = self.data.labels()[i];
        let s = l * self.row_dot(i, x);
        let q = softplus(-s);
        let coef = -l * sigmoid(-s);
        let curv = sigmoid(s) * sigmoid(-s);
        (q, coef, curv)
    }

    /// `grad Q_i(x)` as a dense vector.
    pub fn logistic_gradient(&self, i: usize, x: &[f64]) -> Vec64 {
        let (_, coef, _) = self.loss_derivatives(i, x);
        let mut g = vec![0.0; self.data.d()];
        self.row_axpy(i, coef, &mut g);
        g
    }

    pub fn regularizer(&self, x: &[f64]) -> f64 {
        let rho = self.rho;
        self.lambda2
            * x.iter()
                .map(|&v| rho * v * v / (1.0 + rho * v * v))
                .sum::<f64>()
    }

    fn regularizer_grad(&self, x: &[f64]) -> Vec64 {
        let rho = self.rho;
        x.iter()
            .map(|&v| {
                let den = 1.0 + rho * v * v;
                2.0 * self.lambda2 * rho * v / (den * den)
            })
            .collect()
    }

    fn regularizer_curvature(&self, x: &[f64]) -> Vec64 {
        let rho = self.rho;
        x.iter()
            .map(|&v| {
                let den = 1.0 + rho * v * v;
                2.0 * self.lambda2 * rho * (1.0 - 3.0 * rho * v * v) / (den * den * den)
            })
            .collect()
    }

    pub fn divergence(&self, y: &[f64]) -> f64 {
        let n = self.n() as f64;
        0.5 * self.lambda1 * y.iter().map(|&v| (n * v - 1.0).powi(2)).sum::<f64>()
    }

    /// `-grad V(y) = -lambda1 n (n y - 1)`.
    fn neg_divergence_grad(&self, y: &[f64]) -> Vec64 {
        let n = self.n() as f64;
        y.iter()
            .map(|&v| -self.lambda1 * n * (n * v - 1.0))
            .collect()
    }

    /// Analytic gradient Lipschitz bound valid for `y` in the simplex:
    /// `n max||r_i||^2 / 4 + 2 lambda2 rho + lambda1 n^2 + n max||r_i||`.
    pub fn lipschitz_bound(&self) -> f64 {
        let n = self.n() as f64;
        let max_r2 = (0..self.n())
            .map(|i| self.data.row(i).1.iter().map(|v| v * v).sum::<f64>())
            .fold(0.0, f64::max);
        n * max_r2 / 4.0 + 2.0 * self.lambda2 * self.rho + self.lambda1 * n * n + n * max_r2.sqrt()
    }

    fn index(&self, xi: SampleId) -> Result<usize, OracleError> {
        match xi {
            SampleId::Index(i) if i < self.n() => Ok(i),
            SampleId::Index(i) => Err(OracleError::SampleOutOfRange {
                index: i,
                n: self.n(),
            }),
            other => Err(OracleError::WrongSampleKind(other)),
        }
    }

    fn check_xy(&self, x: &[f64], y: &[f64]) -> Result<(), OracleError> {
        check_dim("x", self.data.d(), x.len())?;
        check_dim("y", self.n(), y.len())
    }
}

impl MinimaxProblem for RobustLogisticProblem {
    fn dim_x(&self) -> usize {
        self.data.d()
    }

    fn dim_y(&self) -> usize {
        self.n()
    }

    fn num_samples(&self) -> Option<usize> {
        Some(self.n())
    }

    fn draw_sample(&self, rng: &mut dyn RngCore) -> SampleId {
        SampleId::Index(rng.random_range(0..self.n()))
    }

    fn sample_objective(&self, x: &[f64], y: &[f64], xi: SampleId) -> Result<f64, OracleError> {
        self.check_xy(x, y)?;
        let i = self.index(xi)?;
        let n = self.n() as f64;
        Ok(n * y[i] * self.logistic_loss(i, x) - self.divergence(y) + self.regularizer(x))
    }

    fn objective(&self, x: &[f64], y: &[f64]) -> f64 {
        let risk: f64 = (0..self.n()).map(|i| y[i] * self.logistic_loss(i, x)).sum();
        risk - self.divergence(y) + self.regularizer(x)
    }

    fn sample_gradient(&self, x: &[f64], y: &[f64], xi: SampleId) -> Result<GradPair, OracleError> {
        self.check_xy(x, y)?;
        let i = self.index(xi)?;
        let n = self.n() as f64;
        let (q, coef, _) = self.loss_derivatives(i, x);
        let mut gx = self.regularizer_grad(x);
        self.row_axpy(i, n * y[i] * coef, &mut gx);
        let mut gy = self.neg_divergence_grad(y);
        gy[i] += n * q;
        Ok(GradPair { gx, gy })
    }

    fn full_gradient(&self, x: &[f64], y: &[f64]) -> GradPair {
        let mut gx = self.regularizer_grad(x);
        let mut gy = self.neg_divergence_grad(y);
        for i in 0..self.n() {
            let (q, coef, _) = self.loss_derivatives(i, x);
            self.row_axpy(i, y[i] * coef, &mut gx);
            gy[i] += q;
        }
        GradPair { gx, gy }
    }

    fn sample_hvp(
        &self,
        x: &[f64],
        y: &[f64],
        xi: SampleId,
        dx: &[f64],
        dy: &[f64],
    ) -> Result<HvpResult, OracleError> {
        self.check_xy(x, y)?;
        check_dim("dx", self.data.d(), dx.len())?;
        check_dim("dy", self.n(), dy.len())?;
        let i = self.index(xi)?;
        let n = self.n() as f64;
        let (_, coef, curv) = self.loss_derivatives(i, x);
        let r_dx = self.row_dot(i, dx);

        let mut hx: Vec64 = self
            .regularizer_curvature(x)
            .iter()
            .zip(dx)
            .map(|(c, d)| c * d)
            .collect();
        self.row_axpy(i, n * (y[i] * curv * r_dx + dy[i] * coef), &mut hx);

        let yy = -self.lambda1 * n * n;
        let mut hy: Vec64 = dy.iter().map(|d| yy * d).collect();
        hy[i] += n * coef * r_dx;
        Ok(HvpResult { hx, hy })
    }

    fn full_hvp(&self, x: &[f64], y: &[f64], dx: &[f64], dy: &[f64]) -> HvpResult {
        let n = self.n() as f64;
        let mut hx: Vec64 = self
            .regularizer_curvature(x)
            .iter()
            .zip(dx)
            .map(|(c, d)| c * d)
            .collect();
        let yy = -self.lambda1 * n * n;
        let mut hy: Vec64 = dy.iter().map(|d| yy * d).collect();
        for i in 0..self.n() {
            let (_, coef, curv) = self.loss_derivatives(i, x);
            let r_dx = self.row_dot(i, dx);
            self.row_axpy(i, y[i] * curv * r_dx + dy[i] * coef, &mut hx);
            hy[i] += coef * r_dx;
        }
        HvpResult { hx, hy }
    }

    fn project_y(&self, y: &mut [f64]) {
        project_simplex_in_place(y).expect("y is never empty for a valid problem");
    }

    fn constrains_y(&self) -> bool {
        true
    }

    fn y_curvature(&self) -> f64 {
        let n = self.n() as f64;
        self.lambda1 * n * n
    }

    fn default_y(&self) -> Vec64 {
        vec![1.0 / self.n() as f64; self.n()]
    }

    fn gradient_lipschitz(&self) -> Option<f64> {
        Some(self.lipschitz_bound())
    }
}

/// Random sparse binary-classification dataset.
///
/// Each entry is nonzero with probability `density` and standard normal;
/// labels are the sign of a random linear score plus unit noise.
pub fn synthetic_dataset(n: usize, d: usize, density: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let mut row: Vec<(usize, f64)> = Vec::new();
        for j in 0..d {
            if rng.random::<f64>() < density {
                row.push((j, rng.sample::<f64, _>(StandardNormal)));
            }
        }
        let score: f64 =
            row.iter().map(|&(j, v)| w[j] * v).sum::<f64>() + rng.sample::<f64, _>(StandardNormal);
        labels.push(if score > 0.0 { 1.0 } else { -1.0 });
        rows.push(row);
    }
    Dataset::from_rows(rows, labels, d)
}
