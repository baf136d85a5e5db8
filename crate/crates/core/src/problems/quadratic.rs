//! Synthetic quadratic minimax problems with closed-form inner maxima.
//!
//! Both problems share the form `J(x, y) = 1/2 x^T A x + x^T B y - 1/2 y^T C y`.
//! [`QuadraticMinimaxProblem`] has `C = nu I` (strongly concave in y);
//! [`PlToyProblem`] has a singular positive semidefinite `C` (PL in y but not
//! strongly concave).
//!
//! Stochastic gradients add zero-mean Gaussian noise with `E||noise||^2 =
//! sigma^2` drawn from the sample seed. Seeds come in antithetic pairs: `2k` and
//! `2k + 1` produce opposite noise, so averaging any such pair recovers the
//! exact gradient. The same seed gives the same noise at every iterate.
//!
//! With `sigma_h > 0` each sample also carries a symmetric Hessian
//! perturbation `E`, so the sample function is
//! `f(z; xi) = J(z) + e^T z + 1/2 z^T E z` and its gradient and HVP are exact
//! derivatives of it.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::robust_logistic::ProblemError;
use crate::oracle::{
    check_dim, ClosedFormMax, GradPair, HvpResult, MinimaxProblem, OracleError, SampleId,
};
use crate::vector::Vec64;

const HESSIAN_STREAM: u64 = 0x9E37_79B9_7F4A_7C15;

fn dvec(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .fold(0.0, |acc: f64, v| acc.max(v.abs()))
}

fn is_symmetric(m: &DMatrix<f64>) -> bool {
    let scale = m.amax().max(1.0);
    (m - m.transpose()).amax() <= 1e-12 * scale
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Random orthogonal `n x n` matrix.
fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    gaussian_matrix(n, n, rng).qr().q()
}

/// `lo..=hi` in `k` evenly spaced values.
fn linspace(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    if k == 1 {
        return vec![lo];
    }
    (0..k)
        .map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64)
        .collect()
}

/// Shared oracle machinery of the quadratic family.
#[derive(Debug, Clone)]
struct QuadraticCore {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    noise_sigma: f64,
    noise_sigma_h: f64,
    /// Spectral norm of the full Hessian.
    l_f: f64,
}

impl QuadraticCore {
    fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        noise_sigma: f64,
        noise_sigma_h: f64,
    ) -> Result<Self, ProblemError> {
        let (d, m) = (a.nrows(), c.nrows());
        if d == 0 || m == 0 {
            return Err(ProblemError::Invalid("dimensions must be positive".into()));
        }
        if a.ncols() != d || b.nrows() != d || b.ncols() != m || c.ncols() != m {
            return Err(ProblemError::Invalid(format!(
                "inconsistent shapes: A {}x{}, B {}x{}, C {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols(),
                c.nrows(),
                c.ncols()
            )));
        }
        if !is_symmetric(&a) {
            return Err(ProblemError::Invalid("A must be symmetric".into()));
        }
        if !is_symmetric(&c) {
            return Err(ProblemError::Invalid("C must be symmetric".into()));
        }
        if !(noise_sigma >= 0.0) || !(noise_sigma_h >= 0.0) {
            return Err(ProblemError::Invalid(
                "noise scales must be nonnegative".into(),
            ));
        }
        let mut h = DMatrix::zeros(d + m, d + m);
        h.view_mut((0, 0), (d, d)).copy_from(&a);
        h.view_mut((0, d), (d, m)).copy_from(&b);
        h.view_mut((d, 0), (m, d)).copy_from(&b.transpose());
        h.view_mut((d, d), (m, m)).copy_from(&(-&c));
        let l_f = spectral_norm(&h);
        Ok(QuadraticCore {
            a,
            b,
            c,
            noise_sigma,
            noise_sigma_h,
            l_f,
        })
    }

    fn d(&self) -> usize {
        self.a.nrows()
    }

    fn m(&self) -> usize {
        self.c.nrows()
    }

    fn check(&self, x: &[f64], y: &[f64]) -> Result<(), OracleError> {
        check_dim("x", self.d(), x.len())?;
        check_dim("y", self.m(), y.len())
    }

    fn seed(xi: SampleId) -> Result<(u64, f64), OracleError> {
        match xi {
            SampleId::Draw(u) => Ok((u >> 1, if u & 1 == 1 { -1.0 } else { 1.0 })),
            other => Err(OracleError::WrongSampleKind(other)),
        }
    }

    fn objective(&self, x: &[f64], y: &[f64]) -> f64 {
        let (xv, yv) = (dvec(x), dvec(y));
        0.5 * xv.dot(&(&self.a * &xv)) + xv.dot(&(&self.b * &yv)) - 0.5 * yv.dot(&(&self.c * &yv))
    }

    fn gradient(&self, x: &[f64], y: &[f64]) -> GradPair {
        let (xv, yv) = (dvec(x), dvec(y));
        let gx = &self.a * &xv + &self.b * &yv;
        let gy = self.b.transpose() * &xv - &self.c * &yv;
        GradPair {
            gx: gx.as_slice().to_vec(),
            gy: gy.as_slice().to_vec(),
        }
    }

    fn hvp(&self, dx: &[f64], dy: &[f64]) -> HvpResult {
        let (dxv, dyv) = (dvec(dx), dvec(dy));
        let hx = &self.a * &dxv + &self.b * &dyv;
        let hy = self.b.transpose() * &dxv - &self.c * &dyv;
        HvpResult {
            hx: hx.as_slice().to_vec(),
            hy: hy.as_slice().to_vec(),
        }
    }

    /// Gradient noise with per-coordinate variance `sigma^2 / (d + m)`.
    fn gradient_noise(&self, xi: SampleId) -> Result<Option<Vec64>, OracleError> {
        let (seed, sign) = Self::seed(xi)?;
        if self.noise_sigma == 0.0 {
            return Ok(None);
        }
        let dim = self.d() + self.m();
        let s = sign * self.noise_sigma / (dim as f64).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(Some(
            (0..dim)
                .map(|_| s * rng.sample::<f64, _>(StandardNormal))
                .collect(),
        ))
    }

    /// Symmetric Hessian perturbation with entries of std `sigma_h / (d + m)`.
    fn hessian_noise(&self, xi: SampleId) -> Result<Option<DMatrix<f64>>, OracleError> {
        let (seed, sign) = Self::seed(xi)?;
        if self.noise_sigma_h == 0.0 {
            return Ok(None);
        }
        let dim = self.d() + self.m();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ HESSIAN_STREAM);
        let g = gaussian_matrix(dim, dim, &mut rng);
        let s = sign * self.noise_sigma_h / dim as f64 / std::f64::consts::SQRT_2;
        Ok(Some((&g + g.transpose()) * s))
    }

    fn sample_gradient(&self, x: &[f64], y: &[f64], xi: SampleId) -> Result<GradPair, OracleError> {
        self.check(x, y)?;
        let mut g = self.gradient(x, y);
        let d = self.d();
        if let Some(noise) = self.gradient_noise(xi)? {
            g.gx.iter_mut().zip(&noise[..d]).for_each(|(v, e)| *v += e);
            g.gy.iter_mut().zip(&noise[d..]).for_each(|(v, e)| *v += e);
        }
        if let Some(e) = self.hessian_noise(xi)? {
            let pert = e * dvec(&[x, y].concat());
            g.gx.iter_mut()
                .zip(&pert.as_slice()[..d])
                .for_each(|(v, p)| *v += p);
            g.gy.iter_mut()
                .zip(&pert.as_slice()[d..])
                .for_each(|(v, p)| *v += p);
        }
        Ok(g)
    }

    fn sample_objective(&self, x: &[f64], y: &[f64], xi: SampleId) -> Result<f64, OracleError> {
        self.check(x, y)?;
        let mut f = self.objective(x, y);
        let z = dvec(&[x, y].concat());
        if let Some(noise) = self.gradient_noise(xi)? {
            f += noise.iter().zip(z.iter()).map(|(e, v)| e * v).sum::<f64>();
        }
        if let Some(e) = self.hessian_noise(xi)? {
            f += 0.5 * z.dot(&(e * &z));
        }
        Ok(f)
    }

    fn sample_hvp(
        &self,
        x: &[f64],
        y: &[f64],
        xi: SampleId,
        dx: &[f64],
        dy: &[f64],
    ) -> Result<HvpResult, OracleError> {
        self.check(x, y)?;
        self.check(dx, dy)?;
        let mut h = self.hvp(dx, dy);
        if let Some(e) = self.hessian_noise(xi)? {
            let d = self.d();
            let dir: Vec64 = dx.iter().chain(dy).copied().collect();
            let pert = e * dvec(&dir);
            h.hx.iter_mut()
                .zip(&pert.as_slice()[..d])
                .for_each(|(v, p)| *v += p);
            h.hy.iter_mut()
                .zip(&pert.as_slice()[d..])
                .for_each(|(v, p)| *v += p);
        }
        Ok(h)
    }
}

macro_rules! impl_quadratic_oracle {
    ($ty:ty) => {
        impl MinimaxProblem for $ty {
            fn dim_x(&self) -> usize {
                self.core.d()
            }

            fn dim_y(&self) -> usize {
                self.core.m()
            }

            fn num_samples(&self) -> Option<usize> {
                None
            }

            fn draw_sample(&self, rng: &mut dyn RngCore) -> SampleId {
                SampleId::Draw(rng.next_u64())
            }

            fn sample_objective(
                &self,
                x: &[f64],
                y: &[f64],
                xi: SampleId,
            ) -> Result<f64, OracleError> {
                self.core.sample_objective(x, y, xi)
            }

            fn objective(&self, x: &[f64], y: &[f64]) -> f64 {
                self.core.objective(x, y)
            }

            fn sample_gradient(
                &self,
                x: &[f64],
                y: &[f64],
                xi: SampleId,
            ) -> Result<GradPair, OracleError> {
                self.core.sample_gradient(x, y, xi)
            }

            fn full_gradient(&self, x: &[f64], y: &[f64]) -> GradPair {
                self.core.gradient(x, y)
            }

            fn sample_hvp(
                &self,
                x: &[f64],
                y: &[f64],
                xi: SampleId,
                dx: &[f64],
                dy: &[f64],
            ) -> Result<HvpResult, OracleError> {
                self.core.sample_hvp(x, y, xi, dx, dy)
            }

            fn full_hvp(&self, _x: &[f64], _y: &[f64], dx: &[f64], dy: &[f64]) -> HvpResult {
                self.core.hvp(dx, dy)
            }

            fn y_curvature(&self) -> f64 {
                self.y_curvature
            }

            fn closed_form(&self) -> Option<&dyn ClosedFormMax> {
                Some(self)
            }

            fn gradient_lipschitz(&self) -> Option<f64> {
                Some(self.core.l_f)
            }
        }

        impl ClosedFormMax for $ty {
            fn y_opt(&self, x: &[f64]) -> Vec64 {
                (&self.y_map * dvec(x)).as_slice().to_vec()
            }

            fn p_value(&self, x: &[f64]) -> f64 {
                let xv = dvec(x);
                0.5 * xv.dot(&(&self.p_hessian * &xv))
            }

            fn grad_p(&self, x: &[f64]) -> Vec64 {
                (&self.p_hessian * dvec(x)).as_slice().to_vec()
            }
        }

        impl $ty {
            pub fn a(&self) -> &DMatrix<f64> {
                &self.core.a
            }

            pub fn b(&self) -> &DMatrix<f64> {
                &self.core.b
            }

            /// Hessian of `P(x)`, i.e. `A + B C^+ B^T`.
            pub fn p_hessian(&self) -> &DMatrix<f64> {
                &self.p_hessian
            }

            pub fn noise_sigma(&self) -> f64 {
                self.core.noise_sigma
            }

            /// Exact gradient Lipschitz constant (spectral norm of the Hessian).
            pub fn lipschitz(&self) -> f64 {
                self.core.l_f
            }
        }
    };
}

/// `J = 1/2 x^T A x + x^T B y - nu/2 ||y||^2` with unconstrained y.
#[derive(Debug, Clone)]
pub struct QuadraticMinimaxProblem {
    core: QuadraticCore,
    nu: f64,
    y_map: DMatrix<f64>,
    p_hessian: DMatrix<f64>,
    y_curvature: f64,
}

/// Parameters of a random [`QuadraticMinimaxProblem`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSpec {
    pub d: usize,
    pub m: usize,
    /// Eigenvalue range of the Hessian of `P`; eigenvalues are evenly spaced.
    pub spectrum: (f64, f64),
    pub nu: f64,
    /// Every nonzero singular value of `B`.
    pub coupling: f64,
    pub noise_sigma: f64,
    pub noise_sigma_h: f64,
    pub seed: u64,
}

impl Default for QuadraticSpec {
    fn default() -> Self {
        QuadraticSpec {
            d: 10,
            m: 10,
            spectrum: (0.5, 1.5),
            nu: 1.0,
            coupling: 1.0,
            noise_sigma: 0.0,
            noise_sigma_h: 0.0,
            seed: 0,
        }
    }
}

impl QuadraticMinimaxProblem {
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        nu: f64,
        noise_sigma: f64,
        noise_sigma_h: f64,
    ) -> Result<Self, ProblemError> {
        if !(nu > 0.0) {
            return Err(ProblemError::NonPositive("nu"));
        }
        let m = b.ncols();
        let c = DMatrix::identity(m, m) * nu;
        let core = QuadraticCore::new(a, b, c, noise_sigma, noise_sigma_h)?;
        let y_map = core.b.transpose() / nu;
        let p_hessian = &core.a + &core.b * &y_map;
        Ok(QuadraticMinimaxProblem {
            core,
            nu,
            y_map,
            p_hessian,
            y_curvature: nu,
        })
    }

    /// Random instance whose `P` has Hessian `Q diag(spectrum) Q^T`; `A` is
    /// indefinite whenever `coupling^2 / nu` exceeds the smallest eigenvalue.
    pub fn random(spec: &QuadraticSpec) -> Result<Self, ProblemError> {
        if spec.d == 0 || spec.m == 0 {
            return Err(ProblemError::Invalid("dimensions must be positive".into()));
        }
        if !(spec.nu > 0.0) {
            return Err(ProblemError::NonPositive("nu"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let q = random_orthogonal(spec.d, &mut rng);
        let eig = DMatrix::from_diagonal(&DVector::from_vec(linspace(
            spec.spectrum.0,
            spec.spectrum.1,
            spec.d,
        )));
        let s = &q * eig * q.transpose();
        let svd = gaussian_matrix(spec.d, spec.m, &mut rng).svd(true, true);
        let b = svd.u.expect("u requested") * svd.v_t.expect("v_t requested") * spec.coupling;
        let a = &s - &b * b.transpose() / spec.nu;
        let a = (&a + a.transpose()) * 0.5;
        Self::new(a, b, spec.nu, spec.noise_sigma, spec.noise_sigma_h)
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

impl_quadratic_oracle!(QuadraticMinimaxProblem);

/// `J = 1/2 x^T A x + x^T B y - 1/2 y^T C y` with `C` singular PSD and
/// `range(B^T)` inside `range(C)`, so the inner max is attained.
#[derive(Debug, Clone)]
pub struct PlToyProblem {
    core: QuadraticCore,
    delta: f64,
    y_map: DMatrix<f64>,
    p_hessian: DMatrix<f64>,
    y_curvature: f64,
}

/// Parameters of a random [`PlToyProblem`].
#[derive(Debug, Clone, PartialEq)]
pub struct PlToySpec {
    pub d: usize,
    pub m: usize,
    /// Rank of `C`; must be below `m`.
    pub rank: usize,
    pub spectrum: (f64, f64),
    /// Range of the nonzero eigenvalues of `C`.
    pub c_spectrum: (f64, f64),
    pub coupling: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for PlToySpec {
    fn default() -> Self {
        PlToySpec {
            d: 10,
            m: 10,
            rank: 5,
            spectrum: (0.5, 1.5),
            c_spectrum: (1.0, 2.0),
            coupling: 1.0,
            noise_sigma: 0.0,
            seed: 0,
        }
    }
}

impl PlToyProblem {
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        noise_sigma: f64,
    ) -> Result<Self, ProblemError> {
        let core = QuadraticCore::new(a, b, c, noise_sigma, 0.0)?;
        let eig = SymmetricEigen::new(core.c.clone());
        let max_eig = eig.eigenvalues.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let tol = 1e-10 * max_eig.max(1.0);
        if eig.eigenvalues.iter().any(|&v| v < -tol) {
            return Err(ProblemError::Invalid(
                "C must be positive semidefinite".into(),
            ));
        }
        if eig.eigenvalues.iter().all(|&v| v > tol) {
            return Err(ProblemError::Invalid("C must be singular".into()));
        }
        let m = core.m();
        let mut pinv = DMatrix::zeros(m, m);
        let mut range_proj = DMatrix::zeros(m, m);
        let mut delta = f64::INFINITY;
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda > tol {
                let v = eig.eigenvectors.column(k);
                pinv += v * v.transpose() / lambda;
                range_proj += v * v.transpose();
                delta = delta.min(lambda);
            }
        }
        if !delta.is_finite() {
            return Err(ProblemError::Invalid(
                "C must have a nonzero eigenvalue".into(),
            ));
        }
        let bt = core.b.transpose();
        let leak = (&bt - &range_proj * &bt).amax();
        if leak > 1e-9 * bt.amax().max(1.0) {
            return Err(ProblemError::Invalid(
                "columns of B leave range(C): inner maximum is unbounded".into(),
            ));
        }
        let y_map = &pinv * bt;
        let p_hessian = &core.a + &core.b * &y_map;
        let p_hessian = (&p_hessian + p_hessian.transpose()) * 0.5;
        Ok(PlToyProblem {
            core,
            delta,
            y_map,
            p_hessian,
            y_curvature: max_eig,
        })
    }

    pub fn random(spec: &PlToySpec) -> Result<Self, ProblemError> {
        if spec.rank == 0 || spec.rank >= spec.m {
            return Err(ProblemError::Invalid("rank must be in 1..m".into()));
        }
        if spec.d == 0 {
            return Err(ProblemError::Invalid("dimensions must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let q = random_orthogonal(spec.d, &mut rng);
        let eig = DMatrix::from_diagonal(&DVector::from_vec(linspace(
            spec.spectrum.0,
            spec.spectrum.1,
            spec.d,
        )));
        let s = &q * eig * q.transpose();

        let v = random_orthogonal(spec.m, &mut rng);
        let v_r = v.columns(0, spec.rank).into_owned();
        let c_eigs = linspace(spec.c_spectrum.0, spec.c_spectrum.1, spec.rank);
        let c_diag = DMatrix::from_diagonal(&DVector::from_vec(c_eigs.clone()));
        let c = &v_r * &c_diag * v_r.transpose();
        let c = (&c + c.transpose()) * 0.5;

        let svd = gaussian_matrix(spec.d, spec.rank, &mut rng).svd(true, true);
        let w = svd.u.expect("u requested") * svd.v_t.expect("v_t requested");
        let b = &w * v_r.transpose() * spec.coupling;
        let c_inv =
            DMatrix::from_diagonal(&DVector::from_vec(c_eigs.iter().map(|l| 1.0 / l).collect()));
        let bcb = &w * c_inv * w.transpose() * (spec.coupling * spec.coupling);
        let a = &s - bcb;
        let a = (&a + a.transpose()) * 0.5;
        Self::new(a, b, c, spec.noise_sigma)
    }

    /// PL modulus: smallest nonzero eigenvalue of `C`.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.core.c
    }
}

impl_quadratic_oracle!(PlToyProblem);

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn scalar_quadratic_hvp() {
        // J = x^2/2 - y^2/2 + xy
        let p = QuadraticMinimaxProblem::new(
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::from_element(1, 1, 1.0),
            1.0,
            0.0,
            0.0,
        )
        .unwrap();
        let h = p
            .sample_hvp(&[0.3], &[-2.0], SampleId::Draw(9), &[1.0], &[0.0])
            .unwrap();
        assert_eq!((h.hx, h.hy), (vec![1.0], vec![1.0]));
        let h = p
            .sample_hvp(&[0.3], &[-2.0], SampleId::Draw(9), &[0.0], &[0.0])
            .unwrap();
        assert_eq!((h.hx, h.hy), (vec![0.0], vec![0.0]));
    }

    #[test]
    fn decoupled_identity_case() {
        let p = QuadraticMinimaxProblem::new(
            DMatrix::zeros(3, 3),
            DMatrix::identity(3, 3),
            1.0,
            0.0,
            0.0,
        )
        .unwrap();
        let x = [0.5, -1.0, 2.0];
        assert_eq!(p.y_opt(&x), x.to_vec());
        assert_relative_eq!(p.p_value(&x), 0.5 * (0.25 + 1.0 + 4.0));
        assert_eq!(p.grad_p(&[0.0; 3]), vec![0.0; 3]);
    }

    #[test]
    fn noiseless_sample_equals_full() {
        let p = QuadraticMinimaxProblem::random(&QuadraticSpec::default()).unwrap();
        let x = vec![0.1; 10];
        let y = vec![-0.2; 10];
        assert_eq!(
            p.sample_gradient(&x, &y, SampleId::Draw(5)).unwrap(),
            p.full_gradient(&x, &y)
        );
    }

    #[test]
    fn antithetic_noise_cancels() {
        let spec = QuadraticSpec {
            noise_sigma: 0.5,
            noise_sigma_h: 0.3,
            ..Default::default()
        };
        let p = QuadraticMinimaxProblem::random(&spec).unwrap();
        let x = vec![0.1; 10];
        let y = vec![-0.2; 10];
        let a = p.sample_gradient(&x, &y, SampleId::Draw(40)).unwrap();
        let b = p.sample_gradient(&x, &y, SampleId::Draw(41)).unwrap();
        let full = p.full_gradient(&x, &y);
        for k in 0..10 {
            assert_relative_eq!((a.gx[k] + b.gx[k]) / 2.0, full.gx[k], epsilon = 1e-15);
        }
        assert_ne!(a.gx, full.gx);
    }

    #[test]
    fn random_spectrum_is_exact() {
        let spec = QuadraticSpec {
            d: 6,
            m: 4,
            spectrum: (1.0, 2.0),
            coupling: 2.0,
            ..Default::default()
        };
        let p = QuadraticMinimaxProblem::random(&spec).unwrap();
        let mut eig: Vec<f64> = SymmetricEigen::new(p.p_hessian().clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        eig.sort_by(f64::total_cmp);
        for (e, want) in eig.iter().zip(linspace(1.0, 2.0, 6)) {
            assert_relative_eq!(*e, want, epsilon = 1e-10);
        }
        // coupling^2 / nu = 4 > 1, so A is indefinite
        let a_eig = SymmetricEigen::new(p.a().clone()).eigenvalues;
        assert!(a_eig.min() < 0.0);
    }

    #[test]
    fn lipschitz_matches_single_block() {
        // H = [[1, 1], [1, -1]], eigenvalues +-sqrt(2)
        let p = QuadraticMinimaxProblem::new(
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::from_element(1, 1, 1.0),
            1.0,
            0.0,
            0.0,
        )
        .unwrap();
        assert_relative_eq!(p.lipschitz(), 2f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn pl_toy_decoupled_and_delta() {
        let c = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0]));
        let b = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, -1.0, 0.0]);
        let p = PlToyProblem::new(DMatrix::identity(2, 2), b, c, 0.0).unwrap();
        let x = [0.5, 1.5];
        // B_1^T x = 2 * 0.5 - 1.5
        assert_eq!(p.y_opt(&x), vec![-0.5, 0.0]);
        assert_eq!(p.delta(), 1.0);

        let c2 = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.0]));
        let b2 = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let p2 = PlToyProblem::new(DMatrix::identity(1, 1), b2, c2, 0.0).unwrap();
        assert_eq!(p2.delta(), 2.0);
    }

    #[test]
    fn pl_toy_rejects_unbounded_and_nonsingular() {
        let c = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0]));
        let b = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        assert!(PlToyProblem::new(DMatrix::identity(1, 1), b, c, 0.0).is_err());
        let b = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        assert!(
            PlToyProblem::new(DMatrix::identity(1, 1), b, DMatrix::identity(2, 2), 0.0).is_err()
        );
    }

    #[test]
    fn pl_toy_random_is_valid() {
        let p = PlToyProblem::random(&PlToySpec::default()).unwrap();
        let mut eig: Vec<f64> = SymmetricEigen::new(p.p_hessian().clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        eig.sort_by(f64::total_cmp);
        assert_relative_eq!(eig[0], 0.5, epsilon = 1e-9);
        assert_relative_eq!(p.delta(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn rejects_wrong_sample_kind() {
        let p = QuadraticMinimaxProblem::random(&QuadraticSpec::default()).unwrap();
        let x = vec![0.0; 10];
        assert!(matches!(
            p.sample_gradient(&x, &x, SampleId::Index(0)),
            Err(OracleError::WrongSampleKind(_))
        ));
    }
}
