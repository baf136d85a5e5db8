//! Hyperparameter schedules.
//!
//! The two theorem-driven builders turn problem constants (Lipschitz bounds,
//! concavity or PL modulus, noise levels) and a horizon `T` into step sizes and
//! smoothing factors. Every intermediate constant is kept on the returned
//! [`HyperSchedule`] so it can be inspected.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScheduleError {
    #[error("invalid schedule parameter `{field}`: must be {requirement}, got {value}")]
    Invalid {
        field: &'static str,
        requirement: &'static str,
        value: f64,
    },
}

fn require_positive(field: &'static str, value: f64) -> Result<(), ScheduleError> {
    if value > 0.0 && !value.is_nan() {
        Ok(())
    } else {
        Err(ScheduleError::Invalid {
            field,
            requirement: "> 0",
            value,
        })
    }
}

fn require_nonneg(field: &'static str, value: f64) -> Result<(), ScheduleError> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ScheduleError::Invalid {
            field,
            requirement: ">= 0 and finite",
            value,
        })
    }
}

fn require_horizon(horizon: usize) -> Result<(), ScheduleError> {
    if horizon >= 1 {
        Ok(())
    } else {
        Err(ScheduleError::Invalid {
            field: "T",
            requirement: ">= 1",
            value: 0.0,
        })
    }
}

/// Problem constants the theorem schedules are derived from.
///
/// Fields not used by a given schedule may be left at zero.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProblemConstants {
    /// Lipschitz constant of the full gradient.
    pub l_f: f64,
    /// Lipschitz constant of the full Hessian.
    pub l_h: f64,
    /// Strong concavity modulus in y.
    pub nu: f64,
    /// PL modulus in y.
    pub delta: f64,
    /// Stochastic gradient standard deviation (reported only).
    pub sigma: f64,
    /// Stochastic Hessian standard deviation.
    pub sigma_h: f64,
    /// Bound on the full gradient norm.
    pub g: f64,
}

impl ProblemConstants {
    fn validate_all_nonneg(&self) -> Result<(), ScheduleError> {
        require_nonneg("L_f", self.l_f)?;
        require_nonneg("L_h", self.l_h)?;
        require_nonneg("nu", self.nu)?;
        require_nonneg("delta", self.delta)?;
        require_nonneg("sigma", self.sigma)?;
        require_nonneg("sigma_h", self.sigma_h)?;
        require_nonneg("G", self.g)
    }
}

/// Constants derived while building a theorem schedule.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DerivedConstants {
    /// Condition number `L_f / nu`.
    pub kappa: Option<f64>,
    /// Smoothness of the worst-case objective, `L_f + kappa * L_f`.
    pub l1: Option<f64>,
    pub pi1: Option<f64>,
    pub c: Option<f64>,
    /// `sqrt(delta / 2)`.
    pub delta1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleWarning {
    /// `N < N1`: a momentum with `N <= ||m|| < N1` is rescaled up to norm `N1`.
    ClipRescalesUp { threshold: f64, norm: f64 },
    /// The clipping threshold is below the gradient bound `G`, so the clipped
    /// momentum is no longer guaranteed closer to the true gradient.
    ThresholdBelowGradientBound { threshold: f64, g: f64 },
}

impl std::fmt::Display for ScheduleWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScheduleWarning::ClipRescalesUp { threshold, norm } => write!(
                f,
                "clip threshold N={threshold} is below clip norm N1={norm}: momenta with N <= |m| < N1 are scaled up"
            ),
            ScheduleWarning::ThresholdBelowGradientBound { threshold, g } => write!(
                f,
                "clip threshold N={threshold} is below the gradient bound G={g}"
            ),
        }
    }
}

/// Step sizes, smoothing factors, clipping parameters and horizon of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperSchedule {
    pub mu_x: f64,
    pub mu_y: f64,
    pub beta_x: f64,
    pub beta_y: f64,
    /// Clipping trigger `N` (HCMM-1 only).
    pub clip_threshold: f64,
    /// Post-clip norm `N1` (HCMM-1 only).
    pub clip_norm: f64,
    pub horizon: usize,
    pub constants: ProblemConstants,
    pub derived: DerivedConstants,
    pub warnings: Vec<ScheduleWarning>,
}

impl HyperSchedule {
    /// A schedule with explicit step sizes and smoothing factors and clipping
    /// disabled (`N = N1 = inf`).
    pub fn explicit(
        mu_x: f64,
        mu_y: f64,
        beta_x: f64,
        beta_y: f64,
        horizon: usize,
    ) -> Result<Self, ScheduleError> {
        let schedule = HyperSchedule {
            mu_x,
            mu_y,
            beta_x,
            beta_y,
            clip_threshold: f64::INFINITY,
            clip_norm: f64::INFINITY,
            horizon,
            constants: ProblemConstants::default(),
            derived: DerivedConstants::default(),
            warnings: Vec::new(),
        };
        schedule.validate()?;
        Ok(schedule)
    }

    /// Replaces the clipping pair `(N, N1)` and recomputes warnings.
    pub fn with_clipping(mut self, threshold: f64, norm: f64) -> Result<Self, ScheduleError> {
        require_positive("N", threshold)?;
        require_positive("N1", norm)?;
        self.clip_threshold = threshold;
        self.clip_norm = norm;
        self.refresh_warnings();
        Ok(self)
    }

    pub fn with_constants(mut self, constants: ProblemConstants) -> Result<Self, ScheduleError> {
        constants.validate_all_nonneg()?;
        self.constants = constants;
        self.refresh_warnings();
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ScheduleError> {
        require_positive("mu_x", self.mu_x)?;
        require_positive("mu_y", self.mu_y)?;
        require_unit("beta_x", self.beta_x)?;
        require_unit("beta_y", self.beta_y)?;
        require_positive("N", self.clip_threshold)?;
        require_positive("N1", self.clip_norm)?;
        require_horizon(self.horizon)
    }

    fn refresh_warnings(&mut self) {
        self.warnings.clear();
        if self.clip_threshold < self.clip_norm {
            self.warnings.push(ScheduleWarning::ClipRescalesUp {
                threshold: self.clip_threshold,
                norm: self.clip_norm,
            });
        }
        if self.constants.g > self.clip_threshold {
            self.warnings
                .push(ScheduleWarning::ThresholdBelowGradientBound {
                    threshold: self.clip_threshold,
                    g: self.constants.g,
                });
        }
    }
}

fn require_unit(field: &'static str, value: f64) -> Result<(), ScheduleError> {
    if value > 0.0 && value <= 1.0 {
        Ok(())
    } else {
        Err(ScheduleError::Invalid {
            field,
            requirement: "in (0, 1]",
            value,
        })
    }
}

/// Schedule for HCMM-1 under strong concavity.
///
/// `beta = min{T^(-2/3), 1/2}`; `mu_y` and `mu_x` are the minima of the
/// step-size upper bounds together with `T^(-1/3)`. The clipping threshold
/// defaults to `N = N1`.
pub fn schedule_hcmm1(
    horizon: usize,
    constants: ProblemConstants,
    clip_norm: f64,
) -> Result<HyperSchedule, ScheduleError> {
    require_horizon(horizon)?;
    constants.validate_all_nonneg()?;
    require_positive("L_f", constants.l_f)?;
    require_positive("nu", constants.nu)?;
    require_positive("L_h", constants.l_h)?;
    require_positive("sigma_h", constants.sigma_h)?;
    require_positive("N1", clip_norm)?;

    let t = horizon as f64;
    let ProblemConstants {
        l_f,
        l_h,
        nu,
        sigma_h,
        ..
    } = constants;

    let beta = t.powf(-2.0 / 3.0).min(0.5);
    let kappa = l_f / nu;
    let l1 = l_f + kappa * l_f;
    let pi1 = 1.0 / (2.0 * l_f + nu);
    let c = (5.0 * pi1 * l_f * l_f / (8.0 * nu * sigma_h * sigma_h))
        .min(4.0 * sigma_h * sigma_h / (clip_norm * clip_norm * l_h * l_h))
        .min(1.0 / (128.0 * sigma_h * sigma_h));

    let mu_y = [
        t.powf(-1.0 / 3.0),
        sigma_h * (2.0 * beta).sqrt() / (l_h * clip_norm),
        (c * beta / 2.0).sqrt(),
        (c * beta / (30.0 * kappa * kappa)).sqrt(),
        2.0 / nu,
        pi1,
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    let mu_x = mu_y
        .min((1.0 / (480.0 * kappa.powi(4))).sqrt() * mu_y)
        .min(1.0 / (2.0 * l1));

    let mut schedule = HyperSchedule {
        mu_x,
        mu_y,
        beta_x: beta,
        beta_y: beta,
        clip_threshold: clip_norm,
        clip_norm,
        horizon,
        constants,
        derived: DerivedConstants {
            kappa: Some(kappa),
            l1: Some(l1),
            pi1: Some(pi1),
            c: Some(c),
            delta1: None,
        },
        warnings: Vec::new(),
    };
    schedule.refresh_warnings();
    schedule.validate()?;
    Ok(schedule)
}

/// Schedule for HCMM-2 under the PL condition.
///
/// `beta = min{1, T^(-2/3)}`, `mu_y = T^(-2/3)`,
/// `mu_x = min{mu_y, delta1 * mu_y / (2 L_f), T^(-2/3)}` with
/// `delta1 = sqrt(delta / 2)`.
pub fn schedule_hcmm2(
    horizon: usize,
    constants: ProblemConstants,
) -> Result<HyperSchedule, ScheduleError> {
    require_horizon(horizon)?;
    constants.validate_all_nonneg()?;
    require_positive("delta", constants.delta)?;
    require_positive("L_f", constants.l_f)?;

    let t = horizon as f64;
    let t_23 = t.powf(-2.0 / 3.0);
    let beta = t_23.min(1.0);
    let mu_y = t_23;
    let delta1 = (constants.delta / 2.0).sqrt();
    let mu_x = mu_y.min(delta1 * mu_y / (2.0 * constants.l_f)).min(t_23);

    let schedule = HyperSchedule {
        mu_x,
        mu_y,
        beta_x: beta,
        beta_y: beta,
        clip_threshold: f64::INFINITY,
        clip_norm: f64::INFINITY,
        horizon,
        constants,
        derived: DerivedConstants {
            delta1: Some(delta1),
            ..DerivedConstants::default()
        },
        warnings: Vec::new(),
    };
    schedule.validate()?;
    Ok(schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_constants() -> ProblemConstants {
        ProblemConstants {
            l_f: 1.0,
            l_h: 1.0,
            nu: 1.0,
            delta: 1.0,
            sigma: 1.0,
            sigma_h: 1.0,
            g: 0.0,
        }
    }

    #[test]
    fn hcmm1_beta_at_t8() {
        let s = schedule_hcmm1(8, unit_constants(), 1.0).unwrap();
        assert_relative_eq!(s.beta_x, 0.25, max_relative = 1e-15);
        assert_eq!(s.beta_x, s.beta_y);
    }

    #[test]
    fn hcmm1_small_horizon_caps_beta() {
        let s = schedule_hcmm1(1, unit_constants(), 1.0).unwrap();
        assert_eq!(s.beta_x, 0.5);
    }

    #[test]
    fn hcmm1_derived_constants() {
        let c = ProblemConstants {
            l_f: 2.0,
            nu: 1.0,
            ..unit_constants()
        };
        let s = schedule_hcmm1(100, c, 1.0).unwrap();
        assert_eq!(s.derived.kappa, Some(2.0));
        assert_eq!(s.derived.l1, Some(6.0));
        assert_relative_eq!(s.derived.pi1.unwrap(), 0.2, max_relative = 1e-15);
    }

    #[test]
    fn hcmm1_golden_t1000() {
        // Hand-evaluated minima: beta = 0.01, C = 1/128, mu_y = sqrt(C beta / 30),
        // mu_x = mu_y / sqrt(480).
        let s = schedule_hcmm1(1000, unit_constants(), 1.0).unwrap();
        assert_relative_eq!(s.beta_x, 0.01, max_relative = 1e-12);
        assert_relative_eq!(s.derived.c.unwrap(), 0.0078125, max_relative = 1e-15);
        assert_relative_eq!(s.mu_y, 0.001613743060919757, max_relative = 1e-12);
        assert_relative_eq!(s.mu_x, 7.36569563735987e-05, max_relative = 1e-12);
        assert!(s.mu_x <= s.mu_y);
    }

    #[test]
    fn hcmm1_rejects_nonpositive() {
        let c = ProblemConstants {
            l_h: 0.0,
            ..unit_constants()
        };
        match schedule_hcmm1(10, c, 1.0) {
            Err(ScheduleError::Invalid { field, .. }) => assert_eq!(field, "L_h"),
            other => panic!("expected error, got {other:?}"),
        }
        let err = schedule_hcmm1(10, unit_constants(), 0.0).unwrap_err();
        assert!(err.to_string().contains("N1"));
        let err = schedule_hcmm1(0, unit_constants(), 1.0).unwrap_err();
        assert!(err.to_string().contains("`T`"));
    }

    #[test]
    fn hcmm2_examples() {
        let s = schedule_hcmm2(1, unit_constants()).unwrap();
        assert_eq!(s.beta_x, 1.0);
        assert_eq!(s.mu_y, 1.0);

        let c = ProblemConstants {
            delta: 2.0,
            l_f: 1.0,
            ..unit_constants()
        };
        let s = schedule_hcmm2(1000, c).unwrap();
        assert_eq!(s.derived.delta1, Some(1.0));
        assert_relative_eq!(s.mu_y, 0.01, max_relative = 1e-12);
        assert_relative_eq!(s.mu_x, 0.005, max_relative = 1e-12);

        let s = schedule_hcmm2(1_000_000, c).unwrap();
        assert_relative_eq!(s.mu_y, 1e-4, max_relative = 1e-12);
    }

    #[test]
    fn hcmm2_rejects_zero_delta() {
        let c = ProblemConstants {
            delta: 0.0,
            ..unit_constants()
        };
        let err = schedule_hcmm2(10, c).unwrap_err();
        assert!(err.to_string().contains("delta"));
    }

    #[test]
    fn clipping_warnings() {
        let s = HyperSchedule::explicit(0.1, 0.1, 0.5, 0.5, 10)
            .unwrap()
            .with_clipping(1.0, 2.0)
            .unwrap();
        assert!(matches!(
            s.warnings[0],
            ScheduleWarning::ClipRescalesUp { .. }
        ));
        let s = s
            .with_clipping(2.0, 2.0)
            .unwrap()
            .with_constants(ProblemConstants {
                g: 3.0,
                ..Default::default()
            })
            .unwrap();
        assert_eq!(s.warnings.len(), 1);
        assert!(matches!(
            s.warnings[0],
            ScheduleWarning::ThresholdBelowGradientBound { .. }
        ));
    }

    #[test]
    fn explicit_validation() {
        assert!(HyperSchedule::explicit(0.1, 0.1, 0.0, 0.5, 10).is_err());
        assert!(HyperSchedule::explicit(0.1, 0.1, 1.5, 0.5, 10).is_err());
        assert!(HyperSchedule::explicit(-0.1, 0.1, 0.5, 0.5, 10).is_err());
        assert!(HyperSchedule::explicit(0.1, 0.1, 1.0, 1.0, 10).is_ok());
    }
}
