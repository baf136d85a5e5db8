//! Optimizer state containers and momentum clipping.

use crate::vector::{norm2, scale, Vec64};

/// Current and previous iterates. The momentum correction needs both.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateState {
    pub x_curr: Vec64,
    pub y_curr: Vec64,
    pub x_prev: Vec64,
    pub y_prev: Vec64,
    pub iter: usize,
}

impl IterateState {
    /// Starts a run at `z0` with `z_prev = z0`, so the first correction term vanishes.
    pub fn new(x0: Vec64, y0: Vec64) -> Self {
        IterateState {
            x_prev: x0.clone(),
            y_prev: y0.clone(),
            x_curr: x0,
            y_curr: y0,
            iter: 0,
        }
    }

    /// Moves `curr` into `prev` and installs the new iterate.
    pub fn advance(&self, x_next: Vec64, y_next: Vec64) -> Self {
        IterateState {
            x_prev: self.x_curr.clone(),
            y_prev: self.y_curr.clone(),
            x_curr: x_next,
            y_curr: y_next,
            iter: self.iter + 1,
        }
    }

    pub fn dx(&self) -> Vec64 {
        crate::vector::sub(&self.x_curr, &self.x_prev)
    }

    pub fn dy(&self) -> Vec64 {
        crate::vector::sub(&self.y_curr, &self.y_prev)
    }
}

/// Momentum vectors. The clipped pair is present only for HCMM-1.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumState {
    pub m_x: Vec64,
    pub m_y: Vec64,
    pub m_x_clipped: Option<Vec64>,
    pub m_y_clipped: Option<Vec64>,
}

impl MomentumState {
    pub fn new(m_x: Vec64, m_y: Vec64) -> Self {
        MomentumState {
            m_x,
            m_y,
            m_x_clipped: None,
            m_y_clipped: None,
        }
    }

    /// Builds a state carrying clipped counterparts of `m_x`, `m_y`.
    pub fn with_clipping(m_x: Vec64, m_y: Vec64, threshold: f64, norm: f64) -> Self {
        let cx = clip_momentum(&m_x, threshold, norm);
        let cy = clip_momentum(&m_y, threshold, norm);
        MomentumState {
            m_x,
            m_y,
            m_x_clipped: Some(cx),
            m_y_clipped: Some(cy),
        }
    }

    pub fn zeros(dim_x: usize, dim_y: usize) -> Self {
        Self::new(vec![0.0; dim_x], vec![0.0; dim_y])
    }

    /// The x-momentum that drives the weight update: clipped if present.
    pub fn effective_x(&self) -> &[f64] {
        self.m_x_clipped.as_deref().unwrap_or(&self.m_x)
    }

    pub fn effective_y(&self) -> &[f64] {
        self.m_y_clipped.as_deref().unwrap_or(&self.m_y)
    }
}

/// Rescales `m` to norm `norm` when `||m|| >= threshold`; returns it unchanged otherwise.
///
/// When `threshold < ||m|| < norm` this scales the vector up.
pub fn clip_momentum(m: &[f64], threshold: f64, norm: f64) -> Vec64 {
    let len = norm2(m);
    if threshold.is_finite() && len >= threshold && len > 0.0 {
        scale(norm / len, m)
    } else {
        m.to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn clip_examples() {
        assert_eq!(clip_momentum(&[3.0, 4.0], 10.0, 10.0), vec![3.0, 4.0]);
        assert_eq!(clip_momentum(&[9.0, 12.0], 5.0, 10.0), vec![6.0, 8.0]);
        assert_eq!(clip_momentum(&[6.0, 8.0], 5.0, 5.0), vec![3.0, 4.0]);
        // inclusive trigger
        assert_eq!(clip_momentum(&[3.0, 4.0], 5.0, 2.5), vec![1.5, 2.0]);
    }

    #[test]
    fn infinite_threshold_never_clips() {
        let m = vec![1e300, -1e300];
        assert_eq!(clip_momentum(&m, f64::INFINITY, f64::INFINITY), m);
    }

    #[test]
    fn advance_threads_previous() {
        let s = IterateState::new(vec![1.0], vec![2.0]);
        let t = s.advance(vec![3.0], vec![4.0]);
        assert_eq!(t.x_prev, s.x_curr);
        assert_eq!(t.y_prev, s.y_curr);
        assert_eq!(t.iter, 1);
        assert_eq!(t.dx(), vec![2.0]);
    }

    fn vec_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-100.0..100.0f64, 1..16)
    }

    proptest! {
        #[test]
        fn clip_idempotent_when_norm_below_threshold(m in vec_strategy(), n in 0.1..50.0f64, frac in 0.01..1.0f64) {
            let n1 = n * frac;
            let once = clip_momentum(&m, n, n1);
            let twice = clip_momentum(&once, n, n1);
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn clip_is_colinear(m in vec_strategy(), n in 0.1..50.0f64, n1 in 0.1..50.0f64) {
            prop_assume!(norm2(&m) > 0.0);
            let c = clip_momentum(&m, n, n1);
            let lambda = norm2(&c) / norm2(&m);
            for (ci, mi) in c.iter().zip(&m) {
                prop_assert!((ci - lambda * mi).abs() <= 1e-12 * (1.0 + mi.abs()));
            }
        }

        #[test]
        fn clipped_norm_bounded(m in vec_strategy(), n in 0.1..50.0f64, n1 in 0.1..50.0f64) {
            let c = clip_momentum(&m, n, n1);
            prop_assert!(norm2(&c) <= n1.max(norm2(&m)) * (1.0 + 1e-12));
        }
    }
}
