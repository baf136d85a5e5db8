//! Euclidean projection onto the probability simplex.

use thiserror::Error;

use crate::vector::Vec64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimplexError {
    #[error("cannot project an empty vector onto the simplex")]
    Empty,
}

/// A point of the probability simplex: nonnegative entries summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint(Vec64);

impl SimplexPoint {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec64 {
        self.0
    }

    /// Uniform point `1/n`.
    pub fn uniform(n: usize) -> Result<Self, SimplexError> {
        if n == 0 {
            return Err(SimplexError::Empty);
        }
        Ok(SimplexPoint(vec![1.0 / n as f64; n]))
    }
}

impl AsRef<[f64]> for SimplexPoint {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Inputs already on the simplex to this tolerance are returned unchanged,
/// which makes the projection exactly idempotent.
pub const FEASIBILITY_TOL: f64 = 1e-12;

fn neumaier_add(sum: f64, carry: f64, x: f64) -> (f64, f64) {
    let t = sum + x;
    let c = if sum.abs() >= x.abs() {
        (sum - t) + x
    } else {
        (x - t) + sum
    };
    (t, carry + c)
}

fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (s, c) = values.fold((0.0, 0.0), |(s, c), x| neumaier_add(s, c, x));
    s + c
}

/// Projects `v` onto `{w : w >= 0, sum w = 1}`.
///
/// Sort-and-threshold: with `u` the entries sorted in non-increasing order,
/// take the largest `k` with `u_k + (1 - sum_{j<=k} u_j) / k > 0`, set
/// `tau = (sum_{j<=k} u_j - 1) / k`, and return `max(v - tau, 0)`.
pub fn project_simplex(v: &[f64]) -> Result<SimplexPoint, SimplexError> {
    let mut w = v.to_vec();
    project_simplex_in_place(&mut w)?;
    Ok(SimplexPoint(w))
}

/// In-place variant of [`project_simplex`].
pub fn project_simplex_in_place(v: &mut [f64]) -> Result<(), SimplexError> {
    if v.is_empty() {
        return Err(SimplexError::Empty);
    }
    if v.iter().all(|&x| x >= 0.0)
        && (compensated_sum(v.iter().copied()) - 1.0).abs() <= FEASIBILITY_TOL
    {
        return Ok(());
    }
    let mut u = v.to_vec();
    // stable, descending
    u.sort_by(|a, b| b.total_cmp(a));

    let mut cumsum = 0.0;
    let mut carry = 0.0;
    let mut tau = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        (cumsum, carry) = neumaier_add(cumsum, carry, uk);
        let candidate = (cumsum + carry - 1.0) / (k + 1) as f64;
        if uk - candidate > 0.0 {
            tau = candidate;
        } else {
            break;
        }
    }
    for vi in v.iter_mut() {
        *vi = (*vi - tau).clamp(0.0, 1.0);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn feasible_input_unchanged() {
        let p = project_simplex(&[0.2, 0.3, 0.5]).unwrap();
        assert!(close(p.as_slice(), &[0.2, 0.3, 0.5], 1e-15));
    }

    #[test]
    fn hand_kkt_examples() {
        let p = project_simplex(&[2.0, 0.0]).unwrap();
        assert_eq!(p.as_slice(), &[1.0, 0.0]);
        let p = project_simplex(&[0.5, 0.5, 0.5]).unwrap();
        assert!(close(p.as_slice(), &[1.0 / 3.0; 3], 1e-15));
    }

    #[test]
    fn negative_and_single() {
        assert_eq!(project_simplex(&[-5.0]).unwrap().as_slice(), &[1.0]);
        let p = project_simplex(&[-1.0, -1.0]).unwrap();
        assert!(close(p.as_slice(), &[0.5, 0.5], 1e-15));
    }

    #[test]
    fn empty_is_error() {
        assert_eq!(project_simplex(&[]), Err(SimplexError::Empty));
        assert!(SimplexPoint::uniform(0).is_err());
    }
}
