//! Dense vector arithmetic over `f64` slices.
//!
//! Dimension mismatches are programming errors and panic.

/// Dense vector of 64-bit floats. Dimension is implied by context
/// (`M1` for x-blocks, `M2` for y-blocks).
pub type Vec64 = Vec<f64>;

#[inline]
fn check_dims(a: &[f64], b: &[f64]) {
    assert_eq!(
        a.len(),
        b.len(),
        "dimension mismatch: {} vs {}",
        a.len(),
        b.len()
    );
}

pub fn add(a: &[f64], b: &[f64]) -> Vec64 {
    check_dims(a, b);
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec64 {
    check_dims(a, b);
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(alpha: f64, a: &[f64]) -> Vec64 {
    a.iter().map(|x| alpha * x).collect()
}

/// Returns `alpha * x + y`.
pub fn axpy(alpha: f64, x: &[f64], y: &[f64]) -> Vec64 {
    check_dims(x, y);
    x.iter().zip(y).map(|(xi, yi)| alpha * xi + yi).collect()
}

/// In-place `y += alpha * x`.
pub fn axpy_in_place(alpha: f64, x: &[f64], y: &mut [f64]) {
    check_dims(x, y);
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    check_dims(a, b);
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm.
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Euclidean distance `||a - b||`.
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    check_dims(a, b);
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn is_finite(a: &[f64]) -> bool {
    a.iter().all(|v| v.is_finite())
}

/// Norm of the concatenation `col{a, b}`.
pub fn norm2_pair(a: &[f64], b: &[f64]) -> f64 {
    (dot(a, a) + dot(b, b)).sqrt()
}
