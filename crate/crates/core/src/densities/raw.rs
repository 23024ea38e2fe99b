//! Raw determinant formulas evaluated on ambient Euclidean space, with no
//! domain checks, clipping or log bookkeeping.
//!
//! The typed operations in the parent module restrict these to their
//! probabilistic domains. The raw forms are needed in their own right: the
//! transition kernels solve the heat equation on all of `R^d`, so
//! finite-difference checks must evaluate them outside the cones, and
//! quadrature routines probe their boundaries.

use crate::kernels::{cdf_raw, iterated_phi_raw, pdf_prime_raw, pdf_raw};
use nalgebra::DMatrix;

use super::det::{det, det_full, DetValue};

pub(crate) fn km_matrix(y: &[f64], y2: &[f64], t: f64) -> DMatrix<f64> {
    let n = y.len();
    DMatrix::from_fn(n, n, |i, j| pdf_raw(y2[j] - y[i], t))
}

/// Karlin-McGregor determinant `det { phi_t(y'_j - y_i) }`.
pub fn km_det(y: &[f64], y2: &[f64], t: f64) -> f64 {
    det(km_matrix(y, y2, t))
}

pub(crate) fn q_matrix(x: &[f64], y: &[f64], x2: &[f64], y2: &[f64], t: f64) -> DMatrix<f64> {
    let n1 = x.len();
    let n = y.len();
    let dim = n1 + n;
    DMatrix::from_fn(dim, dim, |r, c| match (r < n1, c < n1) {
        // A: Gaussian kernel between x levels
        (true, true) => pdf_raw(x2[c] - x[r], t),
        // B: distribution function minus the indicator 1(j >= i)
        (true, false) => {
            let j = c - n1;
            cdf_raw(y2[j] - x[r], t) - if j >= r { 1.0 } else { 0.0 }
        }
        // C: derivative kernel
        (false, true) => pdf_prime_raw(x2[c] - y[r - n1], t),
        // D: Gaussian kernel between y levels
        (false, false) => pdf_raw(y2[c - n1] - y[r - n1], t),
    })
}

/// Block determinant of the killed interlaced pair,
/// `det [[A, B], [C, D]]` of size `(2n+1) x (2n+1)`.
pub fn q_det(x: &[f64], y: &[f64], x2: &[f64], y2: &[f64], t: f64) -> f64 {
    if y.is_empty() {
        return pdf_raw(x2[0] - x[0], t);
    }
    det(q_matrix(x, y, x2, y2, t))
}

pub(crate) fn q_det_full(x: &[f64], y: &[f64], x2: &[f64], y2: &[f64], t: f64) -> DetValue {
    if y.is_empty() {
        let v = pdf_raw(x2[0] - x[0], t);
        return DetValue { value: v, log_abs: (v > 0.0).then(|| v.ln()), scale: v.abs() };
    }
    det_full(q_matrix(x, y, x2, y2, t))
}

pub(crate) fn r_matrix(x: &[f64], x2: &[f64], t: f64) -> DMatrix<f64> {
    let n = x.len();
    DMatrix::from_fn(n, n, |i, j| iterated_phi_raw(i as i64 - j as i64, x2[j] - x[i], t))
}

/// Edge-process determinant `det { Phi_t^(i-j)(x'_j - x_i) }`.
pub fn r_det(x: &[f64], x2: &[f64], t: f64) -> f64 {
    det(r_matrix(x, x2, t))
}

/// Largest-eigenvalue distribution determinant `det { Phi_t^(i-j+1)(x) }`.
pub fn top_det(n: usize, x: f64, t: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    det(DMatrix::from_fn(n, n, |i, j| iterated_phi_raw(i as i64 - j as i64 + 1, x, t)))
}

/// Coalescing-motion joint distribution determinant with entries
/// `Phi_t(z'_j - z_i)` on and below the diagonal, `Phi_t(z'_j - z_i) - 1`
/// above it.
pub fn coalescing_det(z: &[f64], z2: &[f64], t: f64) -> f64 {
    let n = z.len();
    det(DMatrix::from_fn(n, n, |i, j| {
        cdf_raw(z2[j] - z[i], t) - if i < j { 1.0 } else { 0.0 }
    }))
}
