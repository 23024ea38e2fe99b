//! Quadrature and finite-difference residuals of the two structural
//! identities linking the density families: the intertwining relation and
//! the mixed-derivative representation of the pair density through the
//! coalescing distribution function.

use crate::error::{Error, Result};
use crate::kernels::Time;
use crate::point::{InterlacedPoint, OrderedPoint};
use crate::quad::{integrate, integrate_2d, QuadConfig};

use super::raw;
use super::{pairwise_product, vandermonde_h};

/// Residual of an identity check together with both sides and the
/// estimated quadrature error.
#[derive(Debug, Clone, Copy)]
pub struct ResidualOutcome {
    pub residual: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub quad_error: f64,
}

/// Relative residual of the intertwining relation at `(x, w2, t)`:
///
/// `int over the interlacing region of lambda(x, .) q+_t((x, .), w2) dy`
/// against `p+_t(x, x') lambda(x', y')`.
///
/// The conditioning ratio `h(y')/h(y)` cancels against the kernel's `h(y)`,
/// so the integrand is evaluated in the combined stable form
/// `n! h(y') q_t((x,y), w2) / h(x)`. Supported for `n <= 2` (quadrature
/// feasibility).
pub fn intertwining_residual(
    x: &OrderedPoint,
    w2: &InterlacedPoint,
    t: Time,
    cfg: &QuadConfig,
) -> Result<ResidualOutcome> {
    let n = w2.rank();
    if x.len() != n + 1 {
        return Err(Error::dimension(format!(
            "intertwining: |x| = {} does not match target rank {n}",
            x.len()
        )));
    }
    if !x.is_strict() {
        return Err(Error::domain("intertwining requires strictly increasing x"));
    }
    if n == 0 || n > 2 {
        return Err(Error::domain(format!("intertwining residual supports n in {{1, 2}}, got {n}")));
    }

    let xv = x.values();
    let tv = t.get();
    let h_x = vandermonde_h(x);
    let h_y2 = pairwise_product(w2.y());
    let n_fact: f64 = (1..=n).map(|k| k as f64).product();
    let prefactor = n_fact * h_y2 / h_x;

    let (lhs, quad_error) = match n {
        1 => {
            let out = integrate(
                |y| raw::q_det(xv, &[y], w2.x(), w2.y(), tv),
                xv[0],
                xv[1],
                cfg,
            )?;
            (prefactor * out.value, prefactor.abs() * out.abs_error)
        }
        _ => {
            let out = integrate_2d(
                |y1, y2| raw::q_det(xv, &[y1, y2], w2.x(), w2.y(), tv),
                xv[0],
                xv[1],
                |_| xv[1],
                |_| xv[2],
                cfg,
            )?;
            (prefactor * out.value, prefactor.abs() * out.abs_error)
        }
    };

    // p+_t(x, x') lambda(x', y') = n! h(y') det{phi_t(x'_j - x_i)} / h(x):
    // the h(x') factors of the two terms cancel.
    let rhs = n_fact * h_y2 * raw::km_det(xv, w2.x(), tv) / h_x;

    let residual = (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE);
    Ok(ResidualOutcome { residual, lhs, rhs, quad_error })
}

/// Finite-difference check of the mixed-derivative duality at `n = 1`:
/// the pair density as `(-1)^n` times the mixed derivative (in the `y`
/// starting points and `x'` thresholds) of the coalescing distribution
/// function of the interleaved configuration.
///
/// Returns `|central difference - q_t(w, w2)|`; the stencil converges at
/// order `h^2`.
pub fn coalescing_duality_residual(
    w: &InterlacedPoint,
    w2: &InterlacedPoint,
    t: Time,
    h: f64,
) -> Result<f64> {
    if w.rank() != 1 || w2.rank() != 1 {
        return Err(Error::domain("mixed-derivative duality check supports n = 1 only"));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::domain("step h must be finite and positive"));
    }
    let (x, y) = (w.x(), w.y());
    let (x2, y2) = (w2.x(), w2.y());
    let min_gap = [y[0] - x[0], x[1] - y[0], y2[0] - x2[0], x2[1] - y2[0]]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if min_gap < 4.0 * h {
        return Err(Error::domain(format!(
            "stencil overlap: minimal spacing {min_gap:.3e} below 4h = {:.3e}",
            4.0 * h
        )));
    }

    let tv = t.get();
    // starting configuration interleaved as (x_1, y_1, x_2); thresholds as
    // (x'_1, y'_1, x'_2). Differentiate in y_1 and both thresholds x'_i.
    let mut fd = 0.0;
    for sy in [1.0, -1.0] {
        for s1 in [1.0, -1.0] {
            for s2 in [1.0, -1.0] {
                let z = [x[0], y[0] + sy * h, x[1]];
                let zp = [x2[0] + s1 * h, y2[0], x2[1] + s2 * h];
                fd += sy * s1 * s2 * raw::coalescing_det(&z, &zp, tv);
            }
        }
    }
    let denom = 8.0 * h * h * h;
    let mixed = -fd / denom; // (-1)^n with n = 1
    let q = raw::q_det(x, y, x2, y2, tv);
    Ok((mixed - q).abs())
}
