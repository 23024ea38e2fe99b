//! Dense determinant evaluation (LU with partial pivoting, via nalgebra)
//! with sign/log decomposition and the negative-clipping policy shared by
//! all determinantal densities.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Relative slack below zero tolerated before a density evaluation is
/// treated as numerically inconsistent.
pub(crate) const NEGATIVE_CLIP: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub(crate) struct DetValue {
    /// Determinant in ordinary floating point (may underflow to zero).
    pub value: f64,
    /// `ln |det|` accumulated from pivots; finite even when `value`
    /// underflows. `None` when the matrix is exactly singular.
    pub log_abs: Option<f64>,
    /// Product of row sup-norms: a magnitude scale for clipping decisions.
    pub scale: f64,
}

/// Plain determinant value, for hot paths (finite differences, quadrature).
pub(crate) fn det(m: DMatrix<f64>) -> f64 {
    match m.nrows() {
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        3 => {
            m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
                - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
                + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
        }
        _ => m.lu().determinant(),
    }
}

/// Determinant together with its log decomposition and row scale.
pub(crate) fn det_full(m: DMatrix<f64>) -> DetValue {
    let n = m.nrows();
    let mut scale = 1.0f64;
    for i in 0..n {
        let row_max = (0..n).map(|j| m[(i, j)].abs()).fold(0.0f64, f64::max);
        scale *= row_max;
    }
    let lu = m.lu();
    let value = lu.determinant();
    let mut log_abs = 0.0f64;
    let mut singular = false;
    for d in lu.u().diagonal().iter() {
        if *d == 0.0 {
            singular = true;
            break;
        }
        log_abs += d.abs().ln();
    }
    DetValue { value, log_abs: (!singular).then_some(log_abs), scale }
}

/// Applies the density sign policy: values within `-NEGATIVE_CLIP * scale`
/// of zero are clipped to zero, anything more negative is rejected.
pub(crate) fn clip_nonnegative(d: DetValue, what: &str) -> Result<(f64, Option<f64>)> {
    if d.value >= 0.0 {
        let log = (d.value > 0.0).then(|| d.log_abs).flatten();
        Ok((d.value, log))
    } else if d.value >= -NEGATIVE_CLIP * d.scale.max(f64::MIN_POSITIVE) {
        Ok((0.0, None))
    } else {
        Err(Error::Numerical(format!(
            "{what} evaluated to {:.6e}, beyond the negative tolerance {:.1e} (scale {:.3e})",
            d.value,
            NEGATIVE_CLIP,
            d.scale
        )))
    }
}
