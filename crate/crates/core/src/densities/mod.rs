//! Closed-form finite-dimensional distributions of the interlaced /
//! non-colliding systems: Karlin-McGregor determinants and their
//! conditioned versions, the block determinant of the killed interlaced
//! pair and its dual, entrance laws, the interlacing kernel, the
//! edge-process determinant, and the largest-eigenvalue and coalescing
//! distribution functions.

mod det;
pub mod raw;
mod residuals;

pub use residuals::{coalescing_duality_residual, intertwining_residual, ResidualOutcome};

use crate::error::{Error, Result};
use crate::kernels::Time;
use crate::point::{is_interlaced, GTPattern, InterlacedPoint, OrderedPoint};

use det::{clip_nonnegative, det_full};

const LN_2PI: f64 = 1.837_877_066_409_345_4;

/// A nonnegative density (or kernel) evaluation.
///
/// `log_scale` carries `ln(value)` computed in log space where available,
/// so extreme evaluations remain reportable after `value` underflows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityValue {
    pub value: f64,
    pub log_scale: Option<f64>,
}

impl DensityValue {
    fn new(value: f64, log_scale: Option<f64>) -> Self {
        DensityValue { value, log_scale }
    }

    fn zero() -> Self {
        DensityValue { value: 0.0, log_scale: None }
    }

    fn from_log(log: f64) -> Self {
        DensityValue { value: log.exp(), log_scale: Some(log) }
    }
}

impl From<DensityValue> for f64 {
    fn from(d: DensityValue) -> f64 {
        d.value
    }
}

/// Product of pairwise differences `prod_{i<j} (v_j - v_i)`.
///
/// This is the harmonic function of the ordered chamber; it vanishes iff two
/// coordinates coincide and is nonnegative on ordered input.
pub fn vandermonde_h(y: &OrderedPoint) -> f64 {
    pairwise_product(y.values())
}

fn pairwise_product(v: &[f64]) -> f64 {
    let mut p = 1.0;
    for i in 0..v.len() {
        for j in (i + 1)..v.len() {
            p *= v[j] - v[i];
        }
    }
    p
}

/// `ln prod (v_j - v_i)`, or `None` when two coordinates coincide.
fn log_pairwise(v: &[f64]) -> Option<f64> {
    let mut s = 0.0;
    for i in 0..v.len() {
        for j in (i + 1)..v.len() {
            let d = v[j] - v[i];
            if d <= 0.0 {
                return None;
            }
            s += d.ln();
        }
    }
    Some(s)
}

/// `h(num) / h(den)` as a product of the canonically paired factor ratios,
/// which stays well conditioned near the chamber boundary.
fn h_ratio(num: &[f64], den: &[f64]) -> f64 {
    let mut r = 1.0;
    for i in 0..num.len() {
        for j in (i + 1)..num.len() {
            r *= (num[j] - num[i]) / (den[j] - den[i]);
        }
    }
    r
}

fn ln_factorial(m: usize) -> f64 {
    (1..=m).map(|k| (k as f64).ln()).sum()
}

/// `ln Z_n` with `Z_n = (2 pi)^{n/2} prod_{j<n} j!`.
fn ln_z(n: usize) -> f64 {
    0.5 * n as f64 * LN_2PI + (1..n).map(ln_factorial).sum::<f64>()
}

fn check_same_len(a: usize, b: usize, what: &str) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::dimension(format!("{what}: lengths {a} and {b} differ")))
    }
}

/// Karlin-McGregor transition density of Brownian motion killed on
/// coordinate collision: `det { phi_t(y'_j - y_i) }`.
pub fn km_density(y: &OrderedPoint, y2: &OrderedPoint, t: Time) -> Result<DensityValue> {
    check_same_len(y.len(), y2.len(), "km_density")?;
    let d = det_full(raw::km_matrix(y.values(), y2.values(), t.get()));
    let (value, log) = clip_nonnegative(d, "km_density")?;
    Ok(DensityValue::new(value, log))
}

/// Transition density of the non-colliding (conditioned) system:
/// `(h(y') / h(y)) det { phi_t(y'_j - y_i) }`.
pub fn km_density_plus(y: &OrderedPoint, y2: &OrderedPoint, t: Time) -> Result<DensityValue> {
    check_same_len(y.len(), y2.len(), "km_density_plus")?;
    if !y.is_strict() {
        return Err(Error::domain("km_density_plus requires strictly increasing source point"));
    }
    let base = km_density(y, y2, t)?;
    let ratio = h_ratio(y2.values(), y.values());
    let log = match (base.log_scale, ratio > 0.0) {
        (Some(l), true) => Some(l + ratio.ln()),
        _ => None,
    };
    Ok(DensityValue::new(base.value * ratio, log))
}

/// Transition density of the interlaced pair killed when two `y`
/// coordinates meet: the `(2n+1) x (2n+1)` block determinant.
pub fn q_density(w: &InterlacedPoint, w2: &InterlacedPoint, t: Time) -> Result<DensityValue> {
    check_same_len(w.rank(), w2.rank(), "q_density")?;
    let d = raw::q_det_full(w.x(), w.y(), w2.x(), w2.y(), t.get());
    let (value, log) = clip_nonnegative(d, "q_density")?;
    Ok(DensityValue::new(value, log))
}

/// Dual family: `q_hat_t(w, w') = q_t(w', w)`.
pub fn q_density_dual(w: &InterlacedPoint, w2: &InterlacedPoint, t: Time) -> Result<DensityValue> {
    q_density(w2, w, t)
}

/// Interlaced-pair density conditioned on the `y` particles never
/// colliding: `(h(y') / h(y)) q_t(w, w')`.
pub fn q_density_plus(w: &InterlacedPoint, w2: &InterlacedPoint, t: Time) -> Result<DensityValue> {
    check_same_len(w.rank(), w2.rank(), "q_density_plus")?;
    if w.rank() > 0 && !w.y().windows(2).all(|p| p[0] < p[1]) {
        return Err(Error::domain("q_density_plus requires strictly increasing y in the source"));
    }
    let base = q_density(w, w2, t)?;
    let ratio = h_ratio(w2.y(), w.y());
    let log = match (base.log_scale, ratio > 0.0) {
        (Some(l), true) => Some(l + ratio.ln()),
        _ => None,
    };
    Ok(DensityValue::new(base.value * ratio, log))
}

/// Entrance law of the non-colliding system started at the origin:
/// `mu^n_t(y) = (1/Z_n) t^{-n^2/2} exp(-sum y_i^2 / 2t) h(y)^2`.
pub fn entrance_mu(y: &OrderedPoint, t: Time) -> DensityValue {
    let n = y.len();
    let tv = t.get();
    match log_pairwise(y.values()) {
        None => DensityValue::zero(),
        Some(log_h) => {
            let sum_sq: f64 = y.values().iter().map(|v| v * v).sum();
            let log = -ln_z(n) - 0.5 * (n * n) as f64 * tv.ln() - sum_sq / (2.0 * tv) + 2.0 * log_h;
            DensityValue::from_log(log)
        }
    }
}

/// Interlacing kernel `lambda^n(x, y) = n! h(y) / h(x)`, a probability
/// density in `y` on the interlacing region of `x`. Returns zero off that
/// region.
pub fn lambda_kernel(x: &OrderedPoint, y: &OrderedPoint) -> Result<DensityValue> {
    if x.len() != y.len() + 1 {
        return Err(Error::dimension(format!(
            "lambda kernel needs |x| = |y| + 1, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    if !x.is_strict() {
        return Err(Error::domain("lambda kernel requires strictly increasing x"));
    }
    if !is_interlaced(x.values(), y.values()) {
        return Ok(DensityValue::zero());
    }
    let n = y.len();
    Ok(match (log_pairwise(y.values()), log_pairwise(x.values())) {
        (Some(log_hy), Some(log_hx)) => DensityValue::from_log(ln_factorial(n) + log_hy - log_hx),
        _ => DensityValue::zero(),
    })
}

/// Entrance law of the conditioned interlaced pair started at the origin:
/// `nu^n_t(x, y) = (n!/Z_{n+1}) t^{-(n+1)^2/2} exp(-sum x_i^2/2t) h(x) h(y)`.
///
/// Factorizes as `mu^{n+1}_t(x) lambda^n(x, y)`.
pub fn entrance_nu(w: &InterlacedPoint, t: Time) -> DensityValue {
    let n = w.rank();
    let tv = t.get();
    match (log_pairwise(w.x()), log_pairwise(w.y())) {
        (Some(log_hx), Some(log_hy)) => {
            let sum_sq: f64 = w.x().iter().map(|v| v * v).sum();
            let m = n + 1;
            let log = ln_factorial(n) - ln_z(m) - 0.5 * (m * m) as f64 * tv.ln()
                - sum_sq / (2.0 * tv)
                + log_hx
                + log_hy;
            DensityValue::from_log(log)
        }
        _ => DensityValue::zero(),
    }
}

/// Entrance density of the full triangular system on its cone:
/// `(2 pi)^{-n/2} t^{-n^2/2} exp(-sum (x^n_i)^2 / 2t) h(x^n)`,
/// a function of the top row alone apart from the interlacing indicator.
pub fn gt_entrance_density(p: &GTPattern, t: Time) -> DensityValue {
    if !p.is_valid() {
        return DensityValue::zero();
    }
    let n = p.order();
    let top = p.top_row();
    let tv = t.get();
    match log_pairwise(top) {
        None => DensityValue::zero(),
        Some(log_h) => {
            let sum_sq: f64 = top.iter().map(|v| v * v).sum();
            let log = -0.5 * n as f64 * LN_2PI - 0.5 * (n * n) as f64 * tv.ln()
                - sum_sq / (2.0 * tv)
                + log_h;
            DensityValue::from_log(log)
        }
    }
}

/// Transition density of the edge process:
/// `r_t(x, x') = det { Phi_t^(i-j)(x'_j - x_i) }`.
pub fn r_density(x: &OrderedPoint, x2: &OrderedPoint, t: Time) -> Result<DensityValue> {
    check_same_len(x.len(), x2.len(), "r_density")?;
    let d = det_full(raw::r_matrix(x.values(), x2.values(), t.get()));
    let (value, log) = clip_nonnegative(d, "r_density")?;
    Ok(DensityValue::new(value, log))
}

/// Distribution function of the largest coordinate of the non-colliding
/// system started at the origin: `det { Phi_t^(i-j+1)(x) }`, clamped to
/// `[0, 1]`.
pub fn top_eigenvalue_cdf(n: usize, x: f64, t: Time) -> f64 {
    raw::top_det(n, x, t.get()).clamp(0.0, 1.0)
}

/// Joint distribution function `P(Z_t(z_i) <= z'_i for all i)` of
/// coalescing motions started from the ordered configuration `z`,
/// clamped to `[0, 1]`.
///
/// `z2` need not be ordered; ordered thresholds are the documented domain.
pub fn coalescing_cdf(z: &OrderedPoint, z2: &[f64], t: Time) -> Result<f64> {
    check_same_len(z.len(), z2.len(), "coalescing_cdf")?;
    if z2.iter().any(|v| v.is_nan()) {
        return Err(Error::domain("coalescing_cdf threshold contains NaN"));
    }
    Ok(raw::coalescing_det(z.values(), z2, t.get()).clamp(0.0, 1.0))
}
