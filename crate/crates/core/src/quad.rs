//! Adaptive Gauss-Kronrod quadrature (7-15 pair) over finite intervals,
//! with nested tensorized rules for two- and three-dimensional regions of
//! the form `a <= u <= b`, `lo(u) <= v <= hi(u)`, ...
//!
//! Infinite Gaussian domains are handled by the callers, which truncate at
//! a configurable multiple of the standard deviation (default 12, Gaussian
//! tail mass < 1e-31).

use crate::error::{Error, Result};
use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Abscissae of the 15-point Kronrod rule on [-1, 1] (positive half).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

/// Weights of the 15-point Kronrod rule.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// Weights of the embedded 7-point Gauss rule.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Truncation radius for Gaussian integrands, in standard deviations.
pub const GAUSS_SUPPORT_RADIUS: f64 = 12.0;

/// Tolerances and budget for adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { abs_tol: 1e-10, rel_tol: 1e-8, max_subdivisions: 4000 }
    }
}

impl QuadConfig {
    pub fn with_tols(abs_tol: f64, rel_tol: f64) -> Self {
        QuadConfig { abs_tol, rel_tol, ..Default::default() }
    }

    /// Looser configuration for the inner dimension of a nested integral.
    fn inner(&self) -> Self {
        QuadConfig {
            abs_tol: self.abs_tol * 0.1,
            rel_tol: self.rel_tol * 0.1,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

/// Value and error estimate of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadOutcome {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Segment {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn kronrod_15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut res_kronrod = WGK[7] * f_center;
    let mut res_gauss = WG[3] * f_center;
    let mut res_abs = res_kronrod.abs();
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        let sum = f1 + f2;
        res_kronrod += WGK[j] * sum;
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * sum;
        }
    }
    let value = res_kronrod * half;
    let mut err = ((res_kronrod - res_gauss) * half).abs();
    // standard QUADPACK error rescaling
    let res_asc = res_abs * half.abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * 1.0_f64.min((200.0 * err / res_asc).powf(1.5));
    }
    (value, err)
}

/// Adaptive integration of `f` over the finite interval `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadOutcome> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integration bounds must be finite"));
    }
    if a >= b {
        return Ok(QuadOutcome { value: 0.0, abs_error: 0.0, evaluations: 0 });
    }
    let mut evaluations = 15usize;
    let (v, e) = kronrod_15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v, error: e });
    let mut total_value = v;
    let mut total_error = e;
    // error on intervals at floating-point resolution, no longer refinable
    let mut stuck_error = 0.0;

    for _ in 0..cfg.max_subdivisions {
        if total_error <= cfg.abs_tol.max(cfg.rel_tol * total_value.abs()) {
            break;
        }
        let worst = match heap.pop() {
            Some(s) => s,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            stuck_error += worst.error;
            total_error -= worst.error;
            continue;
        }
        let (v1, e1) = kronrod_15(&mut f, worst.a, mid);
        let (v2, e2) = kronrod_15(&mut f, mid, worst.b);
        evaluations += 30;
        total_value += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
    }

    if !total_value.is_finite() {
        return Err(Error::Quadrature("integrand produced non-finite values".into()));
    }
    if total_error > cfg.abs_tol.max(cfg.rel_tol * total_value.abs()) {
        return Err(Error::Quadrature(format!(
            "error estimate {total_error:.3e} above tolerance after {evaluations} evaluations on [{a}, {b}]"
        )));
    }
    Ok(QuadOutcome { value: total_value, abs_error: total_error + stuck_error, evaluations })
}

/// Nested 2-D integral over `a <= u <= b`, `lo(u) <= v <= hi(u)`.
pub fn integrate_2d<F, L, U>(f: F, a: f64, b: f64, lo: L, hi: U, cfg: &QuadConfig) -> Result<QuadOutcome>
where
    F: Fn(f64, f64) -> f64,
    L: Fn(f64) -> f64,
    U: Fn(f64) -> f64,
{
    let inner_cfg = cfg.inner();
    let inner_failure: RefCell<Option<Error>> = RefCell::new(None);
    let inner_error = RefCell::new(0.0f64);
    let inner_evals = RefCell::new(0usize);
    let outer = integrate(
        |u| match integrate(|v| f(u, v), lo(u), hi(u), &inner_cfg) {
            Ok(out) => {
                let mut e = inner_error.borrow_mut();
                *e = e.max(out.abs_error);
                *inner_evals.borrow_mut() += out.evaluations;
                out.value
            }
            Err(err) => {
                *inner_failure.borrow_mut() = Some(err);
                f64::NAN
            }
        },
        a,
        b,
        cfg,
    );
    if let Some(err) = inner_failure.into_inner() {
        return Err(err);
    }
    let mut out = outer?;
    out.abs_error += inner_error.into_inner() * (b - a).abs();
    out.evaluations += inner_evals.into_inner();
    Ok(out)
}

/// Nested 3-D integral over `a <= u <= b`, `lo(u) <= v <= hi(u)`,
/// `lo2(u,v) <= w <= hi2(u,v)`.
#[allow(clippy::too_many_arguments)]
pub fn integrate_3d<F, L1, U1, L2, U2>(
    f: F,
    a: f64,
    b: f64,
    lo: L1,
    hi: U1,
    lo2: L2,
    hi2: U2,
    cfg: &QuadConfig,
) -> Result<QuadOutcome>
where
    F: Fn(f64, f64, f64) -> f64,
    L1: Fn(f64) -> f64,
    U1: Fn(f64) -> f64,
    L2: Fn(f64, f64) -> f64,
    U2: Fn(f64, f64) -> f64,
{
    let inner_cfg = cfg.inner();
    let inner_failure: RefCell<Option<Error>> = RefCell::new(None);
    let inner_error = RefCell::new(0.0f64);
    let inner_evals = RefCell::new(0usize);
    let outer = integrate(
        |u| {
            let res = integrate_2d(|v, w| f(u, v, w), lo(u), hi(u), |v| lo2(u, v), |v| hi2(u, v), &inner_cfg);
            match res {
                Ok(out) => {
                    let mut e = inner_error.borrow_mut();
                    *e = e.max(out.abs_error);
                    *inner_evals.borrow_mut() += out.evaluations;
                    out.value
                }
                Err(err) => {
                    *inner_failure.borrow_mut() = Some(err);
                    f64::NAN
                }
            }
        },
        a,
        b,
        cfg,
    );
    if let Some(err) = inner_failure.into_inner() {
        return Err(err);
    }
    let mut out = outer?;
    out.abs_error += inner_error.into_inner() * (b - a).abs();
    out.evaluations += inner_evals.into_inner();
    Ok(out)
}

/// Truncated support `[c - r sqrt(t), c + r sqrt(t)]` of a Gaussian kernel
/// of variance `t` centered at `c`.
pub fn gaussian_support(center: f64, t: f64, radius: f64) -> (f64, f64) {
    let half = radius * t.sqrt();
    (center - half, center + half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_exactness() {
        // K15 integrates low-degree polynomials exactly; adaptivity not needed
        let out = integrate(|x| 3.0 * x * x, 0.0, 2.0, &QuadConfig::default()).unwrap();
        assert_relative_eq!(out.value, 8.0, max_relative = 1e-14);
    }

    #[test]
    fn gaussian_mass() {
        let out = integrate(
            |x| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt(),
            -12.0,
            12.0,
            &QuadConfig::with_tols(1e-13, 1e-13),
        )
        .unwrap();
        assert_relative_eq!(out.value, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn needs_subdivision() {
        // sharp peak forces adaptive refinement
        let out = integrate(|x| 1.0 / (1e-6 + x * x), -1.0, 1.0, &QuadConfig::default()).unwrap();
        let exact = 2.0 * (1.0 / 1e-3) * (1.0f64 / 1e-3).atan();
        assert_relative_eq!(out.value, exact, max_relative = 1e-7);
        assert!(out.evaluations > 100);
    }

    #[test]
    fn empty_interval_is_zero() {
        let out = integrate(|_| 1.0, 1.0, 1.0, &QuadConfig::default()).unwrap();
        assert_eq!(out.value, 0.0);
        let out = integrate(|_| 1.0, 2.0, 1.0, &QuadConfig::default()).unwrap();
        assert_eq!(out.value, 0.0);
    }

    #[test]
    fn two_dim_triangle() {
        // area of {0 <= u <= 1, 0 <= v <= u} = 1/2
        let out = integrate_2d(|_, _| 1.0, 0.0, 1.0, |_| 0.0, |u| u, &QuadConfig::default()).unwrap();
        assert_relative_eq!(out.value, 0.5, max_relative = 1e-10);
    }

    #[test]
    fn three_dim_simplex() {
        // volume of {0 <= u <= v <= w <= 1} = 1/6
        let out = integrate_3d(
            |_, _, _| 1.0,
            0.0,
            1.0,
            |u| u,
            |_| 1.0,
            |_, v| v,
            |_, _| 1.0,
            &QuadConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(out.value, 1.0 / 6.0, max_relative = 1e-9);
    }

    #[test]
    fn non_convergence_reports_error() {
        let cfg = QuadConfig { abs_tol: 1e-300, rel_tol: 1e-300, max_subdivisions: 8 };
        let res = integrate(|x| 1.0 / (1e-12 + x * x), -1.0, 1.0, &cfg);
        assert!(matches!(res, Err(Error::Quadrature(_))));
    }

    #[test]
    fn infinite_bounds_rejected() {
        assert!(integrate(|x| x, 0.0, f64::INFINITY, &QuadConfig::default()).is_err());
    }
}
