//! Scalar Gaussian kernels: the centered density `phi_t`, its distribution
//! function `Phi_t`, derivatives, and the family of iterated integrals
//! `Phi_t^(n)` that appear as entries of the determinantal transition
//! densities.
//!
//! Conventions: `Phi_t^(0) = phi_t`, `Phi_t^(1) = Phi_t`; for `n >= 2` the
//! n-th iterated integral of `phi_t`, and for `n <= -1` the |n|-th derivative
//! of `phi_t`. Differentiation lowers the order by one for every `n`.
//!
//! All kernels are extended by continuity to `y = +/-inf` so that CDF-style
//! determinants can be evaluated at infinite arguments.

use crate::error::{Error, Result};

/// Largest iterated-integral / derivative order evaluated by [`iterated_phi`].
pub const MAX_ITERATED_ORDER: i64 = 64;

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;
const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Strictly positive time parameter: the variance of the Gaussian kernel.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Time(f64);

impl Time {
    pub fn new(t: f64) -> Result<Self> {
        if t.is_finite() && t > 0.0 {
            Ok(Time(t))
        } else {
            Err(Error::domain(format!("time parameter must be finite and > 0, got {t}")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Time {
    type Error = Error;
    fn try_from(t: f64) -> Result<Self> {
        Time::new(t)
    }
}

fn check_arg(y: f64) -> Result<()> {
    if y.is_nan() {
        Err(Error::domain("kernel argument is NaN"))
    } else {
        Ok(())
    }
}

/// Centered Gaussian density with variance `t`.
pub fn gauss_pdf(y: f64, t: Time) -> Result<f64> {
    check_arg(y)?;
    Ok(pdf_raw(y, t.get()))
}

/// Distribution function of the centered Gaussian with variance `t`.
pub fn gauss_cdf(y: f64, t: Time) -> Result<f64> {
    check_arg(y)?;
    Ok(cdf_raw(y, t.get()))
}

/// Derivative of the Gaussian density: `-y/sqrt(2 pi t^3) exp(-y^2/(2t))`.
pub fn gauss_pdf_prime(y: f64, t: Time) -> Result<f64> {
    check_arg(y)?;
    Ok(pdf_prime_raw(y, t.get()))
}

/// Iterated integral (`n >= 1`), the density itself (`n = 0`) or derivative
/// (`n <= -1`) of the Gaussian kernel of variance `t`.
pub fn iterated_phi(n: i64, y: f64, t: Time) -> Result<f64> {
    check_arg(y)?;
    if n.abs() > MAX_ITERATED_ORDER {
        return Err(Error::Order { requested: n, max: MAX_ITERATED_ORDER });
    }
    Ok(iterated_phi_raw(n, y, t.get()))
}

#[inline]
pub(crate) fn pdf_raw(y: f64, t: f64) -> f64 {
    if y.is_infinite() {
        return 0.0;
    }
    (-y * y / (2.0 * t)).exp() / (SQRT_2PI * t.sqrt())
}

#[inline]
pub(crate) fn cdf_raw(y: f64, t: f64) -> f64 {
    if y == f64::INFINITY {
        return 1.0;
    }
    if y == f64::NEG_INFINITY {
        return 0.0;
    }
    // erfc keeps full relative accuracy in the lower tail.
    0.5 * libm::erfc(-y / t.sqrt() * FRAC_1_SQRT_2)
}

#[inline]
pub(crate) fn pdf_prime_raw(y: f64, t: f64) -> f64 {
    if y.is_infinite() {
        return 0.0;
    }
    -(y / t) * pdf_raw(y, t)
}

pub(crate) fn iterated_phi_raw(n: i64, y: f64, t: f64) -> f64 {
    match n {
        0 => pdf_raw(y, t),
        1 => cdf_raw(y, t),
        -1 => pdf_prime_raw(y, t),
        _ if n >= 2 => iterated_positive(n, y, t),
        _ => derivative_negative(-n, y, t),
    }
}

/// Forward three-term recurrence, obtained from the defining integral by
/// integration by parts: `(k-1) Phi^(k) = y Phi^(k-1) + t Phi^(k-2)`.
fn iterated_positive(n: i64, y: f64, t: f64) -> f64 {
    if y == f64::NEG_INFINITY {
        return 0.0;
    }
    if y == f64::INFINITY {
        return f64::INFINITY;
    }
    let mut lo = pdf_raw(y, t); // order k-2
    let mut hi = cdf_raw(y, t); // order k-1
    for k in 2..=n {
        let next = (y * hi + t * lo) / (k - 1) as f64;
        lo = hi;
        hi = next;
    }
    hi
}

/// `m`-th derivative of `phi_t` via probabilists' Hermite polynomials:
/// `phi_t^(m)(y) = (-1)^m t^(-m/2) He_m(y/sqrt t) phi_t(y)`.
fn derivative_negative(m: i64, y: f64, t: f64) -> f64 {
    if y.is_infinite() {
        return 0.0;
    }
    let z = y / t.sqrt();
    let mut h_prev = 1.0;
    let mut h = z;
    for k in 1..m {
        let next = z * h - k as f64 * h_prev;
        h_prev = h;
        h = next;
    }
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    sign * t.powf(-0.5 * m as f64) * h * pdf_raw(y, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn t(v: f64) -> Time {
        Time::new(v).unwrap()
    }

    #[test]
    fn pdf_reference_values() {
        assert_relative_eq!(gauss_pdf(0.0, t(1.0)).unwrap(), 0.3989422804014327, max_relative = 1e-15);
        assert_relative_eq!(gauss_pdf(2.0, t(4.0)).unwrap(), 0.12098536225957168, max_relative = 1e-15);
        assert_relative_eq!(gauss_pdf(1.0, t(1.0)).unwrap(), 0.24197072451914337, max_relative = 1e-15);
    }

    #[test]
    fn pdf_is_even_and_positive() {
        for &y in &[0.0, 0.3, 1.7, 9.0] {
            let p = gauss_pdf(y, t(0.7)).unwrap();
            assert!(p > 0.0);
            assert_eq!(p, gauss_pdf(-y, t(0.7)).unwrap());
        }
    }

    #[test]
    fn pdf_scaling_relation() {
        // phi_t(y) = t^{-1/2} phi_1(y / sqrt t)
        for &(y, tv) in &[(0.4, 0.25), (1.3, 3.0), (-2.0, 0.1)] {
            let lhs = gauss_pdf(y, t(tv)).unwrap();
            let rhs = gauss_pdf(y / tv.sqrt(), t(1.0)).unwrap() / tv.sqrt();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-14);
        }
    }

    #[test]
    fn cdf_reference_values() {
        assert_relative_eq!(gauss_cdf(0.0, t(2.3)).unwrap(), 0.5, max_relative = 1e-15);
        assert_eq!(gauss_cdf(f64::INFINITY, t(0.5)).unwrap(), 1.0);
        assert_eq!(gauss_cdf(f64::NEG_INFINITY, t(0.5)).unwrap(), 0.0);
        // frozen from an erf-based oracle, cross-checked by quadrature below
        assert_relative_eq!(gauss_cdf(1.0, t(1.0)).unwrap(), 0.8413447460685429, max_relative = 1e-14);
    }

    #[test]
    fn cdf_matches_pdf_quadrature() {
        // Simpson oracle for the defining integral, independent of erfc.
        for &(y, tv) in &[(1.0f64, 1.0f64), (-0.7, 0.4), (2.1, 3.2)] {
            let a = -14.0 * tv.sqrt();
            let n = 40_000;
            let h = (y - a) / n as f64;
            let f = |x: f64| pdf_raw(x, tv);
            let mut s = f(a) + f(y);
            for i in 1..n {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                s += w * f(a + i as f64 * h);
            }
            let quad = s * h / 3.0;
            assert_relative_eq!(gauss_cdf(y, t(tv)).unwrap(), quad, epsilon = 1e-13);
        }
    }

    #[test]
    fn pdf_prime_reference_values() {
        assert_eq!(gauss_pdf_prime(0.0, t(1.0)).unwrap(), 0.0);
        assert_relative_eq!(
            gauss_pdf_prime(1.0, t(1.0)).unwrap(),
            -0.24197072451914337,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            gauss_pdf_prime(-1.0, t(1.0)).unwrap(),
            0.24197072451914337,
            max_relative = 1e-15
        );
    }

    #[test]
    fn iterated_low_orders_match_base_kernels() {
        for &(y, tv) in &[(0.0, 1.0), (0.9, 0.3), (-1.4, 2.0)] {
            assert_eq!(iterated_phi(0, y, t(tv)).unwrap(), gauss_pdf(y, t(tv)).unwrap());
            assert_eq!(iterated_phi(1, y, t(tv)).unwrap(), gauss_cdf(y, t(tv)).unwrap());
            assert_eq!(iterated_phi(-1, y, t(tv)).unwrap(), gauss_pdf_prime(y, t(tv)).unwrap());
        }
    }

    #[test]
    fn iterated_reference_values() {
        // frozen from quadrature of the defining integral
        assert_relative_eq!(iterated_phi(1, 0.0, t(1.0)).unwrap(), 0.5, max_relative = 1e-15);
        assert_relative_eq!(
            iterated_phi(2, 0.0, t(1.0)).unwrap(),
            0.3989422804014327,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            iterated_phi(3, 0.7, t(0.8)).unwrap(),
            0.5970273689351863,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            iterated_phi(5, -0.4, t(2.0)).unwrap(),
            0.13404072910650391,
            max_relative = 1e-12
        );
        assert_eq!(iterated_phi(-1, 0.0, t(1.0)).unwrap(), 0.0);
        assert_relative_eq!(
            iterated_phi(-2, 0.9, t(1.3)).unwrap(),
            -0.07429307433455219,
            max_relative = 1e-12
        );
    }

    #[test]
    fn iterated_matches_defining_integral() {
        // Simpson quadrature of int_{-inf}^y (y-x)^{n-1}/(n-1)! phi_t(x) dx
        let fact = |m: i64| (1..=m).map(|k| k as f64).product::<f64>();
        for n in 2..=5i64 {
            for &(y, tv) in &[(0.0f64, 1.0f64), (0.8, 0.5), (-0.6, 2.0)] {
                let a = y - 16.0 * tv.sqrt();
                let steps = 60_000;
                let h = (y - a) / steps as f64;
                let f = |x: f64| (y - x).powi((n - 1) as i32) / fact(n - 1) * pdf_raw(x, tv);
                let mut s = f(a) + f(y);
                for i in 1..steps {
                    let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                    s += w * f(a + i as f64 * h);
                }
                let quad = s * h / 3.0;
                assert_relative_eq!(iterated_phi(n, y, t(tv)).unwrap(), quad, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn derivative_ladder() {
        // central difference of Phi^(n) matches Phi^(n-1) to O(h^2)
        let h = 1e-4;
        for n in -4..=6i64 {
            for &y in &[-1.5, -0.3, 0.0, 0.6, 2.0] {
                let up = iterated_phi(n, y + h, t(1.0)).unwrap();
                let dn = iterated_phi(n, y - h, t(1.0)).unwrap();
                let fd = (up - dn) / (2.0 * h);
                let exact = iterated_phi(n - 1, y, t(1.0)).unwrap();
                assert!(
                    (fd - exact).abs() < 1e-6,
                    "ladder failed at n={n}, y={y}: fd={fd}, exact={exact}"
                );
            }
        }
    }

    #[test]
    fn scaling_relation_all_orders() {
        // Phi_t^(n)(y) = t^{(n-1)/2} Phi_1^(n)(y / sqrt t): order 1 (the
        // distribution function) is scale-free, each integration adds a
        // factor sqrt(t), each derivative removes one
        for n in -4..=6i64 {
            for &(y, tv) in &[(0.7, 0.3), (-1.1, 2.5), (0.0, 0.01)] {
                let lhs = iterated_phi(n, y, t(tv)).unwrap();
                let rhs =
                    tv.powf((n - 1) as f64 / 2.0) * iterated_phi(n, y / tv.sqrt(), t(1.0)).unwrap();
                assert_relative_eq!(lhs, rhs, max_relative = 1e-12, epsilon = 1e-300);
            }
        }
    }

    #[test]
    fn heat_equation_residual_decays() {
        // (t,y) -> Phi^(n)_t(y' - y) solves du/dt = 1/2 d2u/dy2
        let residual = |n: i64, y: f64, tv: f64, h: f64| {
            let k = h;
            let u = |yy: f64, tt: f64| iterated_phi_raw(n, 0.4 - yy, tt);
            let d2 = (u(y + h, tv) - 2.0 * u(y, tv) + u(y - h, tv)) / (h * h);
            let dt = (u(y, tv + k) - u(y, tv - k)) / (2.0 * k);
            0.5 * d2 - dt
        };
        for n in -2..=4i64 {
            let r1 = residual(n, 0.1, 0.8, 2e-2).abs();
            let r2 = residual(n, 0.1, 0.8, 1e-2).abs();
            assert!(
                r2 < r1 / 2.5 || r1 < 1e-9,
                "heat residual not decaying for n={n}: {r1} -> {r2}"
            );
        }
    }

    #[test]
    fn recurrence_consistency() {
        // (n-1) Phi^(n) = y Phi^(n-1) + t Phi^(n-2)
        for n in 2..=5i64 {
            for &(y, tv) in &[(0.3, 1.0), (-0.8, 0.6)] {
                let lhs = (n - 1) as f64 * iterated_phi(n, y, t(tv)).unwrap();
                let rhs = y * iterated_phi(n - 1, y, t(tv)).unwrap()
                    + tv * iterated_phi(n - 2, y, t(tv)).unwrap();
                assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn domain_and_capability_errors() {
        assert!(Time::new(0.0).is_err());
        assert!(Time::new(-1.0).is_err());
        assert!(Time::new(f64::NAN).is_err());
        assert!(gauss_pdf(f64::NAN, t(1.0)).is_err());
        assert!(iterated_phi(65, 0.0, t(1.0)).is_err());
        assert!(iterated_phi(-65, 0.0, t(1.0)).is_err());
        assert!(iterated_phi(64, 0.0, t(1.0)).is_ok());
    }

    #[test]
    fn infinite_arguments_take_limit_values() {
        assert_eq!(gauss_pdf(f64::INFINITY, t(1.0)).unwrap(), 0.0);
        assert_eq!(gauss_pdf_prime(f64::NEG_INFINITY, t(1.0)).unwrap(), 0.0);
        assert_eq!(iterated_phi(1, f64::INFINITY, t(2.0)).unwrap(), 1.0);
        assert_eq!(iterated_phi(3, f64::NEG_INFINITY, t(2.0)).unwrap(), 0.0);
        assert_eq!(iterated_phi(-3, f64::INFINITY, t(2.0)).unwrap(), 0.0);
    }
}
