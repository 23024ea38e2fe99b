//! One-step reflection maps: the deterministic two-sided projection with
//! local-time attribution, and the exact bridge-sampled one-sided push used
//! when bridge corrections are enabled.

use crate::error::{Error, Result};

/// Result of one reflected Euler step: the constrained value and the local
/// time spent pushing up (`dl_minus`) and down (`dl_plus`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkorokhodStep {
    pub value: f64,
    pub dl_minus: f64,
    pub dl_plus: f64,
}

const FIXED_POINT_TOL: f64 = 1e-14;
const MAX_ALTERNATIONS: usize = 100;

/// Applies the free increment, then projects back into `[lower, upper]` by
/// alternating the one-sided Skorokhod maps to a fixed point. Pushed-up
/// distance is attributed to `dl_minus`, pushed-down to `dl_plus`; in a
/// resolved step at most one is nonzero.
pub fn skorokhod_step(
    value: f64,
    increment: f64,
    lower: Option<f64>,
    upper: Option<f64>,
) -> Result<SkorokhodStep> {
    if let (Some(lo), Some(hi)) = (lower, upper) {
        if lo > hi {
            return Err(Error::domain(format!("reflection interval empty: lower {lo} > upper {hi}")));
        }
    }
    let mut v = value + increment;
    let mut dl_minus = 0.0;
    let mut dl_plus = 0.0;
    for _ in 0..MAX_ALTERNATIONS {
        let mut moved = 0.0f64;
        if let Some(lo) = lower {
            if v < lo {
                dl_minus += lo - v;
                moved = moved.max(lo - v);
                v = lo;
            }
        }
        if let Some(hi) = upper {
            if v > hi {
                dl_plus += v - hi;
                moved = moved.max(v - hi);
                v = hi;
            }
        }
        if moved <= FIXED_POINT_TOL {
            break;
        }
    }
    Ok(SkorokhodStep { value: v, dl_minus, dl_plus })
}

/// Exact one-sided local-time push over one step.
///
/// `d0 >= 0` is the current distance to the barrier and `d1_free` the free
/// endpoint distance; the in-step minimum of the distance process is a
/// Brownian-bridge minimum with variance `var_dt`, sampled by inversion
/// from the uniform `u` in (0, 1]. Returns the push `L`, so the reflected
/// distance is `d1_free + L`.
pub(crate) fn bridge_reflect_push(d0: f64, d1_free: f64, var_dt: f64, u: f64) -> f64 {
    let gap = d1_free - d0;
    let min = 0.5 * (d0 + d1_free - (gap * gap - 2.0 * var_dt * u.ln()).sqrt());
    (-min).max(0.0)
}

/// Probability that a Brownian bridge between gap endpoints `a` and `b`
/// (variance `var_dt` over the step) hits zero.
pub(crate) fn bridge_crossing_prob(a: f64, b: f64, var_dt: f64) -> f64 {
    if a <= 0.0 || b <= 0.0 {
        1.0
    } else {
        (-2.0 * a * b / var_dt).exp()
    }
}

/// Maximum of a Brownian bridge between values `a` and `b` with variance
/// `var_dt`, sampled by inversion from the uniform `u` in (0, 1].
pub(crate) fn bridge_max(a: f64, b: f64, var_dt: f64, u: f64) -> f64 {
    let gap = b - a;
    0.5 * (a + b + (gap * gap - 2.0 * var_dt * u.ln()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_motion() {
        let s = skorokhod_step(0.0, 1.0, None, None).unwrap();
        assert_eq!(s, SkorokhodStep { value: 1.0, dl_minus: 0.0, dl_plus: 0.0 });
    }

    #[test]
    fn one_sided_reflection_at_zero() {
        let s = skorokhod_step(0.0, -1.0, Some(0.0), None).unwrap();
        assert_eq!(s.value, 0.0);
        assert_eq!(s.dl_minus, 1.0);
        assert_eq!(s.dl_plus, 0.0);
    }

    #[test]
    fn two_sided_single_violation() {
        let s = skorokhod_step(0.5, 1.0, Some(0.0), Some(1.0)).unwrap();
        assert_eq!(s.value, 1.0);
        assert_eq!(s.dl_minus, 0.0);
        assert_eq!(s.dl_plus, 0.5);
    }

    #[test]
    fn only_one_side_pushes() {
        for &(v, inc) in &[(0.2, -5.0), (0.2, 5.0), (0.9, 0.05), (0.1, -0.05)] {
            let s = skorokhod_step(v, inc, Some(0.0), Some(1.0)).unwrap();
            assert!(s.dl_minus * s.dl_plus == 0.0);
            assert!((0.0..=1.0).contains(&s.value));
        }
    }

    #[test]
    fn empty_interval_rejected() {
        assert!(skorokhod_step(0.0, 0.0, Some(1.0), Some(0.0)).is_err());
    }

    #[test]
    fn degenerate_interval_pins_value() {
        let s = skorokhod_step(0.3, 0.4, Some(0.2), Some(0.2)).unwrap();
        assert_eq!(s.value, 0.2);
    }

    #[test]
    fn bridge_push_limits() {
        // u = 1 means the bridge min equals min(d0, d1): push only if endpoint negative
        assert_eq!(bridge_reflect_push(1.0, 0.5, 0.01, 1.0), 0.0);
        assert_eq!(bridge_reflect_push(1.0, -0.5, 0.01, 1.0), 0.5);
        // pushes are nonnegative and increase as u decreases
        let p1 = bridge_reflect_push(0.05, 0.04, 0.01, 0.9);
        let p2 = bridge_reflect_push(0.05, 0.04, 0.01, 0.1);
        assert!(p2 >= p1 && p1 >= 0.0);
    }

    #[test]
    fn crossing_probability_limits() {
        assert_eq!(bridge_crossing_prob(0.0, 1.0, 0.1), 1.0);
        assert!(bridge_crossing_prob(3.0, 3.0, 0.001) < 1e-300);
        let p = bridge_crossing_prob(0.1, 0.2, 2.0 * 0.01);
        assert!((p - (-2.0f64).exp()).abs() < 1e-12);
    }
}
