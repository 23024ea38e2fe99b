//! One-sample goodness-of-fit statistics: the two-sided Kolmogorov-Smirnov
//! test with asymptotic p-values, and Pearson's chi-square test.

use crate::error::{Error, Result};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Result of a one-sample KS test.
#[derive(Debug, Clone, Copy)]
pub struct KsResult {
    /// sup-norm distance between the empirical and reference CDF
    pub statistic: f64,
    /// asymptotic p-value (Kolmogorov distribution of `sqrt(n) * D`)
    pub p_value: f64,
    pub n_samples: usize,
}

/// Two-sided one-sample KS test of `samples` against the reference `cdf`.
/// Samples are sorted internally; requires at least 100 of them.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<KsResult> {
    if samples.len() < 100 {
        return Err(Error::domain(format!("ks_test needs >= 100 samples, got {}", samples.len())));
    }
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::domain("ks_test samples contain NaN"));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    let p_value = kolmogorov_sf(n.sqrt() * d);
    Ok(KsResult { statistic: d, p_value, n_samples: xs.len() })
}

/// Survival function of the asymptotic Kolmogorov distribution,
/// `P(K > lambda)`. Uses the Jacobi-theta form for small arguments and the
/// alternating series for large ones.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        let f = std::f64::consts::PI * std::f64::consts::PI / (8.0 * lambda * lambda);
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / lambda
            * ((-f).exp() + (-9.0 * f).exp() + (-25.0 * f).exp() + (-49.0 * f).exp());
        (1.0 - cdf).clamp(0.0, 1.0)
    } else {
        let mut sum = 0.0;
        let mut sign = 1.0;
        for k in 1..=100 {
            let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
            sum += sign * term;
            if term < 1e-18 {
                break;
            }
            sign = -sign;
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }
}

/// Result of a chi-square goodness-of-fit test.
#[derive(Debug, Clone, Copy)]
pub struct Chi2Result {
    pub statistic: f64,
    pub p_value: f64,
    pub dof: usize,
}

/// Pearson chi-square test of observed bin counts against expected counts
/// (same total mass), with `bins - 1` degrees of freedom.
pub fn chi_square_test(observed: &[usize], expected: &[f64]) -> Result<Chi2Result> {
    if observed.len() != expected.len() {
        return Err(Error::dimension("chi-square: observed and expected lengths differ"));
    }
    if observed.len() < 2 {
        return Err(Error::domain("chi-square needs at least 2 bins"));
    }
    if expected.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::domain("chi-square expected counts must be positive"));
    }
    let total_obs: f64 = observed.iter().map(|&o| o as f64).sum();
    let total_exp: f64 = expected.iter().sum();
    if (total_obs - total_exp).abs() > 1e-6 * total_exp.max(1.0) {
        return Err(Error::domain(format!(
            "chi-square totals differ: observed {total_obs}, expected {total_exp}"
        )));
    }
    let statistic: f64 =
        observed.iter().zip(expected).map(|(&o, &e)| (o as f64 - e).powi(2) / e).sum();
    let dof = observed.len() - 1;
    let dist = ChiSquared::new(dof as f64)
        .map_err(|e| Error::Numerical(format!("chi-square setup: {e}")))?;
    Ok(Chi2Result { statistic, p_value: dist.sf(statistic), dof })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{gauss_cdf, Time};
    use crate::simulate::sample_gue_spectrum;
    use rand::{Rng, RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn kolmogorov_sf_reference_values() {
        // frozen from an independent evaluation of the series
        assert!((kolmogorov_sf(1.0) - 0.26999967167735456).abs() < 1e-10);
        assert!((kolmogorov_sf(1.36) - 0.049485876755377876).abs() < 1e-10);
        assert!((kolmogorov_sf(0.5) - 0.9639452436648751).abs() < 1e-10);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
        assert!(kolmogorov_sf(4.0) < 1e-12);
        // continuity across the branch point
        assert!((kolmogorov_sf(1.18 - 1e-9) - kolmogorov_sf(1.18 + 1e-9)).abs() < 1e-8);
    }

    #[test]
    fn ks_calibration_on_true_distribution() {
        // samples drawn from the reference: p should rarely dip below 0.01
        let t = Time::new(1.0).unwrap();
        let mut low = 0;
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let xs: Vec<f64> = (0..1000).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let r = ks_test(&xs, |x| gauss_cdf(x, t).unwrap()).unwrap();
            if r.p_value < 0.01 {
                low += 1;
            }
        }
        assert!(low <= 2, "KS rejected the truth {low}/100 times");
    }

    #[test]
    fn ks_detects_gross_shift() {
        let t = Time::new(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let xs: Vec<f64> =
            (0..1000).map(|_| rng.sample::<f64, _>(StandardNormal) + 5.0).collect();
        let r = ks_test(&xs, |x| gauss_cdf(x, t).unwrap()).unwrap();
        assert!(r.p_value < 1e-6);
    }

    #[test]
    fn ks_statistic_scale() {
        // 1e5 standard normals: D should be around 1/sqrt(n), below 0.006
        let t = Time::new(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let xs: Vec<f64> = (0..100_000).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let r = ks_test(&xs, |x| gauss_cdf(x, t).unwrap()).unwrap();
        assert!(r.statistic < 0.006, "statistic {}", r.statistic);
    }

    #[test]
    fn ks_input_validation() {
        let t = Time::new(1.0).unwrap();
        assert!(ks_test(&[0.0; 50], |x| gauss_cdf(x, t).unwrap()).is_err());
        let mut bad = vec![0.5; 200];
        bad[3] = f64::NAN;
        assert!(ks_test(&bad, |x| gauss_cdf(x, t).unwrap()).is_err());
    }

    #[test]
    fn gue_max_eigenvalue_matches_top_cdf() {
        // ties the exact spectral sampler to the determinantal distribution
        // function, independently of any path simulation
        use crate::densities::top_eigenvalue_cdf;
        let t = Time::new(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let xs: Vec<f64> = (0..20_000)
            .map(|_| *sample_gue_spectrum(3, t, &mut rng).unwrap().values().last().unwrap())
            .collect();
        let r = ks_test(&xs, |x| top_eigenvalue_cdf(3, x, t)).unwrap();
        assert!(r.p_value >= 0.01, "p = {}", r.p_value);
    }

    #[test]
    fn chi_square_basics() {
        let r = chi_square_test(&[25, 25, 25, 25], &[25.0, 25.0, 25.0, 25.0]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        let r = chi_square_test(&[90, 10], &[50.0, 50.0]).unwrap();
        assert!(r.p_value < 1e-10);
        assert!(chi_square_test(&[10, 10], &[10.0]).is_err());
        assert!(chi_square_test(&[10, 10], &[5.0, 5.0]).is_err());
    }
}
