//! Euler-Maruyama steps for the non-colliding SDE with pairwise repulsive
//! drift, and a terminal-sample simulator built on them.

use crate::error::{Error, Result};
use crate::point::OrderedPoint;
use crate::simulate::gue::sample_gue_spectrum;
use crate::simulate::{coordinate_labels, run_paths, PathBatch, SimConfig, StartMode};
use crate::Time;
use rand::{Rng, RngExt};
use rand_distr::StandardNormal;

/// Deepest local step halving: dt * 2^-20.
const MAX_DEPTH: u32 = 20;
const MAX_RESAMPLES: usize = 1000;

/// One Euler-Maruyama step of the non-colliding SDE
/// `dY_i = dB_i + sum_{j != i} dt / (Y_i - Y_j)`.
///
/// A proposal that violates the strict ordering is retried on two halved
/// substeps (recursively, down to `dt * 2^-20`), then by resampling the
/// Gaussian increment. The output is strictly ordered.
pub fn dyson_step<R: Rng + ?Sized>(y: &mut [f64], dt: f64, rng: &mut R) -> Result<()> {
    if y.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("dyson_step requires strictly increasing input"));
    }
    if y.len() == 1 {
        let z: f64 = rng.sample(StandardNormal);
        y[0] += z * dt.sqrt();
        return Ok(());
    }
    step_recursive(y, dt, 0, rng)
}

fn drift_into(y: &[f64], out: &mut [f64]) {
    let n = y.len();
    for i in 0..n {
        let mut d = 0.0;
        for j in 0..n {
            if j != i {
                d += 1.0 / (y[i] - y[j]);
            }
        }
        out[i] = d;
    }
}

fn step_recursive<R: Rng + ?Sized>(y: &mut [f64], dt: f64, depth: u32, rng: &mut R) -> Result<()> {
    let n = y.len();
    let sqrt_dt = dt.sqrt();
    let mut drift = vec![0.0; n];
    let mut proposal = vec![0.0; n];
    drift_into(y, &mut drift);

    for attempt in 0..=MAX_RESAMPLES {
        for i in 0..n {
            let z: f64 = rng.sample(StandardNormal);
            proposal[i] = y[i] + drift[i] * dt + z * sqrt_dt;
        }
        if proposal.windows(2).all(|w| w[0] < w[1]) {
            y.copy_from_slice(&proposal);
            return Ok(());
        }
        if depth < MAX_DEPTH {
            // refine in time rather than rejecting outright
            step_recursive(y, dt / 2.0, depth + 1, rng)?;
            return step_recursive(y, dt / 2.0, depth + 1, rng);
        }
        if attempt == MAX_RESAMPLES {
            break;
        }
    }
    Err(Error::Numerical(
        "dyson_step could not produce an ordered proposal after resampling".into(),
    ))
}

/// Terminal samples of the non-colliding diffusion.
///
/// With `start = None` the process starts at the origin per
/// `cfg.start_mode` (exact entrance draw at `t0`, or an epsilon-spread
/// configuration at time zero).
pub fn simulate_dyson(start: Option<&OrderedPoint>, n: usize, cfg: &SimConfig) -> Result<PathBatch> {
    if let Some(y0) = start {
        if y0.len() != n {
            return Err(Error::dimension(format!("start has {} coordinates, expected {n}", y0.len())));
        }
        if !y0.is_strict() {
            return Err(Error::domain("dyson start must be strictly increasing"));
        }
    }
    let steps_fixed = cfg.steps_from(0.0);
    let entrance = match cfg.start_mode {
        StartMode::Entrance(t0) => Some((t0, cfg.steps_from(t0))),
        StartMode::Spread(_) => None,
    };

    run_paths(cfg, n, coordinate_labels("y", n), false, |rng| {
        let (mut y, steps) = match start {
            Some(y0) => (y0.values().to_vec(), steps_fixed),
            None => match cfg.start_mode {
                StartMode::Entrance(t0) => {
                    let (_, steps) = entrance.expect("entrance mode");
                    (sample_gue_spectrum(n, Time::new(t0)?, rng)?.into_inner(), steps)
                }
                StartMode::Spread(eps) => (
                    (0..n).map(|i| eps * (2.0 * i as f64 + 1.0 - n as f64)).collect(),
                    steps_fixed,
                ),
            },
        };
        for _ in 0..steps {
            dyson_step(&mut y, cfg.dt, rng)?;
        }
        Ok((y, false))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::path_rng;

    #[test]
    fn single_particle_is_free() {
        // terminal law of a drift-free particle over horizon 0.1
        let mut rng = path_rng(4, 0);
        let reps = 2000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..reps {
            let mut y = vec![0.0];
            for _ in 0..100 {
                dyson_step(&mut y, 1e-3, &mut rng).unwrap();
            }
            sum += y[0];
            sum_sq += y[0] * y[0];
        }
        let mean = sum / reps as f64;
        let var = sum_sq / reps as f64 - mean * mean;
        assert!(mean.abs() < 3.0 * (0.1f64 / reps as f64).sqrt(), "mean {mean}");
        assert!((var - 0.1).abs() < 0.02, "variance {var}");
    }

    #[test]
    fn symmetric_pair_drift_separates() {
        // drift for y = (-a, a) is (-1/2a, +1/2a): spacing grows on average
        let mut rng = path_rng(8, 0);
        let mut mean_gap = 0.0;
        let trials = 400;
        for _ in 0..trials {
            let mut y = vec![-0.05, 0.05];
            for _ in 0..100 {
                dyson_step(&mut y, 1e-4, &mut rng).unwrap();
            }
            mean_gap += (y[1] - y[0]) / trials as f64;
        }
        assert!(mean_gap > 0.1, "mean gap {mean_gap} did not grow");
    }

    #[test]
    fn ordering_is_preserved() {
        let mut rng = path_rng(21, 0);
        let mut y = vec![-0.01, 0.0, 0.01];
        for _ in 0..2000 {
            dyson_step(&mut y, 1e-3, &mut rng).unwrap();
            assert!(y.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn unordered_input_rejected() {
        let mut rng = path_rng(1, 0);
        let mut y = vec![0.0, 0.0];
        assert!(dyson_step(&mut y, 1e-3, &mut rng).is_err());
    }

    #[test]
    fn spread_start_batch() {
        let cfg = SimConfig::new(0.05, 1e-3, 16, 2).with_start(StartMode::Spread(1e-3));
        let batch = simulate_dyson(None, 3, &cfg).unwrap();
        assert_eq!(batch.dim(), 3);
        for row in batch.rows() {
            assert!(row.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
