//! The nested running-maximum functional
//! `sup over 0 = t_0 <= ... <= t_n = t of sum_i (B_i(t_i) - B_i(t_{i-1}))`,
//! computed on a grid by the Skorokhod-iteration recursion
//! `M_k(t) = max_{s <= t} (M_{k-1}(s) - g_k(s)) + g_k(t)`.

use crate::error::{Error, Result};
use crate::simulate::skorokhod::bridge_max;
use crate::simulate::{run_paths, PathBatch, SimConfig};
use rand::RngExt;
use rand_distr::StandardNormal;

/// Evaluates the functional on stored path values (each path a grid of
/// positions over a common time grid, starting at its time-zero value).
/// Runs in O(n * grid) time and O(1) extra space.
pub fn sup_functional(paths: &[Vec<f64>]) -> f64 {
    assert!(!paths.is_empty(), "need at least one path");
    let grid = paths[0].len();
    assert!(paths.iter().all(|p| p.len() == grid), "paths must share the grid");
    assert!(grid >= 1);

    // level 1 is the free path itself
    if paths.len() == 1 {
        return paths[0][grid - 1];
    }
    let mut m_prev: Vec<f64> = paths[0].clone();
    for gamma in &paths[1..] {
        let mut running = m_prev[0] - gamma[0];
        let mut m_curr = vec![0.0; grid];
        for j in 0..grid {
            running = running.max(m_prev[j] - gamma[j]);
            m_curr[j] = running + gamma[j];
        }
        m_prev = m_curr;
    }
    m_prev[grid - 1]
}

/// Simulates terminal samples of the functional by streaming the recursion
/// over Euler increments, without storing paths. With bridge corrections
/// the running maxima include bridge-sampled in-step maxima of the
/// variance-2 difference processes, removing the leading grid bias.
pub fn simulate_sup_functional(n: usize, cfg: &SimConfig) -> Result<PathBatch> {
    if n == 0 {
        return Err(Error::domain("sup functional needs n >= 1"));
    }
    let steps = cfg.steps_from(0.0);
    let dt = cfg.dt;
    let sqrt_dt = dt.sqrt();
    run_paths(cfg, 1, vec!["sup".into()], false, |rng| {
        // gamma[k]: current BM values; m[k]: current level values;
        // run_max[k]: running max of (m[k-1] - gamma[k]);
        // prev_diff[k]: previous grid value of that difference
        let mut gamma = vec![0.0; n];
        let mut m = vec![0.0; n];
        let mut run_max = vec![0.0f64; n];
        let mut prev_diff = vec![0.0; n];
        for _ in 0..steps {
            for k in 0..n {
                let z: f64 = rng.sample(StandardNormal);
                gamma[k] += z * sqrt_dt;
                if k == 0 {
                    m[0] = gamma[0];
                    continue;
                }
                let diff = m[k - 1] - gamma[k];
                if cfg.bridge_correction {
                    let u = 1.0 - rng.random::<f64>();
                    let in_step = bridge_max(prev_diff[k], diff, 2.0 * dt, u);
                    run_max[k] = run_max[k].max(in_step);
                } else {
                    run_max[k] = run_max[k].max(diff);
                }
                prev_diff[k] = diff;
                m[k] = run_max[k] + gamma[k];
            }
        }
        Ok((vec![m[n - 1]], false))
    })
}
