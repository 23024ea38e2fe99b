//! The triangular cone-valued process: rejection sampling of interlacing
//! rows under the kernel density, pattern filling, and the nested reflected
//! Euler dynamics.

use crate::error::{Error, Result};
use crate::point::{GTPattern, OrderedPoint};
use crate::simulate::gue::sample_gue_spectrum;
use crate::simulate::skorokhod::{bridge_reflect_push, skorokhod_step};
use crate::simulate::{run_paths, PathBatch, SimConfig, StartMode};
use crate::Time;
use rand::{Rng, RngExt};
use rand_distr::StandardNormal;

const MAX_REJECTIONS: usize = 10_000_000;

/// Samples `y` from the interlacing kernel density (proportional to the
/// pairwise-difference product) on the box `prod [x_i, x_{i+1}]`.
///
/// Proposals are independent uniforms per slot, accepted with probability
/// `h(y) / H`, where `H = prod_{i<j} (x_{j+1} - x_i)` dominates `h` on the
/// box.
pub(crate) fn sample_interlacing_row<R: Rng + ?Sized>(x: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    let k = x.len() - 1; // row to sample has k entries
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut bound = 1.0;
    for i in 0..k {
        for j in (i + 1)..k {
            bound *= x[j + 1] - x[i];
        }
    }
    let mut y = vec![0.0; k];
    for _ in 0..MAX_REJECTIONS {
        for i in 0..k {
            y[i] = x[i] + (x[i + 1] - x[i]) * rng.random::<f64>();
        }
        let mut h = 1.0;
        for i in 0..k {
            for j in (i + 1)..k {
                h *= y[j] - y[i];
            }
        }
        if h >= bound * rng.random::<f64>() {
            return Ok(y);
        }
    }
    Err(Error::Numerical("interlacing-row rejection sampler stalled".into()))
}

/// Fills a full pattern below a strictly increasing top row, drawing each
/// row from the interlacing kernel of the row above. The result is exactly
/// uniform on the interlacing cone section of the top row.
pub fn sample_gt_pattern<R: Rng + ?Sized>(top: &OrderedPoint, rng: &mut R) -> Result<GTPattern> {
    if !top.is_strict() {
        return Err(Error::domain("pattern top row must be strictly increasing"));
    }
    let n = top.len();
    let mut rows: Vec<Vec<f64>> = vec![Vec::new(); n];
    rows[n - 1] = top.values().to_vec();
    for k in (0..n - 1).rev() {
        rows[k] = sample_interlacing_row(&rows[k + 1], rng)?;
    }
    Ok(GTPattern::from_rows_unchecked(rows))
}

/// Per-path state of the triangular process: all rows plus cumulative local
/// times. `l_plus[k][k]` and `l_minus[k][0]` stay identically zero (edge
/// coordinates have a single barrier).
#[derive(Debug, Clone)]
pub struct GTState {
    pub rows: Vec<Vec<f64>>,
    pub l_minus: Vec<Vec<f64>>,
    pub l_plus: Vec<Vec<f64>>,
}

impl GTState {
    fn new(rows: Vec<Vec<f64>>) -> Self {
        let l: Vec<Vec<f64>> = rows.iter().map(|r| vec![0.0; r.len()]).collect();
        GTState { rows, l_minus: l.clone(), l_plus: l }
    }

    fn pattern_valid(&self) -> bool {
        GTPattern::from_rows_unchecked(self.rows.clone()).is_valid()
    }
}

/// One Euler step. Rows update shortest first; row `k` reflects off the
/// already-advanced row `k-1`. `old_prev` / `old_this` are scratch buffers
/// holding pre-step positions for the bridge pushes.
fn advance_gt<R: Rng + ?Sized>(
    state: &mut GTState,
    old_prev: &mut Vec<f64>,
    old_this: &mut Vec<f64>,
    dt: f64,
    bridge: bool,
    rng: &mut R,
) -> Result<()> {
    let n = state.rows.len();
    let sqrt_dt = dt.sqrt();

    old_prev.clear();
    old_prev.extend_from_slice(&state.rows[0]);
    let z: f64 = rng.sample(StandardNormal);
    state.rows[0][0] += z * sqrt_dt;

    for k in 1..n {
        old_this.clear();
        old_this.extend_from_slice(&state.rows[k]);
        for i in 0..=k {
            let lower = (i >= 1).then(|| state.rows[k - 1][i - 1]);
            let upper = (i < k).then(|| state.rows[k - 1][i]);
            let z: f64 = rng.sample(StandardNormal);
            let inc = z * sqrt_dt;
            match (bridge, lower, upper) {
                (true, Some(lo), None) => {
                    // edge coordinate, single lower barrier: exact
                    // bridge-sampled push on the variance-2 distance process
                    let d0 = old_this[i] - old_prev[i - 1];
                    let d1 = old_this[i] + inc - lo;
                    let u = 1.0 - rng.random::<f64>();
                    let push = bridge_reflect_push(d0.max(0.0), d1, 2.0 * dt, u);
                    state.rows[k][i] = lo + d1 + push;
                    state.l_minus[k][i] += push;
                }
                (true, None, Some(hi)) => {
                    let d0 = old_prev[i] - old_this[i];
                    let d1 = hi - (old_this[i] + inc);
                    let u = 1.0 - rng.random::<f64>();
                    let push = bridge_reflect_push(d0.max(0.0), d1, 2.0 * dt, u);
                    state.rows[k][i] = hi - (d1 + push);
                    state.l_plus[k][i] += push;
                }
                _ => {
                    // interior coordinate (two barriers) or corrections off
                    let step = skorokhod_step(old_this[i], inc, lower, upper)?;
                    state.rows[k][i] = step.value;
                    state.l_minus[k][i] += step.dl_minus;
                    state.l_plus[k][i] += step.dl_plus;
                }
            }
        }
        std::mem::swap(old_prev, old_this);
    }
    debug_assert!(state.pattern_valid(), "interlacing lost in cone process");
    Ok(())
}

fn gt_labels(n: usize) -> Vec<String> {
    let mut labels = Vec::with_capacity(n * (n + 1) / 2);
    for k in 1..=n {
        for i in 1..=k {
            labels.push(format!("x{k}_{i}"));
        }
    }
    labels
}

/// Simulates the triangular process started at the origin. Terminal
/// samples contain every row, flattened bottom row first.
///
/// Entrance start: the top row is drawn exactly from the entrance law at
/// `t0` and the interior is filled uniformly (via the interlacing kernels);
/// the reflected dynamics then run on `[t0, horizon]`. Spread start: a
/// deterministic strictly interlaced epsilon-grid at time zero (O(epsilon)
/// bias).
pub fn simulate_gt_cone(n: usize, cfg: &SimConfig) -> Result<PathBatch> {
    if n == 0 {
        return Err(Error::domain("cone process needs n >= 1"));
    }
    let dim = n * (n + 1) / 2;
    let (steps, entrance_t0) = match cfg.start_mode {
        StartMode::Entrance(t0) => (cfg.steps_from(t0), Some(t0)),
        StartMode::Spread(_) => (cfg.steps_from(0.0), None),
    };

    run_paths(cfg, dim, gt_labels(n), false, |rng| {
        let rows = match cfg.start_mode {
            StartMode::Entrance(_) => {
                let t0 = entrance_t0.expect("entrance mode");
                let top = sample_gue_spectrum(n, Time::new(t0)?, rng)?;
                sample_gt_pattern(&top, rng)?.rows().to_vec()
            }
            StartMode::Spread(eps) => (1..=n)
                .map(|k| (1..=k).map(|i| eps * (2.0 * i as f64 - k as f64 - 1.0)).collect())
                .collect(),
        };
        let mut state = GTState::new(rows);
        let mut scratch_a = Vec::with_capacity(n);
        let mut scratch_b = Vec::with_capacity(n);
        for _ in 0..steps {
            advance_gt(&mut state, &mut scratch_a, &mut scratch_b, cfg.dt, cfg.bridge_correction, rng)?;
        }
        let mut row = Vec::with_capacity(dim);
        for r in &state.rows {
            row.extend_from_slice(r);
        }
        Ok((row, false))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::path_rng;

    #[test]
    fn row_sampler_uniform_for_k1() {
        // single-slot row: kernel is the uniform density on [x_1, x_2]
        let mut rng = path_rng(2, 0);
        let x = [0.0, 1.0];
        let reps = 50_000;
        let mut mean = 0.0;
        for _ in 0..reps {
            let y = sample_interlacing_row(&x, &mut rng).unwrap();
            assert!(y[0] >= 0.0 && y[0] <= 1.0);
            mean += y[0] / reps as f64;
        }
        assert!((mean - 0.5).abs() < 3.0 * (1.0f64 / 12.0 / reps as f64).sqrt());
    }

    #[test]
    fn row_sampler_acceptance_rate_matches_analytic() {
        // for top (0,1,2) the acceptance probability is E[h]/H = 0.5
        let mut rng = path_rng(7, 0);
        let _top = [0.0, 1.0, 2.0];
        let reps = 20_000usize;
        // measure indirectly: count uniform draws consumed per sample;
        // each attempt uses k + 1 = 3 draws
        let mut attempts = 0usize;
        for _ in 0..reps {
            // replicate the sampler loop to count attempts
            loop {
                attempts += 1;
                let y1 = rng.random::<f64>();
                let y2 = 1.0 + rng.random::<f64>();
                let h = y2 - y1;
                if h >= 2.0 * rng.random::<f64>() {
                    break;
                }
            }
        }
        let rate = reps as f64 / attempts as f64;
        let se = (0.5 * 0.5 / attempts as f64).sqrt();
        assert!((rate - 0.5).abs() < 4.0 * se, "acceptance rate {rate}");
    }

    #[test]
    fn pattern_fill_interlaces_and_requires_strict_top() {
        let mut rng = path_rng(11, 0);
        let top = OrderedPoint::new(vec![-1.0, 0.2, 1.7]).unwrap();
        for _ in 0..200 {
            let p = sample_gt_pattern(&top, &mut rng).unwrap();
            assert!(p.is_valid());
            assert_eq!(p.top_row(), top.values());
        }
        let flat = OrderedPoint::new(vec![0.0, 0.0, 1.0]).unwrap();
        assert!(sample_gt_pattern(&flat, &mut rng).is_err());
    }

    #[test]
    fn cone_n1_is_brownian() {
        let cfg = SimConfig::new(1.0, 1e-2, 4000, 13).with_start(StartMode::Spread(1e-6));
        let batch = simulate_gt_cone(1, &cfg).unwrap();
        let xs = batch.column(0);
        let mean: f64 = xs.iter().sum::<f64>() / xs.len() as f64;
        let var: f64 = xs.iter().map(|v| v * v).sum::<f64>() / xs.len() as f64 - mean * mean;
        assert!(mean.abs() < 3.0 / (xs.len() as f64).sqrt());
        assert!((var - 1.0).abs() < 0.1, "variance {var}");
    }

    #[test]
    fn cone_preserves_interlacing() {
        let cfg = SimConfig::new(0.1, 1e-3, 32, 17).with_start(StartMode::Entrance(1e-3));
        let batch = simulate_gt_cone(3, &cfg).unwrap();
        for row in batch.rows() {
            let rows = vec![row[0..1].to_vec(), row[1..3].to_vec(), row[3..6].to_vec()];
            assert!(GTPattern::from_rows_unchecked(rows).is_valid());
        }
    }
}
