//! Euler simulation of the interlaced pair `(X, Y)`: `Y` an
//! `n`-dimensional Brownian motion (stopped at its first collision) or a
//! non-colliding diffusion, `X` an `(n+1)`-dimensional Brownian motion
//! reflected between its `Y` neighbours.

use crate::error::{Error, Result};
use crate::point::{is_interlaced, InterlacedPoint};
use crate::simulate::dyson::dyson_step;
use crate::simulate::gt::sample_interlacing_row;
use crate::simulate::gue::sample_gue_spectrum;
use crate::simulate::skorokhod::{bridge_crossing_prob, bridge_reflect_push, skorokhod_step};
use crate::simulate::{coordinate_labels, run_paths, PathBatch, SimConfig, StartMode};
use crate::Time;
use rand::{Rng, RngExt};
use rand_distr::StandardNormal;

/// Per-path state of the reflected pair: positions, cumulative local times
/// and the stopped flag. `l_minus[0]` and `l_plus[n]` stay identically zero
/// (the outer particles have a single barrier).
#[derive(Debug, Clone)]
pub struct ReflectedPairState {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub l_minus: Vec<f64>,
    pub l_plus: Vec<f64>,
    pub stopped: bool,
}

impl ReflectedPairState {
    pub fn new(start: &InterlacedPoint) -> Self {
        let n1 = start.x().len();
        ReflectedPairState {
            x: start.x().to_vec(),
            y: start.y().to_vec(),
            l_minus: vec![0.0; n1],
            l_plus: vec![0.0; n1],
            stopped: false,
        }
    }

    pub fn interlaced(&self) -> bool {
        is_interlaced(&self.x, &self.y)
    }
}

fn draw_inc<R: Rng + ?Sized>(rng: &mut R, sqrt_dt: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    z * sqrt_dt
}

/// Uniform in (0, 1], safe for `ln`.
fn draw_u01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// One Euler step. `y_old` is scratch storage for the pre-step `y`.
/// With `dyson_y` the `y` particles follow the non-colliding SDE and the
/// pair never stops; otherwise `y` moves freely and the state freezes at
/// the first detected `y` collision.
fn advance_pair<R: Rng + ?Sized>(
    state: &mut ReflectedPairState,
    y_old: &mut Vec<f64>,
    dt: f64,
    bridge: bool,
    dyson_y: bool,
    rng: &mut R,
) -> Result<()> {
    if state.stopped {
        return Ok(());
    }
    let n = state.y.len();
    let sqrt_dt = dt.sqrt();

    y_old.clear();
    y_old.extend_from_slice(&state.y);

    if dyson_y {
        dyson_step(&mut state.y, dt, rng)?;
    } else {
        for v in state.y.iter_mut() {
            *v += draw_inc(rng, sqrt_dt);
        }
        // first collision of adjacent y particles stops the pair; bridge
        // correction also catches within-step crossings
        for i in 0..n.saturating_sub(1) {
            let gap_before = y_old[i + 1] - y_old[i];
            let gap_after = state.y[i + 1] - state.y[i];
            let hit = gap_after <= 0.0
                || (bridge
                    && draw_u01(rng) <= bridge_crossing_prob(gap_before, gap_after, 2.0 * dt));
            if hit {
                state.y.copy_from_slice(y_old);
                state.stopped = true;
                return Ok(());
            }
        }
    }

    for i in 0..=n {
        let lower = (i >= 1).then(|| state.y[i - 1]);
        let upper = (i < n).then(|| state.y[i]);
        let inc = draw_inc(rng, sqrt_dt);
        match (bridge, lower, upper) {
            (true, Some(lo), None) => {
                // exact push at the single lower barrier: the distance
                // process has variance rate 2 (particle and barrier both
                // diffuse); its in-step minimum is bridge-sampled
                let d0 = state.x[i] - y_old[i - 1];
                let d1 = state.x[i] + inc - lo;
                let push = bridge_reflect_push(d0, d1, 2.0 * dt, draw_u01(rng));
                state.x[i] = lo + d1 + push;
                state.l_minus[i] += push;
            }
            (true, None, Some(hi)) => {
                let d0 = y_old[i] - state.x[i];
                let d1 = hi - (state.x[i] + inc);
                let push = bridge_reflect_push(d0, d1, 2.0 * dt, draw_u01(rng));
                state.x[i] = hi - (d1 + push);
                state.l_plus[i] += push;
            }
            (_, None, None) => {
                state.x[i] += inc;
            }
            _ => {
                // interior particle (two barriers) or corrections disabled:
                // endpoint projection by the alternating two-sided map
                let step = skorokhod_step(state.x[i], inc, lower, upper)?;
                state.x[i] = step.value;
                state.l_minus[i] += step.dl_minus;
                state.l_plus[i] += step.dl_plus;
            }
        }
    }

    debug_assert!(state.interlaced(), "interlacing lost: {state:?}");
    Ok(())
}

fn pair_labels(n: usize) -> Vec<String> {
    let mut labels = coordinate_labels("x", n + 1);
    labels.extend(coordinate_labels("y", n));
    labels
}

fn terminal_row(state: &ReflectedPairState) -> Vec<f64> {
    let mut row = state.x.clone();
    row.extend_from_slice(&state.y);
    row
}

/// Simulates the stopped pair from a fixed interlaced start. The state
/// freezes at the first detected `Y` collision.
pub fn simulate_interlaced_pair(start: &InterlacedPoint, cfg: &SimConfig) -> Result<PathBatch> {
    let n = start.rank();
    let steps = cfg.steps_from(0.0);
    run_paths(cfg, 2 * n + 1, pair_labels(n), true, |rng| {
        let mut state = ReflectedPairState::new(start);
        let mut scratch = Vec::with_capacity(n);
        for _ in 0..steps {
            advance_pair(&mut state, &mut scratch, cfg.dt, cfg.bridge_correction, false, rng)?;
        }
        Ok((terminal_row(&state), state.stopped))
    })
}

/// Simulates the conditioned pair: `Y` follows the non-colliding SDE, `X`
/// is reflected between its neighbours, and the pair never stops.
///
/// With `start = None` the process is started at the origin according to
/// `cfg.start_mode`: an exact entrance-law draw at `t0`, or a deterministic
/// epsilon-spread configuration at time zero.
pub fn simulate_interlaced_pair_plus(
    start: Option<&InterlacedPoint>,
    n: usize,
    cfg: &SimConfig,
) -> Result<PathBatch> {
    if let Some(w) = start {
        if w.rank() != n {
            return Err(Error::dimension(format!(
                "start has rank {}, expected {n}",
                w.rank()
            )));
        }
        if n >= 2 && !w.y().windows(2).all(|p| p[0] < p[1]) {
            return Err(Error::domain("conditioned pair requires strictly increasing y start"));
        }
    }
    let steps_fixed = cfg.steps_from(0.0);
    let (steps_origin, entrance_t0) = match cfg.start_mode {
        StartMode::Entrance(t0) => (cfg.steps_from(t0), Some(t0)),
        StartMode::Spread(_) => (steps_fixed, None),
    };

    run_paths(cfg, 2 * n + 1, pair_labels(n), false, |rng| {
        let (mut state, steps) = match start {
            Some(w) => (ReflectedPairState::new(w), steps_fixed),
            None => match cfg.start_mode {
                StartMode::Entrance(_) => {
                    let t0 = entrance_t0.expect("entrance mode");
                    let x = sample_gue_spectrum(n + 1, Time::new(t0)?, rng)?;
                    let y = if n > 0 {
                        sample_interlacing_row(x.values(), rng)?
                    } else {
                        Vec::new()
                    };
                    let w = InterlacedPoint::new(x.into_inner(), y)?;
                    (ReflectedPairState::new(&w), steps_origin)
                }
                StartMode::Spread(eps) => {
                    let x: Vec<f64> = (0..=n).map(|i| eps * (2.0 * i as f64 - n as f64)).collect();
                    let y: Vec<f64> =
                        (0..n).map(|j| eps * (2.0 * j as f64 + 1.0 - n as f64)).collect();
                    let w = InterlacedPoint::new(x, y)?;
                    (ReflectedPairState::new(&w), steps_fixed)
                }
            },
        };
        let mut scratch = Vec::with_capacity(n);
        for _ in 0..steps {
            advance_pair(&mut state, &mut scratch, cfg.dt, cfg.bridge_correction, true, rng)?;
        }
        Ok((terminal_row(&state), false))
    })
}
