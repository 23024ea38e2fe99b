//! Coalescing Brownian motions: independent particles that stick together
//! on meeting. Merged groups share the driver of their lowest member; with
//! bridge corrections, within-step meetings of the variance-2 gap process
//! are detected by their exact crossing probability.

use crate::error::Result;
use crate::point::OrderedPoint;
use crate::simulate::skorokhod::bridge_crossing_prob;
use crate::simulate::{coordinate_labels, run_paths, PathBatch, SimConfig};
use rand::{Rng, RngExt};
use rand_distr::StandardNormal;

struct Coalescing {
    /// positions, one per starting point (merged members share values)
    pos: Vec<f64>,
    /// group representative: the lowest particle index of the group
    rep: Vec<usize>,
}

impl Coalescing {
    fn new(z: &[f64]) -> Self {
        let mut c = Coalescing { pos: z.to_vec(), rep: (0..z.len()).collect() };
        // equal starting points have already met
        for i in 1..z.len() {
            if z[i] <= z[i - 1] {
                c.rep[i] = c.rep[i - 1];
                c.pos[i] = c.pos[i - 1];
            }
        }
        c
    }

    fn find(&self, i: usize) -> usize {
        // representatives always point left and are themselves roots
        self.rep[i]
    }

    /// Merges the group of `b` into the group of `a` (a < b); the lower
    /// index keeps the driver and both report its position.
    fn merge(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        for i in 0..self.rep.len() {
            if self.rep[i] == rb {
                self.rep[i] = ra;
            }
        }
        let v = self.pos[ra];
        for i in 0..self.rep.len() {
            if self.rep[i] == ra {
                self.pos[i] = v;
            }
        }
    }

    fn roots(&self) -> Vec<usize> {
        let mut r: Vec<usize> = (0..self.rep.len()).filter(|&i| self.rep[i] == i).collect();
        r.sort_unstable();
        r
    }

    fn step<R: Rng + ?Sized>(&mut self, dt: f64, bridge: bool, rng: &mut R) {
        let n = self.pos.len();
        let sqrt_dt = dt.sqrt();
        let before = self.pos.clone();
        // every particle index draws each step so the stream layout does
        // not depend on the merge history
        let mut inc = vec![0.0; n];
        for v in inc.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *v = z * sqrt_dt;
        }
        for i in 0..n {
            let r = self.find(i);
            self.pos[i] = before[r] + inc[r];
        }
        // cascade merges until group positions are ordered again
        loop {
            let roots = self.roots();
            let mut merged = false;
            for w in roots.windows(2) {
                let (a, b) = (w[0], w[1]);
                let gap_before = before[b] - before[a];
                let gap_after = self.pos[b] - self.pos[a];
                let hit = gap_after <= 0.0
                    || (bridge
                        && gap_before > 0.0
                        && (1.0 - rng.random::<f64>())
                            <= bridge_crossing_prob(gap_before, gap_after, 2.0 * dt));
                if hit {
                    self.merge(a, b);
                    merged = true;
                    break;
                }
            }
            if !merged {
                break;
            }
        }
        debug_assert!(self.pos.windows(2).all(|w| w[0] <= w[1]), "ordering lost");
    }
}

/// Simulates coalescing motions started from the ordered configuration
/// `z`, reporting one terminal position per starting point (merged
/// particles report their shared position).
pub fn simulate_coalescing(z: &OrderedPoint, cfg: &SimConfig) -> Result<PathBatch> {
    let n = z.len();
    let steps = cfg.steps_from(0.0);
    let zv = z.values().to_vec();
    run_paths(cfg, n, coordinate_labels("z", n), false, |rng| {
        let mut state = Coalescing::new(&zv);
        for _ in 0..steps {
            state.step(cfg.dt, cfg.bridge_correction, rng);
        }
        Ok((state.pos.clone(), false))
    })
}
