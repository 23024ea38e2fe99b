//! Statistical and numerical verification harness: every structural
//! identity and distributional statement of the density/simulation layers
//! becomes a deterministic, seeded pass/fail check emitting a
//! machine-readable report.

mod checks;
pub mod stats;

pub use checks::*;
pub use stats::{chi_square_test, kolmogorov_sf, ks_test, Chi2Result, KsResult};

use serde::Serialize;

/// Central registry of every tolerance and threshold used by the checks.
#[derive(Debug, Clone)]
pub struct Tolerances {
    /// p-value threshold for statistical tests (false-failure rate per test)
    pub p_threshold: f64,
    /// intertwining residual bounds by rank
    pub intertwine_n1: f64,
    pub intertwine_n2: f64,
    /// relative error of the semigroup (convolution) identities
    pub semigroup_rel: f64,
    /// relative error of the entrance-law identity
    pub entrance_rel: f64,
    /// allowed deviation of the duality finite-difference ratio from 4
    pub duality_ratio_band: f64,
    /// absolute duality residual at h = 1e-3
    pub duality_residual: f64,
    /// allowed deviation of heat-equation residual ratios from 4
    pub pde_ratio_band: f64,
    /// absolute size of the pair density at a degenerate y configuration
    pub q_boundary_zero: f64,
    /// absolute size of the reflecting-boundary derivatives at h = 1e-4
    pub neumann: f64,
    /// sup-norm bound for the ECDF of the nested-maximum functional
    pub identity_sup_norm: f64,
    /// binomial standard-error multiplier for coalescing grid probabilities
    pub coalescing_se_mult: f64,
    /// conditioning-box half-width, in units of sqrt(t)
    pub filtering_box_halfwidth: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            p_threshold: 0.01,
            intertwine_n1: 1e-8,
            intertwine_n2: 1e-6,
            semigroup_rel: 1e-6,
            entrance_rel: 1e-6,
            duality_ratio_band: 0.5,
            duality_residual: 1e-4,
            pde_ratio_band: 1.0,
            q_boundary_zero: 1e-12,
            neumann: 1e-6,
            identity_sup_norm: 0.01,
            coalescing_se_mult: 3.0,
            filtering_box_halfwidth: 0.05,
        }
    }
}

impl Tolerances {
    /// Named override, used by the CLI `--tol key=value` flag.
    pub fn set(&mut self, key: &str, value: f64) -> crate::Result<()> {
        match key {
            "p_threshold" => self.p_threshold = value,
            "intertwine_n1" => self.intertwine_n1 = value,
            "intertwine_n2" => self.intertwine_n2 = value,
            "semigroup_rel" => self.semigroup_rel = value,
            "entrance_rel" => self.entrance_rel = value,
            "duality_ratio_band" => self.duality_ratio_band = value,
            "duality_residual" => self.duality_residual = value,
            "pde_ratio_band" => self.pde_ratio_band = value,
            "q_boundary_zero" => self.q_boundary_zero = value,
            "neumann" => self.neumann = value,
            "identity_sup_norm" => self.identity_sup_norm = value,
            "coalescing_se_mult" => self.coalescing_se_mult = value,
            "filtering_box_halfwidth" => self.filtering_box_halfwidth = value,
            other => {
                return Err(crate::Error::Config(format!("unknown tolerance key: {other}")))
            }
        }
        Ok(())
    }
}

/// Whether a check passes below or above its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// pass iff discrepancy <= tolerance
    AtMost,
    /// pass iff discrepancy >= tolerance (p-value style)
    AtLeast,
}

/// Structured pass/fail record of one verification check.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub test: String,
    pub inputs: serde_json::Value,
    pub discrepancy: f64,
    pub tolerance: f64,
    pub direction: Direction,
    pub pass: bool,
    pub seed: Option<u64>,
    pub wall_time_s: f64,
    /// estimated quadrature error, for quadrature-backed checks
    pub quad_error: Option<f64>,
}

impl VerificationReport {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        test: impl Into<String>,
        inputs: serde_json::Value,
        discrepancy: f64,
        tolerance: f64,
        direction: Direction,
        seed: Option<u64>,
        wall_time_s: f64,
        quad_error: Option<f64>,
    ) -> Self {
        let pass = match direction {
            Direction::AtMost => discrepancy <= tolerance,
            Direction::AtLeast => discrepancy >= tolerance,
        };
        VerificationReport {
            test: test.into(),
            inputs,
            discrepancy,
            tolerance,
            direction,
            pass,
            seed,
            wall_time_s,
            quad_error,
        }
    }

    pub fn one_line(&self) -> String {
        let op = match self.direction {
            Direction::AtMost => "<=",
            Direction::AtLeast => ">=",
        };
        format!(
            "{} {:28} {:.6e} {op} {:.3e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.test,
            self.discrepancy,
            self.tolerance
        )
    }
}

/// Named verification suites, mirroring the CLI surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Pde,
    Intertwine,
    Entrance,
    Interlace,
    Identity,
    Coalescing,
    Filtering,
    Duality,
    SmallT,
}

impl std::str::FromStr for Suite {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        Ok(match s {
            "all" => Suite::All,
            "pde" => Suite::Pde,
            "intertwine" => Suite::Intertwine,
            "entrance" => Suite::Entrance,
            "interlace" => Suite::Interlace,
            "identity" => Suite::Identity,
            "coalescing" => Suite::Coalescing,
            "filtering" => Suite::Filtering,
            "duality" => Suite::Duality,
            "small_t" | "small-t" => Suite::SmallT,
            other => return Err(crate::Error::Config(format!("unknown suite: {other}"))),
        })
    }
}

/// Runtime overrides for a suite run. `None` fields keep the recorded
/// defaults (which are the acceptance configuration).
#[derive(Debug, Clone, Default)]
pub struct SuiteOptions {
    pub n_paths: Option<usize>,
    pub dt: Option<f64>,
    pub seed: Option<u64>,
    pub tolerances: Option<Tolerances>,
}

/// Runs the selected suite and returns its reports in a stable order.
pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> crate::Result<Vec<VerificationReport>> {
    let tol = opts.tolerances.clone().unwrap_or_default();
    let mut reports = Vec::new();
    let paths = |default: usize| opts.n_paths.unwrap_or(default);
    let dt = |default: f64| opts.dt.unwrap_or(default);
    let seed = |default: u64| opts.seed.unwrap_or(default);

    let run_pde = matches!(suite, Suite::All | Suite::Pde);
    let run_intertwine = matches!(suite, Suite::All | Suite::Intertwine);
    let run_entrance = matches!(suite, Suite::All | Suite::Entrance);
    let run_interlace = matches!(suite, Suite::All | Suite::Interlace);
    let run_identity = matches!(suite, Suite::All | Suite::Identity);
    let run_coalescing = matches!(suite, Suite::All | Suite::Coalescing);
    let run_filtering = matches!(suite, Suite::All | Suite::Filtering);
    let run_duality = matches!(suite, Suite::All | Suite::Duality);
    let run_small_t = matches!(suite, Suite::All | Suite::SmallT);

    if run_duality {
        reports.push(check_duality_transpose(&tol, seed(SEED_DUALITY))?);
        reports.push(check_duality_mixed_derivative(&tol)?);
    }
    if run_pde {
        reports.extend(check_pde_and_boundaries(&tol)?);
    }
    if run_intertwine {
        reports.push(check_intertwining(1, &tol, seed(SEED_INTERTWINE))?);
        reports.push(check_intertwining(2, &tol, seed(SEED_INTERTWINE + 1))?);
    }
    if run_entrance {
        reports.extend(check_chapman_kolmogorov(&tol)?);
        reports.push(check_entrance_law(&tol)?);
    }
    if run_small_t {
        reports.extend(check_small_t(&tol)?);
    }
    if run_identity {
        reports.push(check_gue_consistency(&tol, paths(DEFAULT_GUE_SAMPLES), seed(SEED_GUE))?);
        reports.push(check_identity_sup(
            &tol,
            paths(DEFAULT_IDENTITY_PATHS),
            dt(DEFAULT_IDENTITY_DT),
            seed(SEED_IDENTITY),
        )?);
    }
    if run_interlace {
        reports.extend(check_proposition_interlace(
            &tol,
            paths(DEFAULT_INTERLACE_PATHS),
            dt(DEFAULT_INTERLACE_DT),
            seed(SEED_INTERLACE),
        )?);
    }
    if run_coalescing {
        reports.extend(check_coalescing(
            &tol,
            paths(DEFAULT_COALESCING_PATHS),
            dt(DEFAULT_COALESCING_DT),
            seed(SEED_COALESCING),
        )?);
    }
    if run_filtering {
        reports.push(check_filtering(
            &tol,
            paths(DEFAULT_FILTERING_PATHS),
            dt(DEFAULT_FILTERING_DT),
            seed(SEED_FILTERING),
        )?);
    }
    Ok(reports)
}
