//! Scenario configuration: the JSON schema driving the runner.
//!
//! A scenario bundles a grid, a potential, Dirichlet boundary data, the
//! epsilon ladder, solver controls and the analysis plan (where to measure
//! densities, which balls to decompose over, which test-field battery to
//! throw at the varifold).  `ScenarioConfig::load` parses and validates;
//! every validation failure names the offending field so the CLI can report
//! it as a configuration error.
//!
//! ```json
//! {
//!   "grid": { "n": 1, "h": 0.0078125, "half_widths": [1.0], "height": 1.0 },
//!   "potential": "peierls_nabarro",
//!   "scenario": { "kind": "layer_trace" },
//!   "epsilons": [0.2, 0.1, 0.05],
//!   "solver": { "tol": 1e-8, "max_sweeps": 60000, "relaxation": null,
//!               "newton_iters": 4 },
//!   "analysis": { ... see `AnalysisPlan` ... },
//!   "output_dir": "out/layer",
//!   "seed": 7
//! }
//! ```

use crate::error::{Error, Result};
use crate::geometry::{build_grid, Grid, GridSpec};
use crate::potential::PotentialKind;
use crate::solver::{BoundaryProfile, SolveParams};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Dirichlet boundary scenario.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    /// `g = value` on every Dirichlet node.
    Constant { value: f64 },
    /// Two-phase data: opposite wells on the opposing `x1` faces.
    TwoPhase,
    /// Trace of the closed-form layer, evaluated at each member's epsilon.
    LayerTrace,
}

impl Scenario {
    /// The boundary profile for one sweep member.
    pub fn profile(&self, epsilon: f64) -> BoundaryProfile {
        match *self {
            Scenario::Constant { value } => BoundaryProfile::Constant(value),
            Scenario::TwoPhase => BoundaryProfile::Step,
            Scenario::LayerTrace => BoundaryProfile::LayerTrace { epsilon },
        }
    }
}

/// The clearing-out threshold: a fixed number or the string `"calibrate"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Eta0Choice {
    Fixed(f64),
    Keyword(String),
}

impl Eta0Choice {
    pub fn is_calibrate(&self) -> bool {
        matches!(self, Eta0Choice::Keyword(k) if k == "calibrate")
    }
}

impl Default for Eta0Choice {
    fn default() -> Self {
        Eta0Choice::Keyword("calibrate".into())
    }
}

/// One analysis half-ball on the face.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: [f64; 2],
    pub radius: f64,
}

fn default_concentration_radius() -> f64 {
    0.2
}

fn default_calibration_samples() -> usize {
    100
}

/// Where and how to run the analysis suites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisPlan {
    /// Face center of the monotonicity profile.
    #[serde(default)]
    pub monotonicity_center: [f64; 2],
    /// Radius ladder; empty means 12 radii equispaced on `[4h, r_max]`
    /// with `r_max` the largest admissible radius up to 0.8.
    #[serde(default)]
    pub monotonicity_radii: Vec<f64>,
    /// Clearing-out threshold (number or "calibrate").
    #[serde(default)]
    pub eta0: Eta0Choice,
    /// Radius of the concentration-set scan.
    #[serde(default = "default_concentration_radius")]
    pub concentration_radius: f64,
    /// Half-balls for the defect / decomposition tables.
    #[serde(default)]
    pub balls: Vec<Ball>,
    /// Bump centers of the stationarity battery.
    #[serde(default)]
    pub battery_centers: Vec<[f64; 2]>,
    /// Bump scales of the stationarity battery.
    #[serde(default)]
    pub battery_scales: Vec<f64>,
    /// Face box `[lo, hi]` of the potential-decay series.
    #[serde(default)]
    pub decay_lo: [f64; 2],
    #[serde(default)]
    pub decay_hi: [f64; 2],
    /// Sample count for the eta0 calibration.
    #[serde(default = "default_calibration_samples")]
    pub calibration_samples: usize,
    /// Optional interior point for the vanishing-density check.
    #[serde(default)]
    pub interior_point: Option<[f64; 3]>,
    /// Radii for the interior check (required when `interior_point` is set).
    #[serde(default)]
    pub interior_radii: Vec<f64>,
}

impl Default for AnalysisPlan {
    fn default() -> Self {
        AnalysisPlan {
            monotonicity_center: [0.0, 0.0],
            monotonicity_radii: Vec::new(),
            eta0: Eta0Choice::default(),
            concentration_radius: default_concentration_radius(),
            balls: Vec::new(),
            battery_centers: Vec::new(),
            battery_scales: Vec::new(),
            decay_lo: [0.0, 0.0],
            decay_hi: [0.0, 0.0],
            calibration_samples: default_calibration_samples(),
            interior_point: None,
            interior_radii: Vec::new(),
        }
    }
}

/// A full scenario: everything the runner needs, deterministic given `seed`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub grid: GridSpec,
    pub potential: PotentialKind,
    pub scenario: Scenario,
    /// Strictly decreasing reaction scales, each respecting `epsilon >= 2h`.
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub solver: SolveParams,
    #[serde(default)]
    pub analysis: AnalysisPlan,
    /// Output directory; overridable by `--out` and the `BRLAB_OUT` env var.
    #[serde(default)]
    pub output_dir: Option<String>,
    /// Seed for every randomized step (calibration translates).
    #[serde(default)]
    pub seed: u64,
}

impl ScenarioConfig {
    /// Read and validate a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidData(format!("cannot read config {}: {e}", path.display()))
        })?;
        let cfg: ScenarioConfig = serde_json::from_str(&text).map_err(|e| {
            Error::InvalidData(format!("config {}: {e}", path.display()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Build the grid described by the config.
    pub fn build_grid(&self) -> Result<Grid> {
        build_grid(self.grid.clone())
    }

    /// Field-by-field validation; the grid itself is validated by
    /// construction.
    pub fn validate(&self) -> Result<()> {
        let grid = self.build_grid()?;
        let h = grid.h();
        if self.epsilons.is_empty() {
            return Err(Error::InvalidParams("epsilons: list is empty".into()));
        }
        for w in self.epsilons.windows(2) {
            if !(w[1] < w[0]) {
                return Err(Error::InvalidParams(format!(
                    "epsilons: must be strictly decreasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        for &eps in &self.epsilons {
            if !(eps > 0.0) || !eps.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "epsilons: {eps} is not a positive number"
                )));
            }
            if eps < 2.0 * h * (1.0 - 1e-12) {
                return Err(Error::InvalidParams(format!(
                    "epsilons: {eps} violates the epsilon >= 2h guard (h = {h}, 2h = {})",
                    2.0 * h
                )));
            }
        }
        if !(self.solver.tol > 0.0) {
            return Err(Error::InvalidParams(format!(
                "solver.tol: {} must be positive",
                self.solver.tol
            )));
        }
        if let Some(w) = self.solver.relaxation {
            if !(w > 0.0 && w < 2.0) {
                return Err(Error::InvalidParams(format!(
                    "solver.relaxation: {w} outside (0, 2)"
                )));
            }
        }
        if self.solver.max_sweeps == 0 {
            return Err(Error::InvalidParams("solver.max_sweeps: must be >= 1".into()));
        }

        let plan = &self.analysis;
        let n = grid.n();
        let inside_face = |c: &[f64; 2], r: f64, what: &str| -> Result<()> {
            for a in 0..n {
                if c[a].abs() + r > self.grid.half_widths[a] + 1e-12 {
                    return Err(Error::InvalidParams(format!(
                        "{what}: center {:?} radius {r} leaves the domain",
                        &c[..n]
                    )));
                }
            }
            Ok(())
        };
        for w in plan.monotonicity_radii.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidParams(format!(
                    "analysis.monotonicity_radii: must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if let Some(&r_max) = plan.monotonicity_radii.last() {
            inside_face(&plan.monotonicity_center, r_max, "analysis.monotonicity_radii")?;
            if r_max > self.grid.height + 1e-12 {
                return Err(Error::InvalidParams(
                    "analysis.monotonicity_radii: largest radius exceeds the slab height"
                        .into(),
                ));
            }
        }
        if let Eta0Choice::Keyword(k) = &plan.eta0 {
            if k != "calibrate" {
                return Err(Error::InvalidParams(format!(
                    "analysis.eta0: unknown keyword {k:?} (use \"calibrate\" or a number)"
                )));
            }
        }
        if let Eta0Choice::Fixed(v) = plan.eta0 {
            if !(v > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "analysis.eta0: {v} must be positive"
                )));
            }
        }
        if plan.concentration_radius < 4.0 * h {
            return Err(Error::InvalidParams(format!(
                "analysis.concentration_radius: {} below the resolution floor 4h = {}",
                plan.concentration_radius,
                4.0 * h
            )));
        }
        inside_face(
            &[0.0, 0.0],
            plan.concentration_radius,
            "analysis.concentration_radius",
        )?;
        for b in &plan.balls {
            if !(b.radius > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "analysis.balls: radius {} must be positive",
                    b.radius
                )));
            }
            inside_face(&b.center, b.radius, "analysis.balls")?;
        }
        for &s in &plan.battery_scales {
            if !(s > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "analysis.battery_scales: {s} must be positive"
                )));
            }
        }
        if plan.battery_centers.is_empty() != plan.battery_scales.is_empty() {
            return Err(Error::InvalidParams(
                "analysis.battery_centers and battery_scales must be set together".into(),
            ));
        }
        for a in 0..n {
            if plan.decay_lo[a] > plan.decay_hi[a] {
                return Err(Error::InvalidParams(format!(
                    "analysis.decay_lo/decay_hi: box is empty along axis {a}"
                )));
            }
        }
        if plan.calibration_samples == 0 && plan.eta0.is_calibrate() {
            return Err(Error::InvalidParams(
                "analysis.calibration_samples: must be >= 1 when eta0 = \"calibrate\""
                    .into(),
            ));
        }
        if plan.interior_point.is_some() && plan.interior_radii.is_empty() {
            return Err(Error::InvalidParams(
                "analysis.interior_radii: required when interior_point is set".into(),
            ));
        }
        Ok(())
    }

    /// The default monotonicity radius ladder: 12 radii equispaced on
    /// `[4h, r_max]`, `r_max = min(0.8, largest admissible)`.
    pub fn default_radius_ladder(&self, grid: &Grid) -> Vec<f64> {
        let h = grid.h();
        let c = self.analysis.monotonicity_center;
        let mut r_max = 0.8f64.min(self.grid.height);
        for a in 0..grid.n() {
            r_max = r_max.min(self.grid.half_widths[a] - c[a].abs());
        }
        let r_min = 4.0 * h;
        let k = 12;
        (0..k)
            .map(|i| r_min + (r_max - r_min) * i as f64 / (k - 1) as f64)
            .collect()
    }
}
