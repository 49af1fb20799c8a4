//! Configuration-driven scenario runner.
//!
//! Turns a validated `ScenarioConfig` into artifacts on disk:
//!
//! * `run_solve` — solve the first epsilon, dump the field;
//! * `run_sweep` — solve every epsilon, record convergence and energies;
//! * `run_analyze` — sweep plus the full analysis suite (monotonicity
//!   profile, calibrated concentration set, potential decay, stationarity
//!   residuals, mass decomposition);
//! * `run_validate` — the closed-form oracle battery (solver order, face
//!   flux identity, monotonicity identity, variation identity);
//! * `read_report` — load a report back, rejecting unknown schema majors.
//!
//! Reports are JSON (`report.json`, schema tag `brlab/1`) with CSV tables
//! and gnuplot-ready `.dat` mirrors next to them.  All files are written
//! atomically (temp sibling + rename), floats at 17 fixed digits, so
//! identical config + seed reproduce byte-identical artifacts.  Sweep
//! members solve in parallel; report assembly and writing are sequential.

use crate::concentration::{
    calibrate_eta0_detailed, concentration_set, interior_density_check, limit_field,
    potential_decay, Calibration, ConcentrationReport, DecaySeries, EpsFamily,
    InteriorDecay,
};
use crate::config::{Eta0Choice, ScenarioConfig};
use crate::energy::{energy_of_whole_domain, monotonicity_profile_of, ScaledEnergyProfile};
use crate::error::{Error, Result};
use crate::geometry::{boundary_normal_derivative, build_grid, Grid, GridSpec};
use crate::potential::PotentialKind;
use crate::solver::{exact_layer, solve, two_phase_data, BoundaryProfile, Solution};
use crate::testfield::bump_battery;
use crate::varifold::{build_varifold, decompose, stationarity_residual, DecompositionRow};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Report schema tag; readers accept any `brlab/1*` and reject other majors.
pub const SCHEMA: &str = "brlab/1";

/// Convergence and energy record of one sweep member.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRecord {
    pub epsilon: f64,
    pub converged: bool,
    pub sweeps: usize,
    pub final_residual: f64,
    pub max_abs_u: f64,
    pub dirichlet: f64,
    pub potential: f64,
    pub total: f64,
}

/// Stationarity residuals of one sweep member.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StationarityRecord {
    pub epsilon: f64,
    pub raw_max: f64,
    pub companion_max: f64,
}

/// Everything a run produces, in one serializable bundle.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: String,
    pub config: ScenarioConfig,
    /// True when a member failed to converge and analysis was skipped.
    pub partial: bool,
    pub runs: Vec<ConvergenceRecord>,
    /// `[start, end)` index range of the trailing <= 25%-variation energy
    /// window the family-level claims are restricted to.
    pub energy_window: Option<[usize; 2]>,
    pub monotonicity: Option<ScaledEnergyProfile>,
    pub calibration: Option<Calibration>,
    pub eta0: Option<f64>,
    pub concentration: Option<ConcentrationReport>,
    pub interior_decay: Option<InteriorDecay>,
    pub potential_decay: Option<DecaySeries>,
    pub stationarity: Vec<StationarityRecord>,
    pub decomposition: Vec<DecompositionRow>,
}

/// Solve every epsilon of the scenario, optionally on a private pool with
/// `workers` threads.  Member results are independent of scheduling, so the
/// output is deterministic for any worker count.
pub fn solve_family(
    config: &ScenarioConfig,
    workers: Option<usize>,
) -> Result<(Arc<Grid>, Vec<Solution>)> {
    config.validate()?;
    let grid = Arc::new(config.build_grid()?);
    let run_one = |eps: f64| -> Result<Solution> {
        let data = two_phase_data(&grid, config.scenario.profile(eps));
        solve(&grid, eps, config.potential, &data, None, &config.solver)
    };
    let solutions: Result<Vec<Solution>> = match workers {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::InvalidParams(format!("workers: {e}")))?;
            pool.install(|| config.epsilons.par_iter().map(|&e| run_one(e)).collect())
        }
        None => config.epsilons.par_iter().map(|&e| run_one(e)).collect(),
    };
    Ok((grid, solutions?))
}

fn record_of(sol: &Solution) -> ConvergenceRecord {
    let e = energy_of_whole_domain(&sol.grid, &sol.u, sol.potential, sol.epsilon);
    ConvergenceRecord {
        epsilon: sol.epsilon,
        converged: sol.converged,
        sweeps: sol.sweeps_used,
        final_residual: sol.final_residual,
        max_abs_u: sol.max_abs_u,
        dirichlet: e.dirichlet,
        potential: e.potential,
        total: e.total,
    }
}

fn assemble_basic(config: &ScenarioConfig, sols: &[Solution]) -> RunReport {
    let runs: Vec<ConvergenceRecord> = sols.iter().map(record_of).collect();
    let partial = runs.iter().any(|r| !r.converged);
    RunReport {
        schema: SCHEMA.to_string(),
        config: config.clone(),
        partial,
        runs,
        energy_window: None,
        monotonicity: None,
        calibration: None,
        eta0: None,
        concentration: None,
        interior_decay: None,
        potential_decay: None,
        stationarity: Vec::new(),
        decomposition: Vec::new(),
    }
}

/// Solve the first epsilon and dump the field alongside the report.
pub fn run_solve(
    config: &ScenarioConfig,
    out_dir: &Path,
    workers: Option<usize>,
) -> Result<RunReport> {
    let mut first = config.clone();
    first.epsilons.truncate(1);
    let (grid, sols) = solve_family(&first, workers)?;
    let report = assemble_basic(&first, &sols);
    write_report(&report, out_dir)?;
    write_field_csv(&grid, &sols[0], &out_dir.join("field.csv"))?;
    Ok(report)
}

/// Solve every epsilon and record convergence + energy tables.
pub fn run_sweep(
    config: &ScenarioConfig,
    out_dir: &Path,
    workers: Option<usize>,
) -> Result<RunReport> {
    let (_, sols) = solve_family(config, workers)?;
    let mut report = assemble_basic(config, &sols);
    if !report.partial {
        let family = EpsFamily::new(sols)?;
        let w = family.energy_window();
        report.energy_window = Some([w.start, w.end]);
    }
    write_report(&report, out_dir)?;
    Ok(report)
}

/// Sweep plus the full analysis suite.  A non-converged member short-circuits
/// into a partial report (flagged, still written) so the caller can exit
/// with the solver-failure code.
pub fn run_analyze(
    config: &ScenarioConfig,
    out_dir: &Path,
    workers: Option<usize>,
) -> Result<RunReport> {
    let (grid, sols) = solve_family(config, workers)?;
    let mut report = assemble_basic(config, &sols);
    if report.partial {
        write_report(&report, out_dir)?;
        return Ok(report);
    }
    let family = EpsFamily::new(sols)?;
    let w = family.energy_window();
    report.energy_window = Some([w.start, w.end]);
    let plan = &config.analysis;

    let radii = if plan.monotonicity_radii.is_empty() {
        config.default_radius_ladder(&grid)
    } else {
        plan.monotonicity_radii.clone()
    };
    let (small, _) = family.smallest();
    report.monotonicity = Some(monotonicity_profile_of(
        &grid,
        &small.u,
        small.potential,
        small.epsilon,
        plan.monotonicity_center,
        &radii,
    )?);

    let eta0 = match plan.eta0 {
        Eta0Choice::Fixed(v) => v,
        _ => {
            let cal = calibrate_eta0_detailed(
                &grid,
                plan.concentration_radius,
                plan.calibration_samples,
                config.seed,
            )?;
            let eta0 = cal.eta0;
            report.calibration = Some(cal);
            eta0
        }
    };
    report.eta0 = Some(eta0);

    let balls: Vec<([f64; 2], f64)> =
        plan.balls.iter().map(|b| (b.center, b.radius)).collect();
    let defect_balls: &[([f64; 2], f64)] =
        if family.members.len() >= 3 { &balls } else { &[] };
    report.concentration = Some(concentration_set(
        &family,
        plan.concentration_radius,
        eta0,
        defect_balls,
    )?);

    if let Some(p) = plan.interior_point {
        report.interior_decay =
            Some(interior_density_check(&family, p, &plan.interior_radii)?);
    }

    report.potential_decay = Some(potential_decay(&family, plan.decay_lo, plan.decay_hi));

    if !plan.battery_centers.is_empty() {
        let battery = bump_battery(&grid, &plan.battery_centers, &plan.battery_scales)?;
        for m in &family.members {
            let v = build_varifold(m);
            let r = stationarity_residual(m, &v, &battery)?;
            report.stationarity.push(StationarityRecord {
                epsilon: m.epsilon,
                raw_max: r.raw_max,
                companion_max: r.companion_max,
            });
        }
    }

    if family.members.len() >= 3 && !balls.is_empty() {
        let limit = limit_field(&family);
        report.decomposition = decompose(&family, &limit, &balls)?;
    }

    check_report_finite(&report)?;
    write_report(&report, out_dir)?;
    Ok(report)
}

/// One oracle check of the validation battery.
#[derive(Clone, Debug, Serialize)]
pub struct OracleCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

/// The closed-form oracle battery.  The grids and scales are fixed by the
/// battery itself; an optional config contributes solver controls and must
/// keep the Peierls-Nabarro potential (the only one with a closed-form
/// layer).
pub fn run_validate(
    config: Option<&ScenarioConfig>,
    workers: Option<usize>,
) -> Result<Vec<OracleCheck>> {
    if let Some(cfg) = config {
        if cfg.potential != PotentialKind::PeierlsNabarro {
            return Err(Error::InvalidParams(
                "validate: the oracle battery requires the peierls_nabarro potential"
                    .into(),
            ));
        }
    }
    let params = config.map(|c| c.solver.clone()).unwrap_or_default();
    let mut checks = Vec::new();

    let grid_at = |h: f64| -> Result<Arc<Grid>> {
        Ok(Arc::new(build_grid(GridSpec {
            n: 1,
            h,
            half_widths: vec![1.0],
            height: 1.0,
        })?))
    };

    // Solver accuracy: L-infinity error against the closed-form layer over
    // a refinement ladder; expected order >= 1.8.
    {
        let eps = 0.25;
        let hs = [1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0];
        let solved: Result<Vec<(f64, Solution, Vec<f64>)>> = {
            let jobs: Vec<f64> = hs.to_vec();
            let run_one = |h: f64| -> Result<(f64, Solution, Vec<f64>)> {
                let grid = grid_at(h)?;
                let exact = exact_layer(&grid, eps);
                let data = two_phase_data(&grid, BoundaryProfile::LayerTrace { epsilon: eps });
                let sol = solve(
                    &grid,
                    eps,
                    PotentialKind::PeierlsNabarro,
                    &data,
                    None,
                    &params,
                )?;
                Ok((h, sol, exact))
            };
            match workers {
                Some(k) => {
                    let pool = rayon::ThreadPoolBuilder::new()
                        .num_threads(k)
                        .build()
                        .map_err(|e| Error::InvalidParams(format!("workers: {e}")))?;
                    pool.install(|| jobs.par_iter().map(|&h| run_one(h)).collect())
                }
                None => jobs.par_iter().map(|&h| run_one(h)).collect(),
            }
        };
        match solved {
            Err(e) => checks.push(OracleCheck {
                name: "solver_order".into(),
                passed: false,
                detail: format!("solve failed: {e}"),
            }),
            Ok(runs) => {
                if let Some((h, sol, _)) = runs.iter().find(|(_, s, _)| !s.converged) {
                    checks.push(OracleCheck {
                        name: "solver_order".into(),
                        passed: false,
                        detail: format!(
                            "no convergence at h = {h} after {} sweeps (residual {:.3e})",
                            sol.sweeps_used, sol.final_residual
                        ),
                    });
                } else {
                    let errs: Vec<f64> = runs
                        .iter()
                        .map(|(_, sol, exact)| {
                            sol.u
                                .iter()
                                .zip(exact)
                                .map(|(a, b)| (a - b).abs())
                                .fold(0.0f64, f64::max)
                        })
                        .collect();
                    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
                    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
                    let order = ls_slope(&xs, &ys);
                    let err_list: Vec<String> =
                        errs.iter().map(|e| format!("{e:.3e}")).collect();
                    checks.push(OracleCheck {
                        name: "solver_order".into(),
                        passed: order >= 1.8,
                        detail: format!(
                            "L-infinity errors [{}] over h {hs:?}, measured order {order:.3}",
                            err_list.join(", ")
                        ),
                    });
                }
            }
        }
    }

    // Face flux identity of the closed-form layer: the one-sided normal
    // derivative matches sin(pi u) / (pi eps) to second order.
    {
        let eps = 0.25;
        let grid = grid_at(1.0 / 128.0)?;
        let u = exact_layer(&grid, eps);
        let bnd = boundary_normal_derivative(&grid, &u);
        let mut worst = 0.0f64;
        for (slot, &id) in grid.face_ids().iter().enumerate() {
            let rhs = (std::f64::consts::PI * u[id]).sin() / (std::f64::consts::PI * eps);
            worst = worst.max((bnd[slot] - rhs).abs());
        }
        checks.push(OracleCheck {
            name: "face_flux_identity".into(),
            passed: worst <= 0.02,
            detail: format!("max |du/dnu - sin(pi u)/(pi eps)| = {worst:.3e} (tol 2e-2)"),
        });
    }

    // Monotonicity identity on a solved layer.
    {
        let eps = 0.1;
        let grid = grid_at(1.0 / 128.0)?;
        let data = two_phase_data(&grid, BoundaryProfile::LayerTrace { epsilon: eps });
        match solve(&grid, eps, PotentialKind::PeierlsNabarro, &data, None, &params) {
            Err(e) => checks.push(OracleCheck {
                name: "monotonicity_identity".into(),
                passed: false,
                detail: format!("solve failed: {e}"),
            }),
            Ok(sol) if !sol.converged => checks.push(OracleCheck {
                name: "monotonicity_identity".into(),
                passed: false,
                detail: format!("no convergence after {} sweeps", sol.sweeps_used),
            }),
            Ok(sol) => {
                let h = grid.h();
                let radii: Vec<f64> = (0..12)
                    .map(|i| 4.0 * h + (0.8 - 4.0 * h) * i as f64 / 11.0)
                    .collect();
                let e_total =
                    energy_of_whole_domain(&grid, &sol.u, sol.potential, sol.epsilon).total;
                match monotonicity_profile_of(
                    &grid,
                    &sol.u,
                    sol.potential,
                    sol.epsilon,
                    [0.0, 0.0],
                    &radii,
                ) {
                    Err(e) => checks.push(OracleCheck {
                        name: "monotonicity_identity".into(),
                        passed: false,
                        detail: format!("profile failed: {e}"),
                    }),
                    Ok(profile) => {
                        let viol = profile.max_violation();
                        let mismatch = profile.identity_mismatch();
                        checks.push(OracleCheck {
                            name: "monotonicity_identity".into(),
                            passed: viol <= 1e-3 * e_total && mismatch <= 0.10,
                            detail: format!(
                                "max violation {viol:.3e} (tol {:.3e}), endpoint identity mismatch {:.1}% (tol 10%)",
                                1e-3 * e_total,
                                100.0 * mismatch
                            ),
                        });
                    }
                }
            }
        }
    }

    // Inner-variation identity on a solved layer against the bump battery.
    {
        let eps = 0.25;
        let grid = grid_at(1.0 / 128.0)?;
        let data = two_phase_data(&grid, BoundaryProfile::LayerTrace { epsilon: eps });
        match solve(&grid, eps, PotentialKind::PeierlsNabarro, &data, None, &params) {
            Err(e) => checks.push(OracleCheck {
                name: "variation_identity".into(),
                passed: false,
                detail: format!("solve failed: {e}"),
            }),
            Ok(sol) if !sol.converged => checks.push(OracleCheck {
                name: "variation_identity".into(),
                passed: false,
                detail: format!("no convergence after {} sweeps", sol.sweeps_used),
            }),
            Ok(sol) => {
                let battery = bump_battery(&grid, &[[0.0, 0.0]], &[0.2, 0.1])?;
                let mut worst = 0.0f64;
                for f in &battery {
                    let r = crate::energy::inner_variation_residual(&sol, f)?;
                    worst = worst.max(r.abs());
                }
                checks.push(OracleCheck {
                    name: "variation_identity".into(),
                    passed: worst <= 5e-2,
                    detail: format!(
                        "max |residual| = {worst:.3e} over {} normalised bumps (tol 5e-2)",
                        battery.len()
                    ),
                });
            }
        }
    }

    Ok(checks)
}

/// Resolve the output directory: `--out` flag, then the config's
/// `output_dir`, then `BRLAB_OUT`, then `./out`.
pub fn resolve_out_dir(flag: Option<&Path>, config_dir: Option<&str>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(d) = config_dir {
        return PathBuf::from(d);
    }
    if let Some(env) = std::env::var_os("BRLAB_OUT") {
        return PathBuf::from(env);
    }
    PathBuf::from("out")
}

fn fmt_float(x: f64) -> String {
    format!("{x:.17e}")
}

fn tmp_sibling(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Write atomically: temp sibling in the same directory, then rename.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = tmp_sibling(path);
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn write_field_csv(grid: &Grid, sol: &Solution, path: &Path) -> Result<()> {
    let n = grid.n();
    let mut out = String::new();
    if n == 1 {
        out.push_str("x1,y,u\n");
    } else {
        out.push_str("x1,x2,y,u\n");
    }
    for id in 0..grid.node_count() {
        let p = grid.position(id);
        if n == 1 {
            out.push_str(&format!(
                "{},{},{}\n",
                fmt_float(p[0]),
                fmt_float(p[2]),
                fmt_float(sol.u[id])
            ));
        } else {
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_float(p[0]),
                fmt_float(p[1]),
                fmt_float(p[2]),
                fmt_float(sol.u[id])
            ));
        }
    }
    write_atomic(path, &out)
}

/// Write the report JSON plus CSV tables and `.dat` plot mirrors.
pub fn write_report(report: &RunReport, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let json = serde_json::to_string_pretty(report)
        .map_err(|e| Error::InvalidData(format!("report serialization: {e}")))?;
    write_atomic(&out_dir.join("report.json"), &(json + "\n"))?;

    let mut runs = String::from(
        "epsilon,converged,sweeps,final_residual,max_abs_u,dirichlet,potential,total\n",
    );
    for r in &report.runs {
        runs.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            fmt_float(r.epsilon),
            r.converged,
            r.sweeps,
            fmt_float(r.final_residual),
            fmt_float(r.max_abs_u),
            fmt_float(r.dirichlet),
            fmt_float(r.potential),
            fmt_float(r.total)
        ));
    }
    write_atomic(&out_dir.join("runs.csv"), &runs)?;

    if let Some(p) = &report.monotonicity {
        let mut csv = String::from("r,i,term_sphere,term_disc\n");
        let mut dat = String::from("# r I term_sphere term_disc\n");
        for k in 0..p.radii.len() {
            let cols = [p.radii[k], p.i_values[k], p.term_sphere[k], p.term_disc[k]];
            let formatted: Vec<String> = cols.iter().map(|&v| fmt_float(v)).collect();
            csv.push_str(&(formatted.join(",") + "\n"));
            dat.push_str(&(formatted.join(" ") + "\n"));
        }
        write_atomic(&out_dir.join("monotonicity.csv"), &csv)?;
        write_atomic(&out_dir.join("monotonicity.dat"), &dat)?;
    }

    if let Some(d) = &report.potential_decay {
        let mut csv = String::from("epsilon,face_potential_mass\n");
        let mut dat = String::from("# epsilon face_potential_mass\n");
        for (e, v) in d.epsilons.iter().zip(&d.values) {
            csv.push_str(&format!("{},{}\n", fmt_float(*e), fmt_float(*v)));
            dat.push_str(&format!("{} {}\n", fmt_float(*e), fmt_float(*v)));
        }
        write_atomic(&out_dir.join("decay.csv"), &csv)?;
        write_atomic(&out_dir.join("decay.dat"), &dat)?;
    }

    if !report.stationarity.is_empty() {
        let mut csv = String::from("epsilon,raw_max,companion_max\n");
        let mut dat = String::from("# epsilon raw_max companion_max\n");
        for s in &report.stationarity {
            csv.push_str(&format!(
                "{},{},{}\n",
                fmt_float(s.epsilon),
                fmt_float(s.raw_max),
                fmt_float(s.companion_max)
            ));
            dat.push_str(&format!(
                "{} {} {}\n",
                fmt_float(s.epsilon),
                fmt_float(s.raw_max),
                fmt_float(s.companion_max)
            ));
        }
        write_atomic(&out_dir.join("stationarity.csv"), &csv)?;
        write_atomic(&out_dir.join("stationarity.dat"), &dat)?;
    }

    if let Some(c) = &report.concentration {
        let mut csv = String::from("x1,x2,theta\n");
        for (p, t) in c.sigma_points.iter().zip(&c.theta_estimates) {
            csv.push_str(&format!(
                "{},{},{}\n",
                fmt_float(p[0]),
                fmt_float(p[1]),
                fmt_float(*t)
            ));
        }
        write_atomic(&out_dir.join("sigma.csv"), &csv)?;
    }

    if !report.decomposition.is_empty() {
        let mut csv =
            String::from("center1,center2,radius,v_star_mass,v_sigma_mass,measure_mass\n");
        for row in &report.decomposition {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                fmt_float(row.center[0]),
                fmt_float(row.center[1]),
                fmt_float(row.radius),
                fmt_float(row.v_star_mass),
                fmt_float(row.v_sigma_mass),
                fmt_float(row.measure_mass)
            ));
        }
        write_atomic(&out_dir.join("decomposition.csv"), &csv)?;
    }

    Ok(())
}

fn ensure_finite(v: f64, what: &str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidData(format!("non-finite value in report: {what} = {v}")))
    }
}

/// Reject reports with non-finite numerics before they reach disk.
pub fn check_report_finite(report: &RunReport) -> Result<()> {
    for r in &report.runs {
        for (v, k) in [
            (r.epsilon, "runs.epsilon"),
            (r.final_residual, "runs.final_residual"),
            (r.max_abs_u, "runs.max_abs_u"),
            (r.dirichlet, "runs.dirichlet"),
            (r.potential, "runs.potential"),
            (r.total, "runs.total"),
        ] {
            ensure_finite(v, k)?;
        }
    }
    if let Some(p) = &report.monotonicity {
        for arr in [&p.radii, &p.i_values, &p.term_sphere, &p.term_disc] {
            for &v in arr.iter() {
                ensure_finite(v, "monotonicity")?;
            }
        }
    }
    if let Some(c) = &report.calibration {
        ensure_finite(c.eta0, "calibration.eta0")?;
        if let Some(r) = c.raw_threshold {
            ensure_finite(r, "calibration.raw_threshold")?;
        }
    }
    if let Some(v) = report.eta0 {
        ensure_finite(v, "eta0")?;
    }
    if let Some(c) = &report.concentration {
        for t in &c.theta_estimates {
            ensure_finite(*t, "concentration.theta")?;
        }
        for d in &c.defect_masses {
            ensure_finite(d.mu_sigma, "concentration.defect")?;
        }
    }
    if let Some(InteriorDecay::Fit { beta, log_c }) = &report.interior_decay {
        ensure_finite(*beta, "interior_decay.beta")?;
        ensure_finite(*log_c, "interior_decay.log_c")?;
    }
    if let Some(d) = &report.potential_decay {
        for &v in &d.values {
            ensure_finite(v, "potential_decay.values")?;
        }
        if let Some(s) = d.slope {
            ensure_finite(s, "potential_decay.slope")?;
        }
    }
    for s in &report.stationarity {
        ensure_finite(s.raw_max, "stationarity.raw_max")?;
        ensure_finite(s.companion_max, "stationarity.companion_max")?;
    }
    for row in &report.decomposition {
        ensure_finite(row.v_star_mass, "decomposition.v_star_mass")?;
        ensure_finite(row.v_sigma_mass, "decomposition.v_sigma_mass")?;
        ensure_finite(row.measure_mass, "decomposition.measure_mass")?;
    }
    Ok(())
}

/// Load a report, verifying the schema tag; readers reject unknown majors.
pub fn read_report(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::InvalidData(format!("cannot read report {}: {e}", path.display()))
    })?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidData(format!("report {}: {e}", path.display())))?;
    let schema = v
        .get("schema")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::InvalidData("report has no schema tag".into()))?;
    let major = schema
        .strip_prefix("brlab/")
        .map(|s| s.split(['.', '-']).next().unwrap_or(s))
        .and_then(|s| s.parse::<u64>().ok())
        .ok_or_else(|| Error::InvalidData(format!("malformed schema tag {schema:?}")))?;
    if major != 1 {
        return Err(Error::InvalidData(format!(
            "unsupported schema major {major} in {schema:?} (reader supports brlab/1)"
        )));
    }
    Ok(v)
}

/// One-paragraph human summary of a loaded report.
pub fn summarize_report(v: &Value) -> String {
    let mut lines = Vec::new();
    let schema = v.get("schema").and_then(Value::as_str).unwrap_or("?");
    lines.push(format!("schema      : {schema}"));
    if let Some(runs) = v.get("runs").and_then(Value::as_array) {
        let eps: Vec<String> = runs
            .iter()
            .filter_map(|r| r.get("epsilon").and_then(Value::as_f64))
            .map(|e| format!("{e}"))
            .collect();
        let conv = runs
            .iter()
            .all(|r| r.get("converged").and_then(Value::as_bool).unwrap_or(false));
        lines.push(format!(
            "runs        : {} member(s) at epsilon = [{}], all converged: {conv}",
            runs.len(),
            eps.join(", ")
        ));
    }
    if v.get("partial").and_then(Value::as_bool) == Some(true) {
        lines.push("partial     : true (analysis skipped after non-convergence)".into());
    }
    if let Some(eta) = v.get("eta0").and_then(Value::as_f64) {
        lines.push(format!("eta0        : {eta}"));
    }
    if let Some(c) = v.get("concentration").and_then(|c| c.get("sigma_points")) {
        let k = c.as_array().map(|a| a.len()).unwrap_or(0);
        lines.push(format!("sigma       : {k} face node(s)"));
    }
    if let Some(s) = v
        .get("potential_decay")
        .and_then(|d| d.get("slope"))
        .and_then(Value::as_f64)
    {
        lines.push(format!("decay slope : {s:.3}"));
    }
    if let Some(m) = v.get("monotonicity").and_then(|m| m.get("i_values")) {
        let k = m.as_array().map(|a| a.len()).unwrap_or(0);
        lines.push(format!("monotonicity: profile over {k} radii"));
    }
    let st = v.get("stationarity").and_then(Value::as_array).map(|a| a.len()).unwrap_or(0);
    if st > 0 {
        lines.push(format!("stationarity: residuals for {st} member(s)"));
    }
    lines.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{AnalysisPlan, Ball, Scenario};
    use crate::solver::SolveParams;

    fn tiny_config() -> ScenarioConfig {
        ScenarioConfig {
            grid: GridSpec { n: 1, h: 1.0 / 32.0, half_widths: vec![1.0], height: 1.0 },
            potential: PotentialKind::PeierlsNabarro,
            scenario: Scenario::LayerTrace,
            epsilons: vec![0.4, 0.2, 0.1],
            solver: SolveParams::default(),
            analysis: AnalysisPlan {
                monotonicity_center: [0.0, 0.0],
                monotonicity_radii: vec![],
                eta0: Eta0Choice::Fixed(0.8),
                concentration_radius: 0.2,
                balls: vec![
                    Ball { center: [0.0, 0.0], radius: 0.2 },
                    Ball { center: [0.6, 0.0], radius: 0.2 },
                ],
                battery_centers: vec![[0.0, 0.0]],
                battery_scales: vec![0.2],
                decay_lo: [0.5, 0.0],
                decay_hi: [0.9, 0.0],
                calibration_samples: 10,
                interior_point: None,
                interior_radii: vec![],
            },
            output_dir: None,
            seed: 3,
        }
    }

    #[test]
    fn analyze_writes_a_full_report() {
        let cfg = tiny_config();
        let dir = tempfile::tempdir().unwrap();
        let report = run_analyze(&cfg, dir.path(), Some(2)).unwrap();
        assert!(!report.partial);
        assert!(report.monotonicity.is_some());
        assert_eq!(report.stationarity.len(), 3);
        assert_eq!(report.decomposition.len(), 2);
        for name in [
            "report.json",
            "runs.csv",
            "monotonicity.csv",
            "monotonicity.dat",
            "decay.csv",
            "stationarity.csv",
            "sigma.csv",
            "decomposition.csv",
        ] {
            assert!(dir.path().join(name).exists(), "{name} missing");
        }
        let v = read_report(&dir.path().join("report.json")).unwrap();
        assert_eq!(v["schema"], SCHEMA);
        let summary = summarize_report(&v);
        assert!(summary.contains("3 member(s)"), "summary:\n{summary}");
    }

    #[test]
    fn constant_scenario_yields_zero_tables_and_empty_sigma() {
        let mut cfg = tiny_config();
        cfg.scenario = Scenario::Constant { value: 1.0 };
        cfg.potential = PotentialKind::QuarticDoubleWell;
        let dir = tempfile::tempdir().unwrap();
        let report = run_analyze(&cfg, dir.path(), None).unwrap();
        assert!(!report.partial);
        for r in &report.runs {
            assert!(r.total.abs() < 1e-12, "constant run carries energy {}", r.total);
        }
        let c = report.concentration.unwrap();
        assert!(c.sigma_points.is_empty());
        for row in &report.decomposition {
            assert!(row.v_star_mass.abs() < 1e-12);
            assert!(row.v_sigma_mass.abs() < 1e-12);
        }
        for s in &report.stationarity {
            assert_eq!(s.raw_max, 0.0);
        }
    }

    #[test]
    fn sweep_outputs_are_deterministic() {
        let cfg = tiny_config();
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        run_sweep(&cfg, d1.path(), Some(1)).unwrap();
        run_sweep(&cfg, d2.path(), Some(3)).unwrap();
        let a = std::fs::read(d1.path().join("runs.csv")).unwrap();
        let b = std::fs::read(d2.path().join("runs.csv")).unwrap();
        assert_eq!(a, b, "runs.csv differs across worker counts");
    }

    #[test]
    fn non_convergence_flags_partial_and_skips_analysis() {
        let mut cfg = tiny_config();
        cfg.solver.max_sweeps = 3;
        let dir = tempfile::tempdir().unwrap();
        let report = run_analyze(&cfg, dir.path(), None).unwrap();
        assert!(report.partial);
        assert!(report.monotonicity.is_none());
        assert!(dir.path().join("report.json").exists());
    }

    #[test]
    fn solve_dumps_the_field() {
        let cfg = tiny_config();
        let dir = tempfile::tempdir().unwrap();
        let report = run_solve(&cfg, dir.path(), None).unwrap();
        assert_eq!(report.runs.len(), 1);
        let field = std::fs::read_to_string(dir.path().join("field.csv")).unwrap();
        let lines: Vec<&str> = field.lines().collect();
        assert_eq!(lines[0], "x1,y,u");
        // 65 x 33 nodes on the 1/32 grid.
        assert_eq!(lines.len(), 1 + 65 * 33);
    }

    #[test]
    fn reader_rejects_unknown_major() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        std::fs::write(&path, r#"{"schema": "brlab/2", "runs": []}"#).unwrap();
        let err = read_report(&path).unwrap_err().to_string();
        assert!(err.contains("unsupported schema major"), "err: {err}");
        std::fs::write(&path, r#"{"runs": []}"#).unwrap();
        assert!(read_report(&path).is_err());
    }

    #[test]
    fn validate_reports_nonconvergence_per_check() {
        let mut cfg = tiny_config();
        cfg.solver.max_sweeps = 1;
        let checks = run_validate(Some(&cfg), Some(2)).unwrap();
        assert!(checks.iter().any(|c| !c.passed));
        let order = checks.iter().find(|c| c.name == "solver_order").unwrap();
        assert!(!order.passed);
        assert!(order.detail.contains("no convergence"), "detail: {}", order.detail);
        // The closed-form identity needs no solve and still passes.
        let flux = checks.iter().find(|c| c.name == "face_flux_identity").unwrap();
        assert!(flux.passed, "detail: {}", flux.detail);
    }

    #[test]
    fn validate_requires_the_layer_potential() {
        let mut cfg = tiny_config();
        cfg.potential = PotentialKind::QuarticDoubleWell;
        assert!(run_validate(Some(&cfg), None).is_err());
    }

    #[test]
    fn finite_guard_catches_nan() {
        let cfg = tiny_config();
        let mut report = assemble_basic(&cfg, &[]);
        report.eta0 = Some(f64::NAN);
        assert!(check_report_finite(&report).is_err());
    }
}
