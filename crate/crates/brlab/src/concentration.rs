//! Concentration analysis along a family of shrinking reaction scales.
//!
//! For a family of converged solutions `u_i` at strictly decreasing
//! `epsilon_i` on one grid, the energy measures
//! `mu_i = 1/2 |grad u_i|^2 dx + W(u_i)/eps_i dH^n|_face` concentrate: away
//! from the face interface the densities decay, while half-balls around the
//! interface retain mass of order one.  The routines here quantify that:
//!
//! * `density_profile` / `interior_density_check` — scaled densities
//!   `theta(r) = mu(B_r) / r^(n-1)` and their power-law fit away from the
//!   face (exponent ~ 2 at smooth points);
//! * `concentration_set` — face nodes whose scaled half-ball density exceeds
//!   a threshold `eta0`, with exact nesting across radii;
//! * `clearing_out_check` / `calibrate_eta0` — the small-energy alternative
//!   ("scaled energy below eta0 forces |u| >= 1/2 on the half disc"),
//!   with `eta0` calibrated against randomized closed-form layers;
//! * `potential_decay` — face potential mass away from the interface, which
//!   shrinks linearly in epsilon;
//! * `limit_field` / `defect_measure` — the smallest-epsilon proxy for the
//!   limit field and the defect `mu_Sigma(B) = mu(B) - 1/2 int_B |grad u_*|^2`.
//!
//! A caveat the reports carry explicitly: two-phase critical points have
//! total energy growing slowly (like `log(1/epsilon)`), so family-level
//! stability claims are made on the trailing epsilon-window where the total
//! energy varies by less than 25%; `EpsFamily::energy_window` records it.

use crate::energy::{energy_of_whole_domain, measure, scaled_energy_of, EnergyMeasure};
use crate::error::{Error, Result};
use crate::geometry::Grid;
use crate::potential::{potential_value, PotentialKind};
use crate::solver::{exact_layer_value, Solution};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::sync::Arc;

/// Safety margin applied to the calibrated clearing-out threshold: the raw
/// "largest eta that held on the calibration sample" sits exactly on a
/// violating sample, so a fresh sample batch could straddle it.  Backing off
/// by 5% makes the threshold robust to the draw.
const CALIBRATION_MARGIN: f64 = 0.95;

/// A family of converged solutions at strictly decreasing epsilon on a
/// shared grid and potential.
#[derive(Debug)]
pub struct EpsFamily {
    pub members: Vec<Solution>,
    measures: Vec<EnergyMeasure>,
    totals: Vec<f64>,
    /// Index of the first member of the trailing <=25%-variation window.
    window_start: usize,
}

impl EpsFamily {
    pub fn new(members: Vec<Solution>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidAnalysis("empty family".into()));
        }
        let spec = &members[0].grid.spec;
        let pot = members[0].potential;
        for (i, m) in members.iter().enumerate() {
            if &m.grid.spec != spec {
                return Err(Error::InvalidAnalysis(format!(
                    "member {i} solved on a different grid"
                )));
            }
            if m.potential != pot {
                return Err(Error::InvalidAnalysis(format!(
                    "member {i} uses a different potential"
                )));
            }
            if !m.converged {
                return Err(Error::InvalidAnalysis(format!(
                    "member {i} (epsilon = {}) did not converge",
                    m.epsilon
                )));
            }
        }
        for w in members.windows(2) {
            if !(w[1].epsilon < w[0].epsilon) {
                return Err(Error::InvalidAnalysis(format!(
                    "epsilons must be strictly decreasing, got {} then {}",
                    w[0].epsilon, w[1].epsilon
                )));
            }
        }
        let measures: Vec<EnergyMeasure> = members.iter().map(measure).collect();
        let totals: Vec<f64> = members
            .iter()
            .map(|m| energy_of_whole_domain(&m.grid, &m.u, m.potential, m.epsilon).total)
            .collect();
        // Longest trailing window with max/min <= 1.25.
        let mut window_start = totals.len() - 1;
        for start in (0..totals.len()).rev() {
            let slice = &totals[start..];
            let mx = slice.iter().cloned().fold(f64::MIN, f64::max);
            let mn = slice.iter().cloned().fold(f64::MAX, f64::min);
            if mn > 0.0 && mx / mn <= 1.25 {
                window_start = start;
            } else {
                break;
            }
        }
        Ok(EpsFamily { members, measures, totals, window_start })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.members[0].grid
    }

    pub fn potential(&self) -> PotentialKind {
        self.members[0].potential
    }

    pub fn epsilons(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.epsilon).collect()
    }

    /// Upper energy bound `E_0 = max_i E(u_i)`.
    pub fn e0(&self) -> f64 {
        self.totals.iter().cloned().fold(0.0, f64::max)
    }

    pub fn totals(&self) -> &[f64] {
        &self.totals
    }

    /// The smallest-epsilon member and its energy measure.
    pub fn smallest(&self) -> (&Solution, &EnergyMeasure) {
        let k = self.members.len() - 1;
        (&self.members[k], &self.measures[k])
    }

    pub fn measure_of_member(&self, i: usize) -> &EnergyMeasure {
        &self.measures[i]
    }

    /// Trailing epsilon-window on which the total energy varies by <= 25%
    /// (indices into `members`); family-level stability claims live here.
    pub fn energy_window(&self) -> std::ops::Range<usize> {
        self.window_start..self.members.len()
    }
}

/// Scaled half-ball densities around one face point.
#[derive(Clone, Debug, Serialize)]
pub struct DensityProfile {
    pub center: [f64; 2],
    pub radii: Vec<f64>,
    /// `theta(r) = mu(B_r^+(x)) / r^(n-1)` (normalising constant 1).
    pub theta: Vec<f64>,
}

/// Scaled densities `theta(r)` of an energy measure around a face point.
pub fn density_profile(m: &EnergyMeasure, x: [f64; 2], radii: &[f64]) -> DensityProfile {
    let n = m.grid.n();
    let theta = radii
        .iter()
        .map(|&r| m.mass_in_halfball(&x, r) / r.powi(n as i32 - 1))
        .collect();
    DensityProfile { center: x, radii: radii.to_vec(), theta }
}

/// Power-law diagnosis of interior ball masses.
#[derive(Clone, Debug, Serialize)]
pub enum InteriorDecay {
    /// All sampled masses are numerically zero (e.g. a constant field).
    ExactZero,
    /// Least-squares fit `log theta = log c + beta log r`.
    Fit { beta: f64, log_c: f64 },
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    let slope = num / den;
    (slope, my - slope * mx)
}

/// Fit `mu(B_r(x)) / r^(n-1) ~ c r^beta` over interior balls around a point
/// in the open slab.  At smooth points of the limit the exponent is 2
/// (bounded gradient); values below ~1.5 flag leftover concentration.
pub fn interior_density_check(
    family: &EpsFamily,
    x: [f64; 3],
    radii: &[f64],
) -> Result<InteriorDecay> {
    let grid = family.grid();
    let r_max = radii.iter().cloned().fold(0.0, f64::max);
    if !(x[2] - r_max > 0.0) {
        return Err(Error::InvalidAnalysis(format!(
            "ball of radius {r_max} at height {} touches the reaction face",
            x[2]
        )));
    }
    if x[2] + r_max > grid.spec.height {
        return Err(Error::InvalidAnalysis("ball reaches the top face".into()));
    }
    for a in 0..grid.n() {
        if x[a].abs() + r_max > grid.spec.half_widths[a] {
            return Err(Error::InvalidAnalysis("ball reaches a lateral face".into()));
        }
    }
    let (_, m) = family.smallest();
    let n = grid.n();
    let masses: Vec<f64> = radii
        .iter()
        .map(|&r| m.mass_in_ball(&x, r) / r.powi(n as i32 - 1))
        .collect();
    if masses.iter().all(|&v| v <= 1e-14 * family.e0().max(1e-300)) {
        return Ok(InteriorDecay::ExactZero);
    }
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = masses.iter().map(|v| v.max(1e-300).ln()).collect();
    let (beta, log_c) = ls_slope(&xs, &ys);
    Ok(InteriorDecay::Fit { beta, log_c })
}

/// One analysis ball of the defect table.
#[derive(Clone, Debug, Serialize)]
pub struct DefectBall {
    pub center: [f64; 2],
    pub radius: f64,
    /// `mu_Sigma(B) = mu_smallest(B) - 1/2 int_B |grad u_*|^2`.
    pub mu_sigma: f64,
}

/// Concentration set of the smallest-epsilon member at one radius.
#[derive(Clone, Debug, Serialize)]
pub struct ConcentrationReport {
    /// Boundary dimension of the generating grid (1 or 2).
    pub n: usize,
    pub eta0: f64,
    pub r: f64,
    /// Face positions with `r^(1-n) mu(B_r^+) >= eta0`.
    pub sigma_points: Vec<[f64; 2]>,
    /// The scaled densities at those points (each `>= eta0`).
    pub theta_estimates: Vec<f64>,
    /// Nesting violations of `Sigma(r/2) subset Sigma(r)` (0 expected; the
    /// 0/1 cell weights make nesting exact for n = 1).
    pub nesting_violations: usize,
    /// Defect masses on the analysis balls (empty unless requested).
    pub defect_masses: Vec<DefectBall>,
}

fn sigma_node_ids(family: &EpsFamily, r: f64, eta0: f64) -> Vec<usize> {
    let grid = family.grid();
    let (_, m) = family.smallest();
    let scale = r.powi(1 - grid.n() as i32);
    grid.face_ids()
        .iter()
        .copied()
        .filter(|&id| {
            let p = grid.position(id);
            scale * m.mass_in_halfball(&[p[0], p[1]], r) >= eta0
        })
        .collect()
}

/// Compute the concentration set `Sigma_r` of the smallest-epsilon member,
/// verifying nesting against radius `r/2` internally.  Pass analysis balls
/// to fill the defect table (requires >= 3 members).
pub fn concentration_set(
    family: &EpsFamily,
    r: f64,
    eta0: f64,
    analysis_balls: &[([f64; 2], f64)],
) -> Result<ConcentrationReport> {
    let grid = family.grid();
    if !(eta0 > 0.0) {
        return Err(Error::InvalidAnalysis(format!("eta0 = {eta0} must be positive")));
    }
    if r < 4.0 * grid.h() {
        return Err(Error::InvalidAnalysis(format!(
            "radius r = {r} below the resolution floor 4h = {}",
            4.0 * grid.h()
        )));
    }
    let ids = sigma_node_ids(family, r, eta0);
    let half_ids = sigma_node_ids(family, r / 2.0, eta0);
    let nesting_violations = half_ids.iter().filter(|id| !ids.contains(id)).count();

    let (_, m) = family.smallest();
    let scale = r.powi(1 - grid.n() as i32);
    let sigma_points: Vec<[f64; 2]> = ids
        .iter()
        .map(|&id| {
            let p = grid.position(id);
            [p[0], p[1]]
        })
        .collect();
    let theta_estimates: Vec<f64> = sigma_points
        .iter()
        .map(|c| scale * m.mass_in_halfball(c, r))
        .collect();

    let defect_masses = if analysis_balls.is_empty() {
        Vec::new()
    } else {
        defect_measure(family, analysis_balls)?
    };

    Ok(ConcentrationReport {
        n: grid.n(),
        eta0,
        r,
        sigma_points,
        theta_estimates,
        nesting_violations,
        defect_masses,
    })
}

/// Data of one clearing-out evaluation.
#[derive(Clone, Debug, Serialize)]
pub struct ClearingOut {
    pub center: [f64; 2],
    pub radius: f64,
    /// `I(R, x)` of the field.
    pub scaled_energy: f64,
    /// `min |u|` over the face disc `D_{R/2}(x)`.
    pub min_abs_on_half_disc: f64,
}

impl ClearingOut {
    /// The alternative, judged at threshold `eta`: `None` when the energy
    /// hypothesis `I <= eta` fails (nothing is claimed), otherwise whether
    /// the conclusion `min |u| >= 1/2` holds.
    pub fn holds_at(&self, eta: f64) -> Option<bool> {
        if self.scaled_energy <= eta {
            Some(self.min_abs_on_half_disc >= 0.5)
        } else {
            None
        }
    }
}

/// Evaluate the clearing-out data of a raw field at one face center.
pub fn clearing_out_check(
    grid: &Grid,
    u: &[f64],
    potential: PotentialKind,
    epsilon: f64,
    x: [f64; 2],
    big_r: f64,
) -> Result<ClearingOut> {
    let scaled = scaled_energy_of(grid, u, potential, epsilon, x, big_r)?;
    let half = big_r / 2.0;
    let mut min_abs = f64::INFINITY;
    for &id in grid.face_ids() {
        if crate::geometry::in_closed_ball(grid.dist2_to_face_point(id, &x), half) {
            min_abs = min_abs.min(u[id].abs());
        }
    }
    if !min_abs.is_finite() {
        return Err(Error::InvalidAnalysis(
            "no face node inside the half disc".into(),
        ));
    }
    Ok(ClearingOut {
        center: x,
        radius: big_r,
        scaled_energy: scaled,
        min_abs_on_half_disc: min_abs,
    })
}

/// Result of the clearing-out calibration.
#[derive(Clone, Debug, Serialize)]
pub struct Calibration {
    pub eta0: f64,
    pub samples: usize,
    pub epsilon: f64,
    pub radius: f64,
    /// Smallest scaled energy among samples violating the conclusion (the
    /// raw threshold before the safety margin); `None` if none violated.
    pub raw_threshold: Option<f64>,
}

/// Calibrate the clearing-out threshold `eta0` on randomized closed-form
/// layer translates at `epsilon = R/16`: the largest `eta` (up to a 5%
/// safety margin) such that every sampled translate with `I(R, 0) <= eta`
/// keeps `|u| >= 1/2` on `D_{R/2}(0)`.  Deterministic in the seed.
pub fn calibrate_eta0(grid: &Grid, big_r: f64, samples: usize, seed: u64) -> Result<f64> {
    Ok(calibrate_eta0_detailed(grid, big_r, samples, seed)?.eta0)
}

/// `calibrate_eta0` with the full calibration record.
pub fn calibrate_eta0_detailed(
    grid: &Grid,
    big_r: f64,
    samples: usize,
    seed: u64,
) -> Result<Calibration> {
    if samples == 0 {
        return Err(Error::InvalidAnalysis("calibration needs samples".into()));
    }
    let epsilon = big_r / 16.0;
    let l1 = grid.spec.half_widths[0];
    let span = l1 - big_r; // keep the analysis ball admissible around 0
    if !(span > 0.0) {
        return Err(Error::InvalidAnalysis(
            "domain too small for the calibration radius".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_violating = f64::INFINITY;
    let mut max_holding = 0.0f64;
    for _ in 0..samples {
        let c: f64 = rng.random_range(-span..span);
        let u: Vec<f64> = (0..grid.node_count())
            .map(|id| {
                let p = grid.position(id);
                exact_layer_value(p[0] - c, p[2], epsilon)
            })
            .collect();
        let co = clearing_out_check(
            grid,
            &u,
            PotentialKind::PeierlsNabarro,
            epsilon,
            [0.0, 0.0],
            big_r,
        )?;
        if co.min_abs_on_half_disc < 0.5 {
            min_violating = min_violating.min(co.scaled_energy);
        } else {
            max_holding = max_holding.max(co.scaled_energy);
        }
    }
    let (raw, eta0) = if min_violating.is_finite() {
        (Some(min_violating), CALIBRATION_MARGIN * min_violating)
    } else {
        // No violating sample: every observed energy level is safe.
        (None, max_holding)
    };
    Ok(Calibration { eta0, samples, epsilon, radius: big_r, raw_threshold: raw })
}

/// Face potential masses per family member over a face box, with the
/// epsilon power-law fit.
#[derive(Clone, Debug, Serialize)]
pub struct DecaySeries {
    pub epsilons: Vec<f64>,
    /// `1/eps int_region W(u_i) dH^n` per member.
    pub values: Vec<f64>,
    /// Log-log slope of `values` against `epsilons`; `None` when the values
    /// vanish (nothing to fit).
    pub slope: Option<f64>,
}

/// Face potential mass over the axis-aligned face box `[lo, hi]` per family
/// member.  The box must keep its distance to the concentration set; this is
/// the caller's contract (analysis configs pin it).
pub fn potential_decay(family: &EpsFamily, lo: [f64; 2], hi: [f64; 2]) -> DecaySeries {
    let grid = family.grid();
    let n = grid.n();
    let face_cell = grid.h().powi(n as i32);
    let mut values = Vec::new();
    for m in &family.members {
        let mut acc = 0.0;
        for &id in grid.face_ids() {
            let p = grid.position(id);
            let mut inside = true;
            for a in 0..n {
                if p[a] < lo[a] - 1e-12 || p[a] > hi[a] + 1e-12 {
                    inside = false;
                }
            }
            if inside {
                acc += potential_value(m.potential, m.u[id]) / m.epsilon * face_cell;
            }
        }
        values.push(acc);
    }
    let slope = if values.iter().all(|&v| v > 1e-300) {
        let xs: Vec<f64> = family.members.iter().map(|m| m.epsilon.ln()).collect();
        let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
        Some(ls_slope(&xs, &ys).0)
    } else {
        None
    };
    DecaySeries { epsilons: family.epsilons(), values, slope }
}

/// Proxy for the limit field: the smallest-epsilon member, with provenance.
#[derive(Clone, Debug)]
pub struct LimitField {
    pub u_star: Vec<f64>,
    /// Epsilon of the member the proxy was taken from.
    pub epsilon: f64,
}

/// The limit-field proxy (no extrapolation: the smallest-epsilon member).
pub fn limit_field(family: &EpsFamily) -> LimitField {
    let (sol, _) = family.smallest();
    LimitField { u_star: sol.u.clone(), epsilon: sol.epsilon }
}

/// Mean of `|u_star|` and sign constancy per face component away from the
/// concentration set.
#[derive(Clone, Debug, Serialize)]
pub struct FaceComponent {
    pub from: f64,
    pub to: f64,
    pub mean_abs: f64,
    pub sign_constant: bool,
}

/// Split the face (n = 1) into components at distance > `margin` from the
/// given concentration points and report mean modulus and sign constancy of
/// the limit proxy on each.
pub fn limit_field_components(
    family: &EpsFamily,
    limit: &LimitField,
    sigma: &[[f64; 2]],
    margin: f64,
) -> Vec<FaceComponent> {
    let grid = family.grid();
    assert_eq!(grid.n(), 1, "component split implemented for n = 1");
    let mut comps = Vec::new();
    let mut current: Vec<(f64, f64)> = Vec::new();
    for &id in grid.face_ids() {
        let x = grid.position(id)[0];
        let clear = sigma.iter().all(|s| (x - s[0]).abs() > margin);
        if clear {
            current.push((x, limit.u_star[id]));
        } else if !current.is_empty() {
            comps.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        comps.push(current);
    }
    comps
        .into_iter()
        .filter(|c| !c.is_empty())
        .map(|c| {
            let mean_abs = c.iter().map(|(_, v)| v.abs()).sum::<f64>() / c.len() as f64;
            let sign_constant =
                c.iter().all(|(_, v)| *v > 0.0) || c.iter().all(|(_, v)| *v < 0.0);
            FaceComponent { from: c[0].0, to: c[c.len() - 1].0, mean_abs, sign_constant }
        })
        .collect()
}

/// Defect masses `mu_Sigma(B) = mu_smallest(B) - 1/2 int_B |grad u_*|^2` on
/// the given half-balls.  Requires at least 3 members so the scales are
/// genuinely separated.
pub fn defect_measure(
    family: &EpsFamily,
    balls: &[([f64; 2], f64)],
) -> Result<Vec<DefectBall>> {
    if family.members.len() < 3 {
        return Err(Error::InvalidAnalysis(format!(
            "defect measure needs >= 3 family members, got {}",
            family.members.len()
        )));
    }
    let limit = limit_field(family);
    let grid = family.grid();
    let (_, m_small) = family.smallest();
    let star_measure = crate::energy::measure_of(
        grid,
        &limit.u_star,
        family.potential(),
        limit.epsilon,
    );
    balls
        .iter()
        .map(|&(c, r)| {
            // Validate the extent through the region machinery.
            crate::geometry::region_weights(
                grid,
                crate::geometry::RegionKind::HalfBall { center: c, radius: r },
            )?;
            let mu = m_small.mass_in_halfball(&c, r);
            let star = star_measure.dirichlet_mass_in_halfball(&c, r);
            Ok(DefectBall { center: c, radius: r, mu_sigma: mu - star })
        })
        .collect()
}

/// Brute-force Hausdorff distance between two finite point sets on the face.
pub fn hausdorff_distance(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    let one_sided = |p: &[[f64; 2]], q: &[[f64; 2]]| -> f64 {
        p.iter()
            .map(|x| {
                q.iter()
                    .map(|y| ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    one_sided(a, b).max(one_sided(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, GridSpec};
    use crate::solver::{solve, two_phase_data, BoundaryProfile, SolveParams};

    fn grid_1d(h: f64) -> Arc<Grid> {
        Arc::new(
            build_grid(GridSpec { n: 1, h, half_widths: vec![1.0], height: 1.0 }).unwrap(),
        )
    }

    fn layer_family(grid: &Arc<Grid>, epsilons: &[f64]) -> EpsFamily {
        let params = SolveParams::default();
        let members = epsilons
            .iter()
            .map(|&eps| {
                let data = two_phase_data(grid, BoundaryProfile::LayerTrace { epsilon: eps });
                solve(grid, eps, PotentialKind::PeierlsNabarro, &data, None, &params).unwrap()
            })
            .collect();
        EpsFamily::new(members).unwrap()
    }

    #[test]
    fn family_rejects_unsorted_epsilons() {
        let grid = grid_1d(1.0 / 32.0);
        let params = SolveParams::default();
        let data = two_phase_data(&grid, BoundaryProfile::Step);
        let a = solve(&grid, 0.2, PotentialKind::QuarticDoubleWell, &data, None, &params)
            .unwrap();
        let b = solve(&grid, 0.4, PotentialKind::QuarticDoubleWell, &data, None, &params)
            .unwrap();
        assert!(EpsFamily::new(vec![a, b]).is_err());
    }

    #[test]
    fn zero_field_density_profile() {
        let grid = grid_1d(0.01);
        let u = vec![0.0; grid.node_count()];
        let m = crate::energy::measure_of(&grid, &u, PotentialKind::QuarticDoubleWell, 1.0);
        let p = density_profile(&m, [0.0, 0.0], &[0.5]);
        // theta(r) = I(r) for n = 1: W(0) * 2r / eps = 0.25.
        assert!((p.theta[0] - 0.25).abs() <= 0.3 * grid.h(), "theta = {}", p.theta[0]);
    }

    #[test]
    fn interior_density_exponent_of_layer() {
        let grid = grid_1d(1.0 / 64.0);
        let fam = layer_family(&grid, &[0.2, 0.1]);
        let radii = [0.05, 0.1, 0.15, 0.2];
        match interior_density_check(&fam, [0.0, 0.0, 0.5], &radii).unwrap() {
            InteriorDecay::Fit { beta, .. } => {
                println!("interior density exponent: {beta:.3}");
                assert!(beta >= 1.5, "beta = {beta}");
            }
            InteriorDecay::ExactZero => panic!("layer has nonzero energy"),
        }
    }

    #[test]
    fn constant_family_density_exactly_zero() {
        let grid = grid_1d(1.0 / 32.0);
        let params = SolveParams::default();
        let data = two_phase_data(&grid, BoundaryProfile::Constant(1.0));
        let members: Vec<Solution> = [0.4, 0.2]
            .iter()
            .map(|&eps| {
                solve(&grid, eps, PotentialKind::QuarticDoubleWell, &data, None, &params)
                    .unwrap()
            })
            .collect();
        let fam = EpsFamily::new(members).unwrap();
        match interior_density_check(&fam, [0.0, 0.0, 0.5], &[0.1, 0.2]).unwrap() {
            InteriorDecay::ExactZero => {}
            InteriorDecay::Fit { beta, .. } => panic!("expected exact zero, got beta {beta}"),
        }
    }

    #[test]
    fn concentration_set_brackets_interface() {
        let grid = grid_1d(1.0 / 128.0);
        let fam = layer_family(&grid, &[0.1, 0.05]);
        let report = concentration_set(&fam, 0.2, 0.8, &[]).unwrap();
        assert!(!report.sigma_points.is_empty());
        assert_eq!(report.nesting_violations, 0);
        // Sigma clusters around the interface at 0.
        for p in &report.sigma_points {
            assert!(p[0].abs() <= 0.4, "sigma point at {}", p[0]);
        }
        for (&t, _) in report.theta_estimates.iter().zip(&report.sigma_points) {
            assert!(t >= report.eta0);
            assert!(t <= fam.e0());
        }
        // A threshold above the energy bound gives an empty set.
        let empty = concentration_set(&fam, 0.2, fam.e0() * 1.01, &[]).unwrap();
        assert!(empty.sigma_points.is_empty());
    }

    /// Discrete covering bound: the face measure of Sigma_r over r stays
    /// below C E_0 / eta0 with one constant across the whole radius sweep
    /// (a Vitali cover of the face by disjoint half-balls, each carrying at
    /// least eta0 of energy, gives C = 4 for n = 1; 10 leaves slack for the
    /// lattice edge effects).
    #[test]
    fn sigma_covering_bound_across_radii() {
        let grid = grid_1d(1.0 / 128.0);
        let fam = layer_family(&grid, &[0.1, 0.05]);
        let eta0 = 0.8;
        let bound = 10.0 * fam.e0() / eta0;
        let mut nonempty = 0;
        for &r in &[0.12, 0.2, 0.3] {
            let report = concentration_set(&fam, r, eta0, &[]).unwrap();
            let face_measure = report.sigma_points.len() as f64 * grid.h().powi(grid.n() as i32);
            assert!(
                face_measure / r <= bound,
                "covering bound violated at r = {r}: {} > {bound}",
                face_measure / r
            );
            nonempty += usize::from(!report.sigma_points.is_empty());
        }
        assert!(nonempty >= 2, "the bound must be exercised by nonempty sets");
    }

    #[test]
    fn calibration_and_clearing_out() {
        let grid = grid_1d(1.0 / 128.0);
        let cal = calibrate_eta0_detailed(&grid, 0.2, 60, 11).unwrap();
        println!("calibrated eta0 = {} (raw {:?})", cal.eta0, cal.raw_threshold);
        assert!(cal.eta0 > 0.0);
        // Fresh batch with a different seed: no failures at the calibrated
        // threshold.
        let eps = 0.2 / 16.0;
        let mut rng = ChaCha8Rng::seed_from_u64(997);
        let mut applied = 0;
        for _ in 0..60 {
            let c: f64 = rng.random_range(-0.8..0.8);
            let u: Vec<f64> = (0..grid.node_count())
                .map(|id| {
                    let p = grid.position(id);
                    exact_layer_value(p[0] - c, p[2], eps)
                })
                .collect();
            let co = clearing_out_check(
                &grid,
                &u,
                PotentialKind::PeierlsNabarro,
                eps,
                [0.0, 0.0],
                0.2,
            )
            .unwrap();
            if let Some(ok) = co.holds_at(cal.eta0) {
                applied += 1;
                assert!(ok, "clearing out failed at c = {c}: I = {}", co.scaled_energy);
            }
        }
        assert!(applied > 0, "threshold never applied; calibration vacuous");
    }

    #[test]
    fn potential_decay_matches_arctangent_oracle() {
        let grid = grid_1d(1.0 / 128.0);
        let epsilons = [0.2, 0.1, 0.05];
        let fam = layer_family(&grid, &epsilons);
        let series = potential_decay(&fam, [0.5, 0.0], [0.9, 0.0]);
        // Closed form: 1/eps int_a^b W(u) dx = (2/pi^2)(atan(b/eps) - atan(a/eps)).
        for (k, &eps) in epsilons.iter().enumerate() {
            let oracle = (2.0 / (std::f64::consts::PI * std::f64::consts::PI))
                * ((0.9f64 / eps).atan() - (0.5f64 / eps).atan());
            let rel = (series.values[k] - oracle).abs() / oracle;
            assert!(rel < 0.12, "eps = {eps}: {} vs oracle {oracle}", series.values[k]);
        }
        let slope = series.slope.unwrap();
        println!("potential decay slope: {slope:.3}");
        assert!((0.7..=1.3).contains(&slope), "slope {slope}");
    }

    #[test]
    fn limit_field_tail_bound() {
        // |u| >= 0.9 outside [-c eps, c eps] with c = tan(0.45 pi) ~ 6.314
        // (the 0.9-level of the arctangent layer, computed analytically).
        let c_tail = (0.45 * std::f64::consts::PI).tan();
        let grid = grid_1d(1.0 / 128.0);
        let fam = layer_family(&grid, &[0.1, 0.05]);
        let limit = limit_field(&fam);
        assert_eq!(limit.epsilon, 0.05);
        let cut = c_tail * limit.epsilon * 1.001;
        for &id in grid.face_ids() {
            let x = grid.position(id)[0];
            if x.abs() >= cut {
                assert!(
                    limit.u_star[id].abs() >= 0.9,
                    "|u|(x = {x}) = {} below 0.9",
                    limit.u_star[id].abs()
                );
            }
        }
        let comps = limit_field_components(&fam, &limit, &[[0.0, 0.0]], cut);
        assert_eq!(comps.len(), 2);
        for c in comps {
            assert!(c.mean_abs >= 0.9, "component mean {}", c.mean_abs);
            assert!(c.sign_constant);
        }
    }

    #[test]
    fn defect_needs_three_members() {
        let grid = grid_1d(1.0 / 64.0);
        let fam = layer_family(&grid, &[0.2, 0.1]);
        assert!(defect_measure(&fam, &[([0.0, 0.0], 0.2)]).is_err());
    }

    #[test]
    fn defect_local_and_positive_on_interface() {
        let grid = grid_1d(1.0 / 128.0);
        let fam = layer_family(&grid, &[0.2, 0.1, 0.05]);
        let defects = defect_measure(
            &fam,
            &[([0.0, 0.0], 0.2), ([0.6, 0.0], 0.2)],
        )
        .unwrap();
        println!("defects: on-interface {}, off {}", defects[0].mu_sigma, defects[1].mu_sigma);
        assert!(defects[0].mu_sigma > 0.0);
        assert!(defects[1].mu_sigma.abs() <= 0.05 * fam.e0());
    }

    #[test]
    fn hausdorff_brute_force() {
        let a = [[0.0, 0.0], [1.0, 0.0]];
        let b = [[0.0, 0.0]];
        assert_eq!(hausdorff_distance(&a, &b), 1.0);
        assert_eq!(hausdorff_distance(&a, &a), 0.0);
    }
}
