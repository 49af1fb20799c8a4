//! Discrete generalized varifolds built from stress tensors.
//!
//! Every field `u` on the half-slab carries a stress tensor
//! `T = I - 2 nu (x) nu` with `nu = grad u / |grad u|` (zero where the
//! gradient vanishes).  Weighting `T` by the Dirichlet density
//! `1/2 |grad u|^2` turns the solution into a generalized `(n-1)`-varifold:
//! a weighted collection of symmetric `(n+1) x (n+1)` matrices with trace
//! `n - 1` and eigenvalues `{-1, +1, ..., +1}`.  The module provides
//!
//! * `build_varifold` / `varifold_of` — one sample per cell above a
//!   relative gradient threshold; the mass reproduces the Dirichlet energy
//!   by construction (same quadrature);
//! * `pair` — integration of a continuous matrix function against the
//!   varifold;
//! * `a_membership` — the constraint set check (trace `k`, eigenvalues in
//!   `[-(n+1), 1]`);
//! * `first_variation` / `stationarity_residual` — the discrete first
//!   variation `sum w <T, DX>_F` against tangential test fields, together
//!   with the companion value that adds the face potential term.  For a
//!   converged solution the companion vanishes to `O(h)`; the raw first
//!   variation itself shrinks linearly in epsilon for bumps supported away
//!   from the concentration set, which is the stationarity mechanism of the
//!   limit;
//! * `sigma_varifold` / `decompose` — the concentration-set varifold with
//!   multiplicities and PCA tangent estimates, and the mass split
//!   `V = V_* + V_Sigma` over analysis balls.

use crate::concentration::{defect_measure, ConcentrationReport, EpsFamily, LimitField};
use crate::energy::gradient_field;
use crate::error::{Error, Result};
use crate::geometry::Grid;
use crate::potential::potential_value;
use crate::solver::Solution;
use crate::testfield::TestField;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

/// Relative gradient threshold below which a cell contributes no sample:
/// the tensor map is discontinuous at zero gradient, and a relative cutoff
/// keeps the discrete construction total and deterministic.
const GRADIENT_THRESHOLD: f64 = 1e-10;

/// One weighted stress-tensor sample.
#[derive(Clone, Debug)]
pub struct StressTensorSample {
    /// Cell center.
    pub location: [f64; 3],
    /// Energy weight `1/2 |grad u|^2 h^(n+1)`.
    pub weight: f64,
    /// `I - 2 nu (x) nu`, symmetric `(n+1) x (n+1)`.
    pub tensor: DMatrix<f64>,
}

/// A discrete generalized `(n-1)`-varifold.
#[derive(Clone, Debug)]
pub struct GeneralizedVarifold {
    dim: usize,
    pub samples: Vec<StressTensorSample>,
    mass: f64,
}

impl GeneralizedVarifold {
    /// Ambient dimension `n + 1` of the tensors.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Total weight; equals the Dirichlet energy of the generating field.
    pub fn mass(&self) -> f64 {
        self.mass
    }
}

/// The stress tensor of one gradient vector (`dim = n + 1`).  `grad` must
/// hold the active components packed densely, `(d_1 u, d_v u)` for n = 1.
pub fn stress_tensor(grad: &[f64], dim: usize) -> DMatrix<f64> {
    let norm2: f64 = grad[..dim].iter().map(|g| g * g).sum();
    if norm2 == 0.0 {
        return DMatrix::zeros(dim, dim);
    }
    let mut t = DMatrix::identity(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            t[(i, j)] -= 2.0 * grad[i] * grad[j] / norm2;
        }
    }
    t
}

/// Active `[x1, x2, v]` slots backing the `dim x dim` tensors: slot 2 is the
/// vertical direction, and for n = 1 the tensor row/column 1 maps to it.
fn tensor_axes(dim: usize) -> &'static [usize] {
    if dim == 3 {
        &[0, 1, 2]
    } else {
        &[0, 2]
    }
}

/// Membership in the constraint set of symmetric matrices with trace `k`
/// and `-(dim) I <= A <= I`.  Symmetry is a hard precondition (tolerance
/// `1e-12`); trace and spectrum are checked to `1e-9`.
pub fn a_membership(a: &DMatrix<f64>, k: f64) -> Result<bool> {
    let (rows, cols) = a.shape();
    if rows != cols {
        return Err(Error::InvalidAnalysis(format!(
            "membership check needs a square matrix, got {rows} x {cols}"
        )));
    }
    let mut max_asym = 0.0f64;
    for i in 0..rows {
        for j in (i + 1)..cols {
            max_asym = max_asym.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    if max_asym > 1e-12 {
        return Err(Error::NotSymmetric { max_asym });
    }
    if (a.trace() - k).abs() > 1e-9 {
        return Ok(false);
    }
    let eigen = a.clone().symmetric_eigenvalues();
    let lo = -(rows as f64) - 1e-9;
    Ok(eigen.iter().all(|&l| l >= lo && l <= 1.0 + 1e-9))
}

/// Build the varifold of a raw field on a grid.
pub fn varifold_of(grid: &Grid, u: &[f64]) -> GeneralizedVarifold {
    let dim = grid.dim();
    let grads = gradient_field(grid, u);
    let max_grad = grads
        .iter()
        .map(|g| (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt())
        .fold(0.0f64, f64::max);
    let cutoff = GRADIENT_THRESHOLD * max_grad;
    let cell = grid.h().powi(dim as i32);
    let axes = grid.axes();
    let samples: Vec<StressTensorSample> = (0..grid.node_count())
        .into_par_iter()
        .filter_map(|id| {
            let g = grads[id];
            let norm2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
            if norm2.sqrt() < cutoff || norm2 == 0.0 {
                return None;
            }
            // Pack the active components so the tensor rows line up with
            // `tensor_axes(dim)`.
            let mut packed = [0.0f64; 3];
            for (slot, &a) in axes.iter().enumerate() {
                packed[slot] = g[a];
            }
            Some(StressTensorSample {
                location: grid.position(id),
                weight: 0.5 * norm2 * cell,
                tensor: stress_tensor(&packed[..dim], dim),
            })
        })
        .collect();
    // Sequential sum for run-to-run determinism of reported masses.
    let mass = samples.iter().map(|s| s.weight).sum();
    GeneralizedVarifold { dim, samples, mass }
}

/// Build the varifold of a converged solution.
pub fn build_varifold(sol: &Solution) -> GeneralizedVarifold {
    varifold_of(&sol.grid, &sol.u)
}

/// Pair the varifold with a continuous matrix function: `sum w f(T)`.
pub fn pair<F>(v: &GeneralizedVarifold, f: F) -> f64
where
    F: Fn(&DMatrix<f64>) -> f64 + Sync,
{
    let terms: Vec<f64> = v.samples.par_iter().map(|s| s.weight * f(&s.tensor)).collect();
    terms.iter().sum()
}

/// Discrete first variation `sum w <T, DX(location)>_F`; the Jacobian is
/// evaluated analytically at the sample locations.
pub fn first_variation(v: &GeneralizedVarifold, x_field: &TestField) -> f64 {
    let dim = v.dim;
    let axes = tensor_axes(dim);
    let terms: Vec<f64> = v
        .samples
        .par_iter()
        .map(|s| {
            let j = x_field.jacobian(s.location);
            let mut inner = 0.0;
            for (i, &a) in axes.iter().enumerate() {
                for (k, &b) in axes.iter().enumerate() {
                    inner += s.tensor[(i, k)] * j[a][b];
                }
            }
            s.weight * inner
        })
        .collect();
    terms.iter().sum()
}

/// The face potential term `(1/eps) int W(u) div_face X dH^n` of the
/// variation identity, on the same face quadrature as the energy module.
fn face_potential_term(sol: &Solution, x_field: &TestField) -> f64 {
    let grid = &sol.grid;
    let n = grid.n();
    let face_cell = grid.h().powi(n as i32);
    let mut acc = 0.0;
    for &id in grid.face_ids() {
        let p = grid.position(id);
        acc += potential_value(sol.potential, sol.u[id]) / sol.epsilon
            * x_field.face_divergence(p, n)
            * face_cell;
    }
    acc
}

/// Stationarity residuals of a varifold against a test-field battery.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StationarityResidual {
    /// `max |first_variation(V, X)|` over the battery — the quantity that
    /// shrinks linearly in epsilon for off-interface supports.
    pub raw_max: f64,
    /// `max |first_variation(V, X) + (1/eps) int W div_face X|` — the
    /// discrete variation identity, bounded by `tol ||X||_C1 + C h`.
    pub companion_max: f64,
}

/// Evaluate raw and companion residuals over a normalised battery.
pub fn stationarity_residual(
    sol: &Solution,
    v: &GeneralizedVarifold,
    battery: &[TestField],
) -> Result<StationarityResidual> {
    if battery.is_empty() {
        return Err(Error::InvalidAnalysis("empty test-field battery".into()));
    }
    let mut raw_max = 0.0f64;
    let mut companion_max = 0.0f64;
    for x_field in battery {
        x_field.validate_on(&sol.grid)?;
        let c1 = x_field.c1_norm(&sol.grid);
        if (c1 - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidTestField {
                label: x_field.label.clone(),
                reason: format!("battery fields must be normalised, C1 norm = {c1}"),
            });
        }
        let fv = first_variation(v, x_field);
        raw_max = raw_max.max(fv.abs());
        companion_max = companion_max.max((fv + face_potential_term(sol, x_field)).abs());
    }
    Ok(StationarityResidual { raw_max, companion_max })
}

/// One point of the concentration-set varifold.
#[derive(Clone, Debug, Serialize)]
pub struct SigmaPoint {
    pub position: [f64; 2],
    /// Multiplicity: the scaled density estimate at the point.
    pub theta: f64,
    /// Unoriented tangent direction within the face plane (n = 2 only;
    /// `None` for n = 1, where the tangent object is the 0-plane, and for
    /// degenerate neighbourhoods).
    pub tangent: Option<[f64; 2]>,
}

/// The varifold carried by the concentration set.
#[derive(Clone, Debug, Serialize)]
pub struct SigmaVarifold {
    /// Boundary dimension the set lives in.
    pub n: usize,
    pub points: Vec<SigmaPoint>,
    /// Provenance label for the tangents: they are a PCA diagnostic on the
    /// discrete point cloud, not a rectifiability construction.
    pub tangent_label: &'static str,
}

/// Assemble the concentration-set varifold from a concentration report.
/// Multiplicities come from the report's density estimates; for n = 2 the
/// tangent line at each point is the weighted principal direction of the
/// set points within radius `3 r`.
pub fn sigma_varifold(report: &ConcentrationReport) -> Result<SigmaVarifold> {
    if report.sigma_points.is_empty() {
        return Err(Error::InvalidAnalysis(
            "concentration set is empty; no varifold to build".into(),
        ));
    }
    let pts = &report.sigma_points;
    let thetas = &report.theta_estimates;
    let points = pts
        .iter()
        .zip(thetas)
        .map(|(&position, &theta)| {
            let tangent = if report.n == 2 {
                principal_direction(pts, thetas, position, 3.0 * report.r)
            } else {
                None
            };
            SigmaPoint { position, theta, tangent }
        })
        .collect();
    Ok(SigmaVarifold { n: report.n, points, tangent_label: "estimate" })
}

/// Weighted principal direction of the points within `radius` of `center`
/// (unit vector, sign-normalised to nonnegative first component).
fn principal_direction(
    pts: &[[f64; 2]],
    weights: &[f64],
    center: [f64; 2],
    radius: f64,
) -> Option<[f64; 2]> {
    let mut wsum = 0.0;
    let mut mean = [0.0f64; 2];
    let near = |p: &[f64; 2]| {
        let dx = p[0] - center[0];
        let dy = p[1] - center[1];
        dx * dx + dy * dy <= radius * radius
    };
    for (p, &w) in pts.iter().zip(weights) {
        if near(p) {
            wsum += w;
            mean[0] += w * p[0];
            mean[1] += w * p[1];
        }
    }
    if wsum <= 0.0 {
        return None;
    }
    mean[0] /= wsum;
    mean[1] /= wsum;
    let (mut cxx, mut cxy, mut cyy) = (0.0f64, 0.0f64, 0.0f64);
    for (p, &w) in pts.iter().zip(weights) {
        if near(p) {
            let dx = p[0] - mean[0];
            let dy = p[1] - mean[1];
            cxx += w * dx * dx;
            cxy += w * dx * dy;
            cyy += w * dy * dy;
        }
    }
    if cxx + cyy <= 1e-300 {
        return None;
    }
    // Principal eigenvector of [[cxx, cxy], [cxy, cyy]] in closed form.
    let half_angle = 0.5 * (2.0 * cxy).atan2(cxx - cyy);
    let mut dir = [half_angle.cos(), half_angle.sin()];
    if dir[0] < 0.0 || (dir[0] == 0.0 && dir[1] < 0.0) {
        dir = [-dir[0], -dir[1]];
    }
    Some(dir)
}

/// One row of the limiting mass decomposition over an analysis ball.
#[derive(Clone, Debug, Serialize)]
pub struct DecompositionRow {
    pub center: [f64; 2],
    pub radius: f64,
    /// Mass of the limit-field varifold on the ball: `1/2 int_B |grad u_*|^2`.
    pub v_star_mass: f64,
    /// Defect mass on the ball.
    pub v_sigma_mass: f64,
    /// Full energy-measure mass of the smallest-epsilon member on the ball,
    /// against which the split is compared.
    pub measure_mass: f64,
}

/// Split the limiting mass over analysis balls: `V_*` from the limit proxy,
/// `V_Sigma` from the defect measure, compared to the smallest-epsilon
/// energy mass.
pub fn decompose(
    family: &EpsFamily,
    limit: &LimitField,
    balls: &[([f64; 2], f64)],
) -> Result<Vec<DecompositionRow>> {
    let (small, m_small) = family.smallest();
    if limit.epsilon != small.epsilon {
        return Err(Error::InvalidAnalysis(format!(
            "limit proxy at epsilon {} does not match the family's smallest {}",
            limit.epsilon, small.epsilon
        )));
    }
    let star_measure = crate::energy::measure_of(
        family.grid(),
        &limit.u_star,
        family.potential(),
        limit.epsilon,
    );
    let defects = defect_measure(family, balls)?;
    Ok(defects
        .iter()
        .map(|d| {
            let v_star = star_measure.dirichlet_mass_in_halfball(&d.center, d.radius);
            DecompositionRow {
                center: d.center,
                radius: d.radius,
                v_star_mass: v_star,
                v_sigma_mass: d.mu_sigma,
                measure_mass: m_small.mass_in_halfball(&d.center, d.radius),
            }
        })
        .collect())
}
