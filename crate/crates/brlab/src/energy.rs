//! Energy functionals, localised energy measures and monotonicity profiles.
//!
//! The energy of a field `u` at reaction scale `epsilon` over a region `A` is
//!
//! ```text
//!   E(u, A) = 1/2 int_A |grad u|^2 dx  +  1/eps int_{A \cap face} W(u) dH^n
//! ```
//!
//! discretised with the cell-center quadrature from the geometry module:
//! every included node contributes `h^(n+1)` of volume (`h^n` of face area).
//! Gradients use centered differences where both neighbors exist and
//! second-order one-sided stencils on the boundary rows, so all densities are
//! defined up to the boundary and quadrature is the only first-order error
//! source.  Every identity checked downstream therefore carries a tolerance
//! of the form `a + b*h`.
//!
//! The scaled energy `I(r, x) = r^(1-n) E(u, B_r^+(x))` with `x` on the face
//! is nondecreasing in `r` for critical points, with the exact increment
//!
//! ```text
//!   I(r2, x) - I(r1, x) = int over the half-annulus of
//!                           |y - x|^-(n+1) ((y - x) . grad u)^2 dy
//!                       + int_{r1}^{r2} r^-n [ 1/eps int_{D_r(x)} W(u) ] dr
//! ```
//!
//! (the sphere term in coarea form).  `monotonicity_profile` evaluates both
//! right-hand terms cumulatively so tests can confront the identity.

use crate::error::{Error, Result};
use crate::geometry::{
    in_closed_ball, region_weights, Grid, NodeClass, Region, RegionKind,
};
use crate::potential::{potential_value, PotentialKind};
use crate::solver::Solution;
use crate::testfield::TestField;
use serde::Serialize;
use std::sync::Arc;

/// Dirichlet / face-potential split of an energy evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub dirichlet: f64,
    pub potential: f64,
    pub total: f64,
}

/// Nodal gradient field; entry `[g1, g2, gv]` with `g2 = 0` for `n = 1`.
pub fn gradient_field(grid: &Grid, u: &[f64]) -> Vec<[f64; 3]> {
    assert_eq!(u.len(), grid.node_count(), "field length mismatch");
    let dims = grid.dims();
    let inv2h = 1.0 / (2.0 * grid.h());
    let mut out = vec![[0.0; 3]; grid.node_count()];
    let axes = grid.axes();
    for id in 0..grid.node_count() {
        let idx = grid.node_index(id);
        let mut g = [0.0; 3];
        for &a in axes {
            let s = grid.stride(a);
            let i = idx[a];
            let d = dims[a];
            g[a] = if i > 0 && i + 1 < d {
                (u[id + s] - u[id - s]) * inv2h
            } else if i == 0 {
                (-3.0 * u[id] + 4.0 * u[id + s] - u[id + 2 * s]) * inv2h
            } else {
                (3.0 * u[id] - 4.0 * u[id - s] + u[id - 2 * s]) * inv2h
            };
        }
        out[id] = g;
    }
    out
}

/// Per-cell energy measure of a field: interior density `1/2 |grad u|^2` per
/// node cell and face density `W(u) / eps` per face cell.
#[derive(Clone, Debug)]
pub struct EnergyMeasure {
    pub grid: Arc<Grid>,
    /// `1/2 |grad u|^2 h^(n+1)` per node.
    interior: Vec<f64>,
    /// `W(u)/eps * h^n` per face node (aligned with `grid.face_ids()`).
    face: Vec<f64>,
}

impl EnergyMeasure {
    pub fn interior_masses(&self) -> &[f64] {
        &self.interior
    }

    pub fn face_masses(&self) -> &[f64] {
        &self.face
    }

    pub fn total(&self) -> f64 {
        self.interior.iter().sum::<f64>() + self.face.iter().sum::<f64>()
    }

    /// Mass of the closed half-ball `B_r^+(c)`, `c` on the face: interior
    /// cells plus face cells.
    pub fn mass_in_halfball(&self, c: &[f64; 2], r: f64) -> f64 {
        let g = &self.grid;
        let mut m = 0.0;
        for id in g.ball_bbox_ids(c, r) {
            if in_closed_ball(g.dist2_to_face_point(id, c), r) {
                m += self.interior[id];
                if let Some(slot) = g.face_slot(id) {
                    m += self.face[slot];
                }
            }
        }
        m
    }

    /// Interior (Dirichlet) part of `mass_in_halfball`.
    pub fn dirichlet_mass_in_halfball(&self, c: &[f64; 2], r: f64) -> f64 {
        let g = &self.grid;
        let mut m = 0.0;
        for id in g.ball_bbox_ids(c, r) {
            if in_closed_ball(g.dist2_to_face_point(id, c), r) {
                m += self.interior[id];
            }
        }
        m
    }

    /// Mass of a full ball around an arbitrary point `c = [x1, x2, y]`.
    /// Meant for balls contained in the open slab, so face cells are not
    /// included.
    pub fn mass_in_ball(&self, c: &[f64; 3], r: f64) -> f64 {
        let g = &self.grid;
        let mut m = 0.0;
        // Reuse the face-centered bbox walker with an enlarged radius, then
        // filter by true 3D distance.
        let face_c = [c[0], c[1]];
        let reach = r + c[2];
        for id in g.ball_bbox_ids(&face_c, reach) {
            let p = g.position(id);
            let dx0 = p[0] - c[0];
            let dx1 = p[1] - c[1];
            let dxv = p[2] - c[2];
            if in_closed_ball(dx0 * dx0 + dx1 * dx1 + dxv * dxv, r) {
                m += self.interior[id];
            }
        }
        m
    }

    /// Mass over an explicit region (face cells only for face regions).
    pub fn mass_in_region(&self, region: &Region) -> f64 {
        let mut m = 0.0;
        for &id in region.nodes() {
            if !region.is_face_only() {
                m += self.interior[id];
            }
            if let Some(slot) = self.grid.face_slot(id) {
                m += self.face[slot];
            }
        }
        m
    }
}

/// Build the energy measure of a raw field.
pub fn measure_of(
    grid: &Arc<Grid>,
    u: &[f64],
    potential: PotentialKind,
    epsilon: f64,
) -> EnergyMeasure {
    let grads = gradient_field(grid, u);
    let cell = grid.h().powi(grid.dim() as i32);
    let face_cell = grid.h().powi(grid.n() as i32);
    let interior = grads
        .iter()
        .map(|g| 0.5 * (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]) * cell)
        .collect();
    let face = grid
        .face_ids()
        .iter()
        .map(|&id| potential_value(potential, u[id]) / epsilon * face_cell)
        .collect();
    EnergyMeasure { grid: Arc::clone(grid), interior, face }
}

/// Energy measure of a solution.
pub fn measure(sol: &Solution) -> EnergyMeasure {
    measure_of(&sol.grid, &sol.u, sol.potential, sol.epsilon)
}

/// Energy of a raw field over a region.
pub fn energy_of(
    grid: &Grid,
    u: &[f64],
    potential: PotentialKind,
    epsilon: f64,
    region: &Region,
) -> EnergyBreakdown {
    let cell = grid.h().powi(grid.dim() as i32);
    let face_cell = grid.h().powi(grid.n() as i32);
    let grads = gradient_field(grid, u);
    let mut dirichlet = 0.0;
    let mut potential_part = 0.0;
    for &id in region.nodes() {
        if !region.is_face_only() {
            let g = grads[id];
            dirichlet += 0.5 * (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]) * cell;
        }
        if grid.class(id) == NodeClass::ReactionFace {
            potential_part += potential_value(potential, u[id]) / epsilon * face_cell;
        }
    }
    EnergyBreakdown {
        dirichlet,
        potential: potential_part,
        total: dirichlet + potential_part,
    }
}

/// Energy of a solution over a region.
pub fn energy(sol: &Solution, region: &Region) -> EnergyBreakdown {
    energy_of(&sol.grid, &sol.u, sol.potential, sol.epsilon, region)
}

/// Fast whole-domain energy (no region materialisation); used by the solver
/// for its per-100-sweep energy trace.
pub fn energy_of_whole_domain(
    grid: &Grid,
    u: &[f64],
    potential: PotentialKind,
    epsilon: f64,
) -> EnergyBreakdown {
    let cell = grid.h().powi(grid.dim() as i32);
    let face_cell = grid.h().powi(grid.n() as i32);
    let grads = gradient_field(grid, u);
    let dirichlet: f64 = grads
        .iter()
        .map(|g| 0.5 * (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]) * cell)
        .sum();
    let potential_part: f64 = grid
        .face_ids()
        .iter()
        .map(|&id| potential_value(potential, u[id]) / epsilon * face_cell)
        .sum();
    EnergyBreakdown {
        dirichlet,
        potential: potential_part,
        total: dirichlet + potential_part,
    }
}

/// Scaled energy `I(r, x) = r^(1-n) E(u, B_r^+(x))` for a raw field.
pub fn scaled_energy_of(
    grid: &Grid,
    u: &[f64],
    potential: PotentialKind,
    epsilon: f64,
    x: [f64; 2],
    r: f64,
) -> Result<f64> {
    let region = region_weights(grid, RegionKind::HalfBall { center: x, radius: r })?;
    let e = energy_of(grid, u, potential, epsilon, &region);
    Ok(r.powi(1 - grid.n() as i32) * e.total)
}

/// Scaled energy of a solution.
pub fn scaled_energy(sol: &Solution, x: [f64; 2], r: f64) -> Result<f64> {
    scaled_energy_of(&sol.grid, &sol.u, sol.potential, sol.epsilon, x, r)
}

/// The scaled-energy profile along a radius ladder, together with the two
/// cumulative right-hand terms of the monotonicity identity.
#[derive(Clone, Debug, Serialize)]
pub struct ScaledEnergyProfile {
    pub center: [f64; 2],
    pub radii: Vec<f64>,
    /// `I(r_k, center)`.
    pub i_values: Vec<f64>,
    /// Cumulative sphere term (coarea form over half-annuli), `term_sphere[0] = 0`.
    pub term_sphere: Vec<f64>,
    /// Cumulative disc term (trapezoid in `r`), `term_disc[0] = 0`.
    pub term_disc: Vec<f64>,
}

impl ScaledEnergyProfile {
    /// Endpoint identity defect `|dI - (sphere + disc)|` relative to `|dI|`.
    pub fn identity_mismatch(&self) -> f64 {
        let k = self.radii.len() - 1;
        let di = self.i_values[k] - self.i_values[0];
        let rhs = self.term_sphere[k] + self.term_disc[k];
        if di.abs() < 1e-300 {
            (di - rhs).abs()
        } else {
            ((di - rhs) / di).abs()
        }
    }

    /// Largest monotonicity violation `max(I(r_k) - I(r_{k+1}), 0)`.
    pub fn max_violation(&self) -> f64 {
        self.i_values
            .windows(2)
            .fold(0.0f64, |m, w| m.max(w[0] - w[1]))
    }
}

/// Evaluate the scaled-energy profile of a raw field.
///
/// Radii must be strictly increasing and every half-ball admissible; the
/// trapezoid integration of the disc term uses sub-steps of at most `h/4`.
pub fn monotonicity_profile_of(
    grid: &Grid,
    u: &[f64],
    potential: PotentialKind,
    epsilon: f64,
    x: [f64; 2],
    radii: &[f64],
) -> Result<ScaledEnergyProfile> {
    if radii.len() < 2 {
        return Err(Error::InvalidAnalysis(
            "monotonicity profile needs at least two radii".into(),
        ));
    }
    for w in radii.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidAnalysis(format!(
                "radii must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    if !(radii[0] > 0.0) {
        return Err(Error::InvalidAnalysis("radii must be positive".into()));
    }

    let n = grid.n();
    let i_values: Vec<f64> = radii
        .iter()
        .map(|&r| scaled_energy_of(grid, u, potential, epsilon, x, r))
        .collect::<Result<_>>()?;

    // Sphere term in coarea form: a single pass over the outer ball,
    // bucketing nodes into the annuli between consecutive radii.
    let grads = gradient_field(grid, u);
    let cell = grid.h().powi(grid.dim() as i32);
    let r_max = *radii.last().unwrap();
    let mut sphere_inc = vec![0.0; radii.len()];
    for id in grid.ball_bbox_ids(&x, r_max) {
        let d2 = grid.dist2_to_face_point(id, &x);
        if in_closed_ball(d2, radii[0]) || !in_closed_ball(d2, r_max) {
            continue;
        }
        // First radius whose closed ball contains the node = annulus slot.
        let mut slot = radii.len() - 1;
        for (k, &r) in radii.iter().enumerate().skip(1) {
            if in_closed_ball(d2, r) {
                slot = k;
                break;
            }
        }
        let p = grid.position(id);
        let off = [p[0] - x[0], p[1] - x[1], p[2]];
        let g = grads[id];
        let radial = off[0] * g[0] + off[1] * g[1] + off[2] * g[2];
        let d = d2.sqrt();
        // (x . grad u)^2 / |x|^{n+1} = (d_r u)^2 / |x|^{n-1}: the coarea
        // form of int r^{1-n} int_{sphere} (d_r u)^2 dH dr.
        sphere_inc[slot] += cell * radial * radial / d.powi(grid.dim() as i32);
    }
    let mut term_sphere = vec![0.0; radii.len()];
    for k in 1..radii.len() {
        term_sphere[k] = term_sphere[k - 1] + sphere_inc[k];
    }

    // Disc term: b(r) = face potential mass within distance r, as a step
    // function from sorted face distances, integrated r^-n b(r) dr by
    // trapezoid on a fine sub-grid.
    let face_cell = grid.h().powi(n as i32);
    let mut face_masses: Vec<(f64, f64)> = grid
        .face_ids()
        .iter()
        .filter_map(|&id| {
            let d2 = grid.dist2_to_face_point(id, &x);
            if in_closed_ball(d2, r_max) {
                Some((
                    d2.sqrt(),
                    potential_value(potential, u[id]) / epsilon * face_cell,
                ))
            } else {
                None
            }
        })
        .collect();
    face_masses.sort_by(|a, b| a.0.total_cmp(&b.0));
    let dists: Vec<f64> = face_masses.iter().map(|e| e.0).collect();
    let mut prefix = vec![0.0];
    for e in &face_masses {
        prefix.push(prefix.last().unwrap() + e.1);
    }
    let b = |r: f64| -> f64 {
        let k = dists.partition_point(|&d| d <= r);
        prefix[k]
    };
    let mut term_disc = vec![0.0; radii.len()];
    let sub = grid.h() / 4.0;
    for k in 1..radii.len() {
        let (lo, hi) = (radii[k - 1], radii[k]);
        let steps = ((hi - lo) / sub).ceil().max(1.0) as usize;
        let dr = (hi - lo) / steps as f64;
        let mut acc = 0.0;
        let gfun = |r: f64| b(r) / r.powi(n as i32);
        let mut prev = gfun(lo);
        for s in 1..=steps {
            let r = lo + s as f64 * dr;
            let cur = gfun(r);
            acc += 0.5 * (prev + cur) * dr;
            prev = cur;
        }
        term_disc[k] = term_disc[k - 1] + acc;
    }

    Ok(ScaledEnergyProfile { center: x, radii: radii.to_vec(), i_values, term_sphere, term_disc })
}

/// `monotonicity_profile_of` for a solution.
pub fn monotonicity_profile(
    sol: &Solution,
    x: [f64; 2],
    radii: &[f64],
) -> Result<ScaledEnergyProfile> {
    monotonicity_profile_of(&sol.grid, &sol.u, sol.potential, sol.epsilon, x, radii)
}

/// Residual of the inner-variation identity for a test field `X`:
///
/// ```text
///   int ( 1/2 |grad u|^2 div X - <DX grad u, grad u> ) dx
///     + 1/eps int_face W(u) div_face X dH^n
/// ```
///
/// which vanishes for critical points and admissible `X` (tangential on the
/// face, compact support away from the Dirichlet faces).  Fields violating
/// those constraints are rejected.
pub fn inner_variation_residual_of(
    grid: &Grid,
    u: &[f64],
    potential: PotentialKind,
    epsilon: f64,
    x_field: &TestField,
) -> Result<f64> {
    x_field.validate_on(grid)?;
    let dim = grid.dim();
    let n = grid.n();
    let axes = grid.axes();
    let cell = grid.h().powi(dim as i32);
    let face_cell = grid.h().powi(n as i32);
    let grads = gradient_field(grid, u);
    let mut acc = 0.0;
    for id in 0..grid.node_count() {
        let p = grid.position(id);
        let j = x_field.jacobian(p);
        let g = grads[id];
        let mut div = 0.0;
        let mut quad = 0.0;
        for &a in axes {
            div += j[a][a];
            for &b in axes {
                quad += j[a][b] * g[a] * g[b];
            }
        }
        let e = 0.5 * (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
        acc += (e * div - quad) * cell;
    }
    for &id in grid.face_ids() {
        let p = grid.position(id);
        let divf = x_field.face_divergence(p, n);
        acc += potential_value(potential, u[id]) / epsilon * divf * face_cell;
    }
    Ok(acc)
}

/// `inner_variation_residual_of` for a solution.
pub fn inner_variation_residual(sol: &Solution, x_field: &TestField) -> Result<f64> {
    inner_variation_residual_of(&sol.grid, &sol.u, sol.potential, sol.epsilon, x_field)
}
