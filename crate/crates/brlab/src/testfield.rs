//! Test vector fields for inner variations and varifold pairings.
//!
//! The analysis layers repeatedly integrate fields `X` against energy
//! densities, and every identity they check requires `X` to be tangential on
//! the reaction face (`X_{n+1} = 0` there) and compactly supported away from
//! the Dirichlet faces.  A `TestField` carries its value and its *analytic*
//! Jacobian so no identity check mixes in extra differencing error.
//!
//! The standard battery is built from tensor products of cubic B-spline
//! bumps: smooth (C^2), compactly supported on `[-2, 2]` per factor, with
//! closed-form derivatives.  Battery fields keep `X_{n+1} = 0` *everywhere*
//! and are normalised so that `max(|X| + |DX|_F) = 1` over the grid nodes.

use crate::error::{Error, Result};
use crate::geometry::{Grid, NodeClass};
use std::sync::Arc;

type EvalFn = dyn Fn([f64; 3]) -> [f64; 3] + Send + Sync;
type JacFn = dyn Fn([f64; 3]) -> [[f64; 3]; 3] + Send + Sync;

/// A vector field with an analytic Jacobian, `DX[i][j] = dX_i / dx_j`.
pub struct TestField {
    pub label: String,
    eval: Arc<EvalFn>,
    jac: Arc<JacFn>,
}

impl std::fmt::Debug for TestField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TestField({})", self.label)
    }
}

impl Clone for TestField {
    fn clone(&self) -> Self {
        TestField {
            label: self.label.clone(),
            eval: Arc::clone(&self.eval),
            jac: Arc::clone(&self.jac),
        }
    }
}

/// Cubic B-spline bump: supported on `[-2, 2]`, `b(0) = 2/3`, C^2.
pub fn bspline(t: f64) -> f64 {
    let a = t.abs();
    if a >= 2.0 {
        0.0
    } else if a >= 1.0 {
        let s = 2.0 - a;
        s * s * s / 6.0
    } else {
        let s = 2.0 - a;
        let r = 1.0 - a;
        s * s * s / 6.0 - 4.0 * r * r * r / 6.0
    }
}

/// Derivative of `bspline`.
pub fn bspline_deriv(t: f64) -> f64 {
    let a = t.abs();
    let d = if a >= 2.0 {
        0.0
    } else if a >= 1.0 {
        let s = 2.0 - a;
        -s * s / 2.0
    } else {
        let s = 2.0 - a;
        let r = 1.0 - a;
        -s * s / 2.0 + 2.0 * r * r
    };
    if t < 0.0 {
        -d
    } else {
        d
    }
}

impl TestField {
    /// Wrap arbitrary closures (mostly useful to build *invalid* fields in
    /// tests; the analysis entry points re-validate every field they get).
    pub fn from_fns(
        label: impl Into<String>,
        eval: impl Fn([f64; 3]) -> [f64; 3] + Send + Sync + 'static,
        jac: impl Fn([f64; 3]) -> [[f64; 3]; 3] + Send + Sync + 'static,
    ) -> Self {
        TestField { label: label.into(), eval: Arc::new(eval), jac: Arc::new(jac) }
    }

    /// Tensor-product bump pointing along boundary direction `dir` (0-based),
    /// centered at the face point `center`, with factor scale `scale`:
    ///
    /// `X(p) = amp * e_dir * prod_a b((p_a - c_a)/s) * b(p_v / s)`.
    ///
    /// The vertical component is identically zero, so the field is
    /// tangential on the face by construction.  `amp = 1`; normalise with
    /// [`TestField::normalized`].
    pub fn bump(n: usize, center: [f64; 2], scale: f64, dir: usize, amp: f64) -> Self {
        assert!(dir < n, "bump direction must be a boundary direction");
        assert!(scale > 0.0);
        let factors = move |p: [f64; 3]| {
            let mut t = [0.0f64; 3];
            t[0] = (p[0] - center[0]) / scale;
            t[1] = if n == 2 { (p[1] - center[1]) / scale } else { 0.0 };
            t[2] = p[2] / scale;
            t
        };
        let active = if n == 2 { vec![0usize, 1, 2] } else { vec![0usize, 2] };
        let axes = active.clone();
        let label = format!("bump(dir={}, center=({}, {}), scale={})", dir + 1, center[0], center[1], scale);
        let eval = move |p: [f64; 3]| {
            let t = factors(p);
            let mut v = amp;
            for &a in &active {
                v *= bspline(t[a]);
            }
            let mut out = [0.0; 3];
            out[dir] = v;
            out
        };
        let jac = move |p: [f64; 3]| {
            let mut t = [0.0f64; 3];
            t[0] = (p[0] - center[0]) / scale;
            t[1] = if n == 2 { (p[1] - center[1]) / scale } else { 0.0 };
            t[2] = p[2] / scale;
            let mut out = [[0.0; 3]; 3];
            for &j in &axes {
                let mut v = amp * bspline_deriv(t[j]) / scale;
                for &a in &axes {
                    if a != j {
                        v *= bspline(t[a]);
                    }
                }
                out[dir][j] = v;
            }
            out
        };
        TestField::from_fns(label, eval, jac)
    }

    pub fn value(&self, p: [f64; 3]) -> [f64; 3] {
        (self.eval)(p)
    }

    pub fn jacobian(&self, p: [f64; 3]) -> [[f64; 3]; 3] {
        (self.jac)(p)
    }

    /// Full divergence `sum_i dX_i/dx_i` over the active slots: horizontal
    /// directions plus the vertical slot 2 (slot 1 is dead weight for n = 1).
    pub fn divergence(&self, p: [f64; 3], n: usize) -> f64 {
        let j = self.jacobian(p);
        let tangential: f64 = (0..n).map(|i| j[i][i]).sum();
        tangential + j[2][2]
    }

    /// Tangential divergence `sum_{i <= n} dX_i/dx_i` (face directions only).
    pub fn face_divergence(&self, p: [f64; 3], n: usize) -> f64 {
        let j = self.jacobian(p);
        (0..n).map(|i| j[i][i]).sum()
    }

    /// `max(|X| + |DX|_F)` sampled over all grid nodes.
    pub fn c1_norm(&self, grid: &Grid) -> f64 {
        let axes = grid.axes();
        let mut worst: f64 = 0.0;
        for id in 0..grid.node_count() {
            let p = grid.position(id);
            let v = self.value(p);
            let j = self.jacobian(p);
            let mut vn = 0.0;
            let mut jn = 0.0;
            for &a in axes {
                vn += v[a] * v[a];
                for &b in axes {
                    jn += j[a][b] * j[a][b];
                }
            }
            worst = worst.max(vn.sqrt() + jn.sqrt());
        }
        worst
    }

    /// Rescale so that the sampled C^1 norm is 1.
    pub fn normalized(self, grid: &Grid) -> Self {
        let norm = self.c1_norm(grid);
        assert!(norm > 0.0, "cannot normalise a zero field");
        let scale = 1.0 / norm;
        let eval = Arc::clone(&self.eval);
        let jac = Arc::clone(&self.jac);
        TestField {
            label: self.label,
            eval: Arc::new(move |p| {
                let v = eval(p);
                [v[0] * scale, v[1] * scale, v[2] * scale]
            }),
            jac: Arc::new(move |p| {
                let mut m = jac(p);
                for row in &mut m {
                    for v in row.iter_mut() {
                        *v *= scale;
                    }
                }
                m
            }),
        }
    }

    /// Structural checks sampled at every node: tangential on the reaction
    /// face and (numerically) zero on the Dirichlet faces.
    pub fn validate_on(&self, grid: &Grid) -> Result<()> {
        for id in 0..grid.node_count() {
            let p = grid.position(id);
            let v = self.value(p);
            match grid.class(id) {
                NodeClass::ReactionFace => {
                    // The vertical component lives in slot 2 regardless of n.
                    if v[2].abs() > 1e-12 {
                        return Err(Error::InvalidTestField {
                            label: self.label.clone(),
                            reason: format!(
                                "vertical component {} at face node {id}; fields must be tangential on the reaction face",
                                v[2]
                            ),
                        });
                    }
                }
                NodeClass::DirichletBoundary => {
                    let mag = (0..3).map(|i| v[i] * v[i]).sum::<f64>().sqrt();
                    if mag > 1e-10 {
                        return Err(Error::InvalidTestField {
                            label: self.label.clone(),
                            reason: format!(
                                "magnitude {mag} at Dirichlet node {id}; support must stay inside the open slab"
                            ),
                        });
                    }
                }
                NodeClass::Interior => {}
            }
        }
        Ok(())
    }
}

/// The standard battery: one normalised bump per (center, scale, boundary
/// direction).  Every bump is validated on the grid; supports that touch a
/// Dirichlet face are rejected up front.
pub fn bump_battery(
    grid: &Grid,
    centers: &[[f64; 2]],
    scales: &[f64],
) -> Result<Vec<TestField>> {
    let n = grid.n();
    let mut out = Vec::new();
    for &c in centers {
        for &s in scales {
            for dir in 0..n {
                let f = TestField::bump(n, c, s, dir, 1.0).normalized(grid);
                f.validate_on(grid)?;
                out.push(f);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, GridSpec};

    #[test]
    fn bspline_shape() {
        assert!((bspline(0.0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((bspline(1.0) - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(bspline(2.0), 0.0);
        assert_eq!(bspline(-2.5), 0.0);
        assert!((bspline(0.5) - bspline(-0.5)).abs() < 1e-15);
    }

    #[test]
    fn bspline_deriv_matches_finite_difference() {
        let d = 1e-6;
        for i in -40..=40 {
            let t = i as f64 * 0.05 + 0.013;
            let fd = (bspline(t + d) - bspline(t - d)) / (2.0 * d);
            assert!(
                (fd - bspline_deriv(t)).abs() < 1e-9,
                "derivative mismatch at t = {t}"
            );
        }
    }

    #[test]
    fn bump_jacobian_matches_finite_difference() {
        let f = TestField::bump(1, [0.2, 0.0], 0.15, 0, 1.0);
        let d = 1e-6;
        for &p in &[[0.25, 0.0, 0.05], [0.1, 0.0, 0.2], [0.2, 0.0, 0.0]] {
            let j = f.jacobian(p);
            for axis in [0usize, 2] {
                let mut pp = p;
                let mut pm = p;
                pp[axis] += d;
                pm[axis] -= d;
                let fd = (f.value(pp)[0] - f.value(pm)[0]) / (2.0 * d);
                assert!(
                    (fd - j[0][axis]).abs() < 1e-8,
                    "jacobian mismatch at {p:?}, axis {axis}: {fd} vs {}",
                    j[0][axis]
                );
            }
        }
    }

    #[test]
    fn battery_is_normalised_and_valid() {
        let grid =
            build_grid(GridSpec { n: 1, h: 1.0 / 64.0, half_widths: vec![1.0], height: 1.0 })
                .unwrap();
        let battery = bump_battery(&grid, &[[0.0, 0.0], [0.4, 0.0]], &[0.1, 0.2]).unwrap();
        assert_eq!(battery.len(), 4);
        for f in &battery {
            let norm = f.c1_norm(&grid);
            assert!((norm - 1.0).abs() < 1e-12, "{}: norm {norm}", f.label);
        }
    }

    #[test]
    fn battery_rejects_support_touching_dirichlet() {
        let grid =
            build_grid(GridSpec { n: 1, h: 1.0 / 32.0, half_widths: vec![1.0], height: 1.0 })
                .unwrap();
        // Support [0.9 - 0.2, 0.9 + 0.2] pokes through the lateral face.
        let err = bump_battery(&grid, &[[0.9, 0.0]], &[0.1]);
        assert!(err.is_err());
    }
}
