//! Uniform grids on the half-slab and cell-center quadrature regions.
//!
//! The domain is the box `[-L_1, L_1] x ... x [-L_n, L_n] x [0, H]` with
//! `n` boundary directions (`n = 1` or `2`) and one vertical direction.
//! The bottom face `{x_{n+1} = 0}` carries the nonlinear reaction condition;
//! the lateral faces and the top face carry Dirichlet data.  Nodes are
//! classified once at construction:
//!
//! * `DirichletBoundary`: lateral faces (including their bottom edges) and
//!   the top face,
//! * `ReactionFace`: vertical index 0 with all boundary indices strictly
//!   inside the lateral ring,
//! * `Interior`: everything else.
//!
//! Quadrature is deliberately simple: each node owns a cell of volume
//! `h^(n+1)` (area `h^n` on the face) and a region either includes a cell or
//! it does not, decided by whether the cell center (the node itself) lies in
//! the closed region.  This is first-order accurate, which is all the
//! analysis layers ask for, and it makes region nesting *exact*: shrinking a
//! ball never adds a node.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Slack for closed-ball membership tests so that nodes lying exactly on a
/// sphere (up to roundoff in node coordinates) are counted inside.  Kept far
/// below any mesh width in use.
const INCLUSION_SLACK: f64 = 1e-12;

/// Node classification on the half-slab.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeClass {
    Interior,
    ReactionFace,
    DirichletBoundary,
}

/// Extents and mesh width of a half-slab grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Number of boundary directions (1 or 2); the ambient dimension is n+1.
    pub n: usize,
    /// Mesh width, identical along every axis.
    pub h: f64,
    /// Half-widths `L_i` of the boundary directions (`len() == n`).
    pub half_widths: Vec<f64>,
    /// Height `H` of the slab in the vertical direction.
    pub height: f64,
}

/// A realised grid: node coordinates, classification and index arithmetic.
#[derive(Debug)]
pub struct Grid {
    pub spec: GridSpec,
    /// Nodes per axis: `[d0, d1, dv]`; `d1 == 1` when `n == 1`.
    dims: [usize; 3],
    class: Vec<NodeClass>,
    face_ids: Vec<usize>,
    /// node id -> index into `face_ids`, `usize::MAX` off the face.
    face_slot: Vec<usize>,
}

fn axis_nodes(extent: f64, h: f64) -> usize {
    (extent / h).round() as usize + 1
}

/// Build a grid from its spec.
///
/// Nodes per boundary axis: `round(2 L_i / h) + 1`; vertical:
/// `round(H / h) + 1`.  Grids too coarse to support the second-order
/// one-sided stencils are rejected (fewer than 3 nodes on any axis or fewer
/// than 8 nodes in total).
pub fn build_grid(spec: GridSpec) -> Result<Grid> {
    if spec.n != 1 && spec.n != 2 {
        return Err(Error::InvalidGrid(format!(
            "n = {} not supported (only 1 and 2)",
            spec.n
        )));
    }
    if !(spec.h > 0.0) || !spec.h.is_finite() {
        return Err(Error::InvalidGrid(format!("mesh width h = {} must be positive", spec.h)));
    }
    if spec.half_widths.len() != spec.n {
        return Err(Error::InvalidGrid(format!(
            "half_widths has {} entries, expected n = {}",
            spec.half_widths.len(),
            spec.n
        )));
    }
    for (i, &l) in spec.half_widths.iter().enumerate() {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "half_widths[{i}] = {l} must be positive"
            )));
        }
    }
    if !(spec.height > 0.0) || !spec.height.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "height = {} must be positive",
            spec.height
        )));
    }

    let d0 = axis_nodes(2.0 * spec.half_widths[0], spec.h);
    let d1 = if spec.n == 2 {
        axis_nodes(2.0 * spec.half_widths[1], spec.h)
    } else {
        1
    };
    let dv = axis_nodes(spec.height, spec.h);

    let mut axes = vec![("x1", d0), ("vertical", dv)];
    if spec.n == 2 {
        axes.insert(1, ("x2", d1));
    }
    for (name, d) in &axes {
        if *d < 3 {
            return Err(Error::InvalidGrid(format!(
                "too coarse: {name} axis has {d} nodes, the stencils need at least 3"
            )));
        }
    }
    let total = d0 * d1 * dv;
    if total < 8 {
        return Err(Error::InvalidGrid(format!(
            "too coarse: {total} nodes in total, need at least 8"
        )));
    }

    let mut class = vec![NodeClass::Interior; total];
    let mut face_ids = Vec::new();
    let mut face_slot = vec![usize::MAX; total];
    for iv in 0..dv {
        for i1 in 0..d1 {
            for i0 in 0..d0 {
                let id = (iv * d1 + i1) * d0 + i0;
                let lateral = i0 == 0
                    || i0 == d0 - 1
                    || (spec.n == 2 && (i1 == 0 || i1 == d1 - 1));
                let c = if iv == dv - 1 || lateral {
                    NodeClass::DirichletBoundary
                } else if iv == 0 {
                    NodeClass::ReactionFace
                } else {
                    NodeClass::Interior
                };
                class[id] = c;
                if c == NodeClass::ReactionFace {
                    face_slot[id] = face_ids.len();
                    face_ids.push(id);
                }
            }
        }
    }

    Ok(Grid {
        spec,
        dims: [d0, d1, dv],
        class,
        face_ids,
        face_slot,
    })
}

impl Grid {
    pub fn node_count(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    /// Nodes per axis `[d0, d1, dv]` (`d1 == 1` for `n == 1`).
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn h(&self) -> f64 {
        self.spec.h
    }

    /// Ambient dimension n+1.
    pub fn dim(&self) -> usize {
        self.spec.n + 1
    }

    /// Active coordinate slots in `[x1, x2, v]` order: `[0, 2]` for n = 1
    /// (the `x2` slot is identically zero), `[0, 1, 2]` for n = 2.  Loops
    /// over vector components must iterate these, not `0..dim`, because the
    /// vertical coordinate always lives in slot 2.
    pub fn axes(&self) -> &'static [usize] {
        if self.spec.n == 2 {
            &[0, 1, 2]
        } else {
            &[0, 2]
        }
    }

    #[inline]
    pub fn node_id(&self, i0: usize, i1: usize, iv: usize) -> usize {
        (iv * self.dims[1] + i1) * self.dims[0] + i0
    }

    #[inline]
    pub fn node_index(&self, id: usize) -> [usize; 3] {
        let d0 = self.dims[0];
        let d1 = self.dims[1];
        [id % d0, (id / d0) % d1, id / (d0 * d1)]
    }

    /// Node position `[x1, x2, x_{n+1}]`; `x2 == 0` for `n == 1`.
    #[inline]
    pub fn position(&self, id: usize) -> [f64; 3] {
        let [i0, i1, iv] = self.node_index(id);
        let h = self.spec.h;
        let x0 = i0 as f64 * h - self.spec.half_widths[0];
        let x1 = if self.spec.n == 2 {
            i1 as f64 * h - self.spec.half_widths[1]
        } else {
            0.0
        };
        [x0, x1, iv as f64 * h]
    }

    #[inline]
    pub fn class(&self, id: usize) -> NodeClass {
        self.class[id]
    }

    /// Reaction-face node ids, in index order.
    pub fn face_ids(&self) -> &[usize] {
        &self.face_ids
    }

    /// Index of a node inside `face_ids`, if it is a reaction-face node.
    pub fn face_slot(&self, id: usize) -> Option<usize> {
        match self.face_slot[id] {
            usize::MAX => None,
            s => Some(s),
        }
    }

    /// Stride of axis `a` in node ids (0, 1 = boundary axes, 2 = vertical).
    #[inline]
    pub fn stride(&self, a: usize) -> usize {
        match a {
            0 => 1,
            1 => self.dims[0],
            _ => self.dims[0] * self.dims[1],
        }
    }

    /// Squared distance from node `id` to a point on the face.
    #[inline]
    pub fn dist2_to_face_point(&self, id: usize, c: &[f64; 2]) -> f64 {
        let p = self.position(id);
        let dx0 = p[0] - c[0];
        let dx1 = if self.spec.n == 2 { p[1] - c[1] } else { 0.0 };
        dx0 * dx0 + dx1 * dx1 + p[2] * p[2]
    }

    /// Iterate node ids in the axis-aligned bounding box of the closed ball
    /// `B_r(c)` with `c` on the face, clamped to the grid.
    pub fn ball_bbox_ids(&self, c: &[f64; 2], r: f64) -> impl Iterator<Item = usize> + '_ {
        let h = self.spec.h;
        let lo0 = (((c[0] - r + self.spec.half_widths[0]) / h).floor().max(0.0)) as usize;
        let hi0 = ((((c[0] + r + self.spec.half_widths[0]) / h).ceil()) as usize).min(self.dims[0] - 1);
        let (lo1, hi1) = if self.spec.n == 2 {
            let l1 = self.spec.half_widths[1];
            (
                (((c[1] - r + l1) / h).floor().max(0.0)) as usize,
                ((((c[1] + r + l1) / h).ceil()) as usize).min(self.dims[1] - 1),
            )
        } else {
            (0, 0)
        };
        let hiv = (((r / h).ceil()) as usize).min(self.dims[2] - 1);
        (0..=hiv).flat_map(move |iv| {
            (lo1..=hi1).flat_map(move |i1| (lo0..=hi0).map(move |i0| self.node_id(i0, i1, iv)))
        })
    }
}

/// Region shapes understood by the quadrature layer.  Centers live on the
/// reaction face (`[c_1, c_2]`, second entry ignored for `n == 1`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum RegionKind {
    /// Half-ball `B_r^+(c)`: volume region, includes its bottom disc.
    HalfBall { center: [f64; 2], radius: f64 },
    /// Disc `D_r(c)` on the reaction face: face region only.
    Disc { center: [f64; 2], radius: f64 },
    /// Half-annulus `B_{r2}^+(c) \ B_{r1}^+(c)` (inner ball excluded).
    HalfAnnulus { center: [f64; 2], r_inner: f64, r_outer: f64 },
    /// The whole half-slab.
    WholeDomain,
}

/// A region realised on a grid: the sorted list of nodes whose cell centers
/// lie inside.  Weights are 0/1 by design; `weight()` exposes them in the
/// `[0, 1]` form the quadrature contracts are written against.
#[derive(Clone, Debug)]
pub struct Region {
    pub kind: RegionKind,
    nodes: Vec<usize>,
    face_only: bool,
}

#[inline]
pub(crate) fn in_closed_ball(d2: f64, r: f64) -> bool {
    d2 <= r * r * (1.0 + INCLUSION_SLACK)
}

fn check_face_center(grid: &Grid, c: &[f64; 2], what: &str) -> Result<()> {
    for a in 0..grid.n() {
        let l = grid.spec.half_widths[a];
        if c[a].abs() > l {
            return Err(Error::RegionOutOfDomain(format!(
                "{what} center coordinate {} = {} lies outside [-{l}, {l}]",
                a + 1,
                c[a]
            )));
        }
    }
    Ok(())
}

fn check_ball_extent(grid: &Grid, c: &[f64; 2], r: f64, what: &str) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::RegionOutOfDomain(format!(
            "{what} radius {r} must be positive"
        )));
    }
    check_face_center(grid, c, what)?;
    for a in 0..grid.n() {
        let l = grid.spec.half_widths[a];
        if c[a] - r < -l - INCLUSION_SLACK || c[a] + r > l + INCLUSION_SLACK {
            return Err(Error::RegionOutOfDomain(format!(
                "{what} of radius {r} at center coordinate {} = {} exceeds the [-{l}, {l}] extent",
                a + 1,
                c[a]
            )));
        }
    }
    Ok(())
}

fn check_halfball_height(grid: &Grid, r: f64, what: &str) -> Result<()> {
    if r > grid.spec.height + INCLUSION_SLACK {
        return Err(Error::RegionOutOfDomain(format!(
            "{what} of radius {r} exceeds the slab height {}",
            grid.spec.height
        )));
    }
    Ok(())
}

/// Realise a region on a grid, or report which extent it violates.
pub fn region_weights(grid: &Grid, kind: RegionKind) -> Result<Region> {
    let (nodes, face_only) = match &kind {
        RegionKind::HalfBall { center, radius } => {
            check_ball_extent(grid, center, *radius, "half-ball")?;
            check_halfball_height(grid, *radius, "half-ball")?;
            let mut v: Vec<usize> = grid
                .ball_bbox_ids(center, *radius)
                .filter(|&id| in_closed_ball(grid.dist2_to_face_point(id, center), *radius))
                .collect();
            v.sort_unstable();
            (v, false)
        }
        RegionKind::Disc { center, radius } => {
            check_ball_extent(grid, center, *radius, "disc")?;
            let mut v: Vec<usize> = grid
                .ball_bbox_ids(center, *radius)
                .filter(|&id| {
                    grid.class(id) == NodeClass::ReactionFace
                        && in_closed_ball(grid.dist2_to_face_point(id, center), *radius)
                })
                .collect();
            v.sort_unstable();
            (v, true)
        }
        RegionKind::HalfAnnulus { center, r_inner, r_outer } => {
            if !(*r_inner >= 0.0 && r_outer > r_inner) {
                return Err(Error::RegionOutOfDomain(format!(
                    "half-annulus radii ({r_inner}, {r_outer}) must satisfy 0 <= r_inner < r_outer"
                )));
            }
            check_ball_extent(grid, center, *r_outer, "half-annulus")?;
            check_halfball_height(grid, *r_outer, "half-annulus")?;
            // Set difference of the two closed half-balls, so that
            // annulus + inner ball partitions the outer ball exactly.
            let mut v: Vec<usize> = grid
                .ball_bbox_ids(center, *r_outer)
                .filter(|&id| {
                    let d2 = grid.dist2_to_face_point(id, center);
                    in_closed_ball(d2, *r_outer) && !in_closed_ball(d2, *r_inner)
                })
                .collect();
            v.sort_unstable();
            (v, false)
        }
        RegionKind::WholeDomain => ((0..grid.node_count()).collect(), false),
    };
    Ok(Region { kind, nodes, face_only })
}

impl Region {
    /// Sorted node ids with weight 1 (all others have weight 0).
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Face regions carry no volume cells.
    pub fn is_face_only(&self) -> bool {
        self.face_only
    }

    /// Cell weight of a node: 1.0 if its cell center lies in the region.
    pub fn weight(&self, id: usize) -> f64 {
        if self.nodes.binary_search(&id).is_ok() {
            1.0
        } else {
            0.0
        }
    }

    /// Volume estimate `sum of weights * h^(n+1)` (0 for face regions).
    pub fn volume_estimate(&self, grid: &Grid) -> f64 {
        if self.face_only {
            return 0.0;
        }
        let cell = grid.h().powi(grid.dim() as i32);
        self.nodes.len() as f64 * cell
    }

    /// Area estimate over face nodes: `sum of face weights * h^n`.
    pub fn area_estimate(&self, grid: &Grid) -> f64 {
        let cell = grid.h().powi(grid.n() as i32);
        self.nodes
            .iter()
            .filter(|&&id| grid.class(id) == NodeClass::ReactionFace)
            .count() as f64
            * cell
    }
}

/// Outward-normal derivative `-d u / d x_{n+1}` at every reaction-face node
/// (the face normal points out of the slab, i.e. downward), via the
/// second-order one-sided stencil `(-3 u_0 + 4 u_1 - u_2) / (2h)`.
///
/// Returned values are aligned with `grid.face_ids()`.
pub fn boundary_normal_derivative(grid: &Grid, u: &[f64]) -> Vec<f64> {
    assert_eq!(u.len(), grid.node_count(), "field length mismatch");
    let sv = grid.stride(2);
    let h = grid.h();
    grid.face_ids()
        .iter()
        .map(|&id| {
            let d_vert = (-3.0 * u[id] + 4.0 * u[id + sv] - u[id + 2 * sv]) / (2.0 * h);
            -d_vert
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_1d(h: f64) -> GridSpec {
        GridSpec { n: 1, h, half_widths: vec![1.0], height: 1.0 }
    }

    #[test]
    fn hand_enumerated_5x3_grid() {
        // L = 1, H = 1, h = 0.5: nodes at x in {-1,-0.5,0,0.5,1}, y in {0,0.5,1}.
        let g = build_grid(spec_1d(0.5)).unwrap();
        assert_eq!(g.dims(), [5, 1, 3]);
        assert_eq!(g.node_count(), 15);
        let mut face = 0;
        let mut interior = 0;
        let mut dirichlet = 0;
        for id in 0..g.node_count() {
            match g.class(id) {
                NodeClass::ReactionFace => face += 1,
                NodeClass::Interior => interior += 1,
                NodeClass::DirichletBoundary => dirichlet += 1,
            }
        }
        assert_eq!(face, 3);
        assert_eq!(interior, 3);
        assert_eq!(dirichlet, 9);
        // The bottom corners belong to the lateral Dirichlet ring.
        assert_eq!(g.class(g.node_id(0, 0, 0)), NodeClass::DirichletBoundary);
        assert_eq!(g.class(g.node_id(4, 0, 0)), NodeClass::DirichletBoundary);
        assert_eq!(g.class(g.node_id(2, 0, 0)), NodeClass::ReactionFace);
        assert_eq!(g.class(g.node_id(2, 0, 1)), NodeClass::Interior);
    }

    #[test]
    fn too_coarse_grid_rejected() {
        // h = 2 gives a 2x2 grid: rejected as too coarse.
        let err = build_grid(spec_1d(2.0)).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("too coarse"), "unexpected message: {msg}");
    }

    #[test]
    fn n3_rejected() {
        let err = build_grid(GridSpec { n: 3, h: 0.1, half_widths: vec![1.0; 3], height: 1.0 });
        assert!(err.is_err());
    }

    #[test]
    fn disc_area_estimate() {
        // Disc(0, 1) at h = 0.01 on a wider face: area -> 2.0 within 0.02.
        let g = build_grid(GridSpec { n: 1, h: 0.01, half_widths: vec![1.5], height: 0.2 }).unwrap();
        let r = region_weights(&g, RegionKind::Disc { center: [0.0, 0.0], radius: 1.0 }).unwrap();
        let area = r.area_estimate(&g);
        assert!((area - 2.0).abs() <= 0.02, "area = {area}");
    }

    #[test]
    fn halfball_volume_estimate() {
        // HalfBall(0, 1) at h = 0.01: volume -> pi/2 within 0.05.
        let g = build_grid(GridSpec { n: 1, h: 0.01, half_widths: vec![1.5], height: 1.05 }).unwrap();
        let r = region_weights(&g, RegionKind::HalfBall { center: [0.0, 0.0], radius: 1.0 }).unwrap();
        let vol = r.volume_estimate(&g);
        let exact = std::f64::consts::PI / 2.0;
        assert!((vol - exact).abs() <= 0.05, "volume = {vol} vs {exact}");
    }

    #[test]
    fn halfannulus_volume_estimate() {
        // HalfAnnulus(0, 0.5, 1.0): volume -> (pi/2)(1 - 0.25) within 0.05.
        let g = build_grid(GridSpec { n: 1, h: 0.01, half_widths: vec![1.5], height: 1.05 }).unwrap();
        let r = region_weights(
            &g,
            RegionKind::HalfAnnulus { center: [0.0, 0.0], r_inner: 0.5, r_outer: 1.0 },
        )
        .unwrap();
        let vol = r.volume_estimate(&g);
        let exact = std::f64::consts::PI / 2.0 * 0.75;
        assert!((vol - exact).abs() <= 0.05, "volume = {vol} vs {exact}");
    }

    #[test]
    fn annulus_plus_inner_ball_partitions_outer_ball() {
        let g = build_grid(spec_1d(1.0 / 32.0)).unwrap();
        let c = [0.125, 0.0];
        let inner = region_weights(&g, RegionKind::HalfBall { center: c, radius: 0.3 }).unwrap();
        let outer = region_weights(&g, RegionKind::HalfBall { center: c, radius: 0.7 }).unwrap();
        let ann = region_weights(
            &g,
            RegionKind::HalfAnnulus { center: c, r_inner: 0.3, r_outer: 0.7 },
        )
        .unwrap();
        let mut union: Vec<usize> = inner.nodes().iter().chain(ann.nodes()).copied().collect();
        union.sort_unstable();
        assert_eq!(union, outer.nodes());
    }

    #[test]
    fn region_out_of_domain_names_extent() {
        let g = build_grid(spec_1d(0.1)).unwrap();
        let err = region_weights(&g, RegionKind::HalfBall { center: [0.5, 0.0], radius: 0.8 })
            .unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("extent"), "unexpected message: {msg}");
        let err = region_weights(&g, RegionKind::HalfBall { center: [0.0, 0.0], radius: 1.0 });
        assert!(err.is_ok(), "radius 1.0 at the center is admissible");
        let err = region_weights(&g, RegionKind::HalfBall { center: [0.0, 0.0], radius: 1.01 });
        assert!(err.is_err());
    }

    #[test]
    fn normal_derivative_exact_for_linear_fields() {
        let g = build_grid(spec_1d(0.125)).unwrap();
        // u = a + b*x + c*y: the one-sided stencil is exact on quadratics,
        // so -du/dy must come out as exactly -c up to roundoff.
        let (a, b, c) = (0.3, -0.7, 1.9);
        let u: Vec<f64> = (0..g.node_count())
            .map(|id| {
                let p = g.position(id);
                a + b * p[0] + c * p[2]
            })
            .collect();
        for v in boundary_normal_derivative(&g, &u) {
            assert!((v + c).abs() < 1e-12, "got {v}, want {}", -c);
        }
    }

    #[test]
    fn normal_derivative_second_order_on_angle_field() {
        // Convergence of the stencil on the smooth field
        // u = (2/pi) atan(x / (y + eps)) with the closed-form face derivative
        // -du/dy(x, 0) = (2/pi) x / (x^2 + eps^2).
        let eps = 0.25;
        let mut errs = Vec::new();
        for k in [32usize, 64, 128] {
            let g = build_grid(spec_1d(1.0 / k as f64)).unwrap();
            let u: Vec<f64> = (0..g.node_count())
                .map(|id| {
                    let p = g.position(id);
                    (2.0 / std::f64::consts::PI) * (p[0] / (p[2] + eps)).atan()
                })
                .collect();
            let nd = boundary_normal_derivative(&g, &u);
            let mut worst: f64 = 0.0;
            for (slot, &id) in g.face_ids().iter().enumerate() {
                let x = g.position(id)[0];
                let exact = (2.0 / std::f64::consts::PI) * x / (x * x + eps * eps);
                worst = worst.max((nd[slot] - exact).abs());
            }
            errs.push(worst);
        }
        let order1 = (errs[0] / errs[1]).log2();
        let order2 = (errs[1] / errs[2]).log2();
        println!("normal-derivative errors: {errs:?}, orders {order1:.2}, {order2:.2}");
        assert!(order2 > 1.8, "order {order2} too low");
    }

    #[test]
    fn n2_grid_classification() {
        let g = build_grid(GridSpec { n: 2, h: 0.25, half_widths: vec![1.0, 1.0], height: 1.0 })
            .unwrap();
        assert_eq!(g.dims(), [9, 9, 5]);
        // Face nodes: strictly interior lateral indices at iv = 0: 7 x 7.
        let n_face = g.face_ids().len();
        assert_eq!(n_face, 49);
        let p = g.position(g.node_id(0, 0, 0));
        assert_eq!(p, [-1.0, -1.0, 0.0]);
    }

    #[test]
    fn partition_is_exhaustive() {
        for h in [0.5, 0.25, 0.2] {
            let g = build_grid(spec_1d(h)).unwrap();
            let dims = g.dims();
            let mut counts = [0usize; 3];
            for id in 0..g.node_count() {
                match g.class(id) {
                    NodeClass::Interior => counts[0] += 1,
                    NodeClass::ReactionFace => counts[1] += 1,
                    NodeClass::DirichletBoundary => counts[2] += 1,
                }
            }
            assert_eq!(counts.iter().sum::<usize>(), g.node_count());
            assert_eq!(counts[1], dims[0] - 2);
            assert_eq!(counts[0], (dims[0] - 2) * (dims[2] - 2));
        }
    }
}
