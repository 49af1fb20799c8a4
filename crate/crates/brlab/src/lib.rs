//! brlab: a finite-difference laboratory for boundary-reaction problems.
//!
//! The object of study is a scalar field on a half-slab that is harmonic in
//! the interior and balances its normal flux against a stiff double-well
//! reaction on the bottom face:
//!
//! ```text
//!   laplace(u) = 0                 in  (-L,L)^n x (0,H),
//!   du/dnu = -W'(u) / epsilon      on  the bottom face,
//!   u = g                          on  the lateral and top faces,
//! ```
//!
//! with `W` a double well with wells at +-1 and `epsilon` the reaction
//! scale.  As `epsilon` shrinks, the energy of two-phase solutions
//! concentrates near the face interface; the crate provides the solver plus
//! the measuring instruments for that process:
//!
//! * [`geometry`] — half-slab grids, node classification, cell-center
//!   quadrature regions, one-sided face stencils;
//! * [`potential`] — the quartic double well and the Peierls-Nabarro well
//!   whose layer problem has a closed-form solution (the test oracle);
//! * [`solver`] — red-black SOR with per-face-node Newton steps;
//! * [`energy`] — energy breakdowns, localised energy measures, scaled
//!   energy `I(r, x)` with its monotonicity identity, inner variations;
//! * [`concentration`] — epsilon-families, density profiles, concentration
//!   sets, clearing-out calibration, defect measures, limit fields;
//! * [`varifold`] — stress-tensor samples, discrete generalized varifolds,
//!   first variations and the `V = V_* + V_Sigma` decomposition;
//! * [`testfield`] — smooth compactly-supported vector fields with analytic
//!   Jacobians for all variational identities;
//! * [`config`] / [`runner`] — JSON scenario configs and the deterministic
//!   reporting pipeline behind the `brlab` binary.
//!
//! Every runnable capability has a worked example under `examples/`; the
//! test suite carries an `acceptance` target that checks the quantitative
//! contracts end to end.

pub mod concentration;
pub mod config;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod potential;
pub mod runner;
pub mod solver;
pub mod testfield;
pub mod varifold;

pub use error::{Error, Result};
pub use geometry::{build_grid, Grid, GridSpec, NodeClass, Region, RegionKind};
pub use potential::PotentialKind;
pub use solver::{solve, BoundaryProfile, SolveParams, Solution};
