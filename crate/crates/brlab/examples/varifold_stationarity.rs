//! Discrete generalized varifolds: each interior cell contributes its
//! Dirichlet density paired with the stress tensor `I - 2 nu nu^T` built from
//! the gradient direction.  First variations against tangential bumps decay
//! linearly in epsilon, and adding back the face-potential term closes the
//! identity up to discretisation error.
//!
//! Run with `cargo run --example varifold_stationarity`.

use brlab::solver::{solve, two_phase_data, BoundaryProfile, SolveParams};
use brlab::testfield::bump_battery;
use brlab::varifold::{a_membership, build_varifold, pair, stationarity_residual};
use brlab::{build_grid, GridSpec, PotentialKind};
use std::sync::Arc;

fn main() {
    let h = 1.0 / 128.0;
    let grid = Arc::new(
        build_grid(GridSpec { n: 1, h, half_widths: vec![1.0], height: 1.0 })
            .expect("valid grid"),
    );
    let dirichlet = two_phase_data(&grid, BoundaryProfile::Step);

    // Bumps straddling and avoiding the interface at the origin.
    let battery = bump_battery(&grid, &[[0.0, 0.0], [0.45, 0.0]], &[0.1, 0.2])
        .expect("admissible battery");
    println!("battery of {} normalised tangential bumps", battery.len());
    println!(
        "{:>8} {:>12} {:>14} {:>14} {:>12}",
        "epsilon", "mass", "raw max", "companion max", "pair(V, 1)"
    );

    for epsilon in [0.2, 0.1, 0.05] {
        let sol = solve(
            &grid,
            epsilon,
            PotentialKind::QuarticDoubleWell,
            &dirichlet,
            None,
            &SolveParams::default(),
        )
        .expect("solver setup");
        assert!(sol.converged);

        let v = build_varifold(&sol);
        let r = stationarity_residual(&sol, &v, &battery).expect("normalised battery");
        println!(
            "{:>8.3} {:>12.6} {:>14.4e} {:>14.4e} {:>12.6}",
            epsilon,
            v.mass(),
            r.raw_max,
            r.companion_max,
            pair(&v, |_| 1.0)
        );

        if epsilon == 0.05 {
            let trace_target = (grid.n() - 1) as f64;
            let ok = v.samples.iter().all(|s| {
                (s.tensor.trace() - trace_target).abs() <= 1e-12
                    && a_membership(&s.tensor, trace_target).unwrap_or(false)
            });
            println!(
                "  tensor audit at epsilon = 0.05: {} samples, trace = n - 1 and",
                v.samples.len()
            );
            println!("  A_V membership everywhere: {ok}");
        }
    }

    println!();
    println!("raw max falls ~linearly with epsilon; the companion stays at the");
    println!("discretisation floor (see the acceptance tests for the rates).");
}
