//! Double-well reaction potentials.
//!
//! Two wells at `t = +-1` drive the phase separation on the reaction face:
//!
//! * `QuarticDoubleWell`: `W(t) = (1 - t^2)^2 / 4`, the production choice;
//! * `PeierlsNabarro`: `W(t) = (1 + cos(pi t)) / pi^2`, kept because the
//!   associated layer problem has the closed-form angle solution used as the
//!   convergence oracle throughout the test suite.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    QuarticDoubleWell,
    PeierlsNabarro,
}

/// `W(t)`; nonnegative, zero exactly at the wells `t = +-1`.
pub fn potential_value(kind: PotentialKind, t: f64) -> f64 {
    match kind {
        PotentialKind::QuarticDoubleWell => {
            let s = 1.0 - t * t;
            0.25 * s * s
        }
        PotentialKind::PeierlsNabarro => (1.0 + (PI * t).cos()) / (PI * PI),
    }
}

/// `W'(t)`.
pub fn potential_derivative(kind: PotentialKind, t: f64) -> f64 {
    match kind {
        PotentialKind::QuarticDoubleWell => t * t * t - t,
        PotentialKind::PeierlsNabarro => -(PI * t).sin() / PI,
    }
}

/// `W''(t)`; the face Newton iteration needs the curvature.
pub fn potential_second_derivative(kind: PotentialKind, t: f64) -> f64 {
    match kind {
        PotentialKind::QuarticDoubleWell => 3.0 * t * t - 1.0,
        PotentialKind::PeierlsNabarro => -(PI * t).cos(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn quartic_values() {
        assert_relative_eq!(potential_value(PotentialKind::QuarticDoubleWell, 0.0), 0.25);
        assert_eq!(potential_value(PotentialKind::QuarticDoubleWell, 1.0), 0.0);
        assert_eq!(potential_value(PotentialKind::QuarticDoubleWell, -1.0), 0.0);
        assert_relative_eq!(
            potential_derivative(PotentialKind::QuarticDoubleWell, 0.5),
            -0.375
        );
    }

    #[test]
    fn peierls_nabarro_values() {
        assert_relative_eq!(
            potential_value(PotentialKind::PeierlsNabarro, 0.0),
            2.0 / (PI * PI)
        );
        assert_relative_eq!(
            potential_derivative(PotentialKind::PeierlsNabarro, 0.5),
            -1.0 / PI
        );
        assert!(potential_value(PotentialKind::PeierlsNabarro, 1.0).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        // W' and W'' cross-checked against centered differences of W.
        let d = 1e-5;
        for kind in [PotentialKind::QuarticDoubleWell, PotentialKind::PeierlsNabarro] {
            for i in -20..=20 {
                let t = i as f64 * 0.1;
                let fd = (potential_value(kind, t + d) - potential_value(kind, t - d)) / (2.0 * d);
                assert!(
                    (fd - potential_derivative(kind, t)).abs() < 1e-8,
                    "{kind:?} W' mismatch at t = {t}"
                );
                let fd2 = (potential_derivative(kind, t + d)
                    - potential_derivative(kind, t - d))
                    / (2.0 * d);
                assert!(
                    (fd2 - potential_second_derivative(kind, t)).abs() < 1e-7,
                    "{kind:?} W'' mismatch at t = {t}"
                );
            }
        }
    }

    #[test]
    fn nonnegative_on_sample_range() {
        for kind in [PotentialKind::QuarticDoubleWell, PotentialKind::PeierlsNabarro] {
            for i in -30..=30 {
                let t = i as f64 * 0.05;
                assert!(potential_value(kind, t) >= 0.0);
            }
        }
    }
}
