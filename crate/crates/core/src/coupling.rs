//! Two-joint tendon coupling: the shoulder and elbow angles linked by an
//! inextensible tendon spanning both joints, the potential-energy
//! equilibrium of the loaded arm, and the geometric stability condition.

use crate::model::ShoulderGeometry;
use crate::solver::{self, Bracket};
use crate::stability::{StabilityCriterion, StabilityReport};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CouplingError {
    #[error("elbow moment arm must be strictly positive, got {value}")]
    ZeroElbowRadius { value: f64 },
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error(transparent)]
    Solver(#[from] solver::SolverError),
}

/// Inputs of the coupling analysis, pulled out of [`ShoulderGeometry`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConfig {
    pub coupling_head_radius: f64,
    pub elbow_moment_arm: f64,
    pub upper_arm_length: f64,
    pub forearm_length: f64,
    pub scapula_angle: f64,
    pub socket_half_arc: f64,
}

impl From<&ShoulderGeometry> for CouplingConfig {
    fn from(g: &ShoulderGeometry) -> Self {
        Self {
            coupling_head_radius: g.coupling_head_radius,
            elbow_moment_arm: g.elbow_moment_arm,
            upper_arm_length: g.upper_arm_length,
            forearm_length: g.forearm_length,
            scapula_angle: g.scapula_angle,
            socket_half_arc: g.socket_half_arc,
        }
    }
}

/// Equilibrium pose of the coupled two-joint system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumResult {
    /// Humerus angle from the horizontal (rad).
    pub theta_e: f64,
    /// Forearm angle relative to the humerus (rad).
    pub theta_f: f64,
    /// Potential height of the load point (m).
    pub height: f64,
    /// The minimum sits on the bracket boundary (arm hanging at a stop).
    pub at_boundary: bool,
    pub iterations: usize,
    pub stability: StabilityReport,
}

/// Elbow angle enforced by the shared tendon for a given shoulder angle:
/// the wound arc on the humeral head must pay out over the elbow pulley.
pub fn coupled_elbow_angle(
    scapula_angle: f64,
    theta_e: f64,
    coupling_head_radius: f64,
    elbow_moment_arm: f64,
) -> Result<f64, CouplingError> {
    if elbow_moment_arm <= 0.0 || !elbow_moment_arm.is_finite() {
        return Err(CouplingError::ZeroElbowRadius {
            value: elbow_moment_arm,
        });
    }
    Ok((scapula_angle + theta_e) * coupling_head_radius / elbow_moment_arm)
}

/// Potential height of the load point at shoulder angle `theta_e`, with the
/// elbow following the tendon constraint.
pub fn potential_height(theta_e: f64, cfg: &CouplingConfig) -> Result<f64, CouplingError> {
    let theta_f = coupled_elbow_angle(
        cfg.scapula_angle,
        theta_e,
        cfg.coupling_head_radius,
        cfg.elbow_moment_arm,
    )?;
    Ok(cfg.upper_arm_length * theta_e.sin() + cfg.forearm_length * (theta_f - theta_e).sin())
}

/// Geometric coupling-stability condition: the socket can only push back
/// while the load line stays short of flat, i.e.
/// `scapula_angle − socket_half_arc + theta_e < 180°`. Margin in degrees.
pub fn coupling_stability(
    scapula_angle: f64,
    socket_half_arc: f64,
    theta_e: f64,
    tol_deg: f64,
) -> StabilityReport {
    let margin = 180.0 - crate::model::to_deg(scapula_angle - socket_half_arc + theta_e);
    StabilityReport::classify(margin, tol_deg, StabilityCriterion::CouplingCondition)
}

/// Finds the pose of lowest potential height over `bracket` and attaches the
/// coupling-stability report evaluated there.
///
/// A minimum on the bracket boundary is a legitimate physical outcome (the
/// arm rests against a stop); it is reported through `at_boundary` rather
/// than as an error.
pub fn equilibrium_pose(
    cfg: &CouplingConfig,
    bracket: Bracket,
    tol: f64,
    marginal_tol_deg: f64,
    grid_points: usize,
) -> Result<EquilibriumResult, CouplingError> {
    // Surface a config error eagerly rather than from inside the solver.
    potential_height(bracket.lo, cfg)?;
    let result = solver::minimize(
        |te| potential_height(te, cfg).unwrap_or(f64::NAN),
        bracket,
        grid_points,
        tol,
        solver::DEFAULT_MAX_ITER,
    )?;
    let theta_f = coupled_elbow_angle(
        cfg.scapula_angle,
        result.x,
        cfg.coupling_head_radius,
        cfg.elbow_moment_arm,
    )?;
    Ok(EquilibriumResult {
        theta_e: result.x,
        theta_f,
        height: result.fx,
        at_boundary: result.at_boundary,
        iterations: result.iterations,
        stability: coupling_stability(
            cfg.scapula_angle,
            cfg.socket_half_arc,
            result.x,
            marginal_tol_deg,
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;
    use crate::model::{deg_to_rad, to_deg};
    use crate::stability::StabilityStatus;
    use proptest::prelude::*;

    fn reference_config() -> CouplingConfig {
        CouplingConfig::from(&RunConfig::reference().setup().unwrap().geometry)
    }

    #[test]
    fn unit_ratio_sums_the_angles() {
        let d = deg_to_rad(15.0).unwrap();
        let e = deg_to_rad(25.0).unwrap();
        let f = coupled_elbow_angle(d, e, 0.04, 0.04).unwrap();
        assert!((f - (d + e)).abs() < 1e-15);
    }

    #[test]
    fn worked_elbow_angle() {
        let f = coupled_elbow_angle(
            deg_to_rad(20.0).unwrap(),
            deg_to_rad(40.0).unwrap(),
            0.025,
            0.05,
        )
        .unwrap();
        assert!((to_deg(f) - 30.0).abs() < 1e-12);
    }

    #[test]
    fn zero_pose_gives_zero_elbow() {
        assert_eq!(coupled_elbow_angle(0.0, 0.0, 0.025, 0.05).unwrap(), 0.0);
        assert!(matches!(
            coupled_elbow_angle(0.0, 0.0, 0.025, 0.0),
            Err(CouplingError::ZeroElbowRadius { .. })
        ));
    }

    proptest! {
        #[test]
        fn elbow_angle_is_linear_and_scale_invariant(
            d in 0.0f64..2.0,
            e in -1.5f64..1.5,
            r1 in 0.005f64..0.1,
            r2 in 0.005f64..0.1,
            k in 0.1f64..10.0,
        ) {
            let f1 = coupled_elbow_angle(d, e, r1, r2).unwrap();
            // Linear in (d + e): doubling the sum doubles the output.
            let f2 = coupled_elbow_angle(2.0 * d, 2.0 * e, r1, r2).unwrap();
            prop_assert!((f2 - 2.0 * f1).abs() <= 1e-12 * f1.abs().max(1.0));
            // Scaling both radii by k leaves the result unchanged.
            let f3 = coupled_elbow_angle(d, e, k * r1, k * r2).unwrap();
            prop_assert!((f3 - f1).abs() <= 1e-12 * f1.abs().max(1.0));
        }
    }

    #[test]
    fn height_zero_cases() {
        let mut cfg = reference_config();
        cfg.scapula_angle = 0.0;
        assert_eq!(potential_height(0.0, &cfg).unwrap(), 0.0);

        // Equal radii with a level scapula: the forearm term vanishes.
        cfg.coupling_head_radius = 0.03;
        cfg.elbow_moment_arm = 0.03;
        let te = deg_to_rad(33.0).unwrap();
        let h = potential_height(te, &cfg).unwrap();
        assert!((h - cfg.upper_arm_length * te.sin()).abs() < 1e-15);
    }

    #[test]
    fn worked_height() {
        // Frozen from an independent high-precision evaluation.
        let cfg = CouplingConfig {
            coupling_head_radius: 0.025,
            elbow_moment_arm: 0.05,
            upper_arm_length: 0.30,
            forearm_length: 0.25,
            scapula_angle: deg_to_rad(20.0).unwrap(),
            socket_half_arc: deg_to_rad(30.0).unwrap(),
        };
        let h = potential_height(deg_to_rad(40.0).unwrap(), &cfg).unwrap();
        assert!((h - 0.149_424_238_489_229_2).abs() < 1e-14);
    }

    fn default_bracket() -> Bracket {
        Bracket::new(deg_to_rad(-90.0).unwrap(), deg_to_rad(90.0).unwrap()).unwrap()
    }

    #[test]
    fn reference_equilibrium_is_interior_and_stationary() {
        let cfg = reference_config();
        let eq = equilibrium_pose(&cfg, default_bracket(), 1e-9, 1.0, 1001).unwrap();
        assert!(!eq.at_boundary);
        // First-order condition: the central difference of the height
        // vanishes at the interior solution.
        let h = 1e-6;
        let d = (potential_height(eq.theta_e + h, &cfg).unwrap()
            - potential_height(eq.theta_e - h, &cfg).unwrap())
            / (2.0 * h);
        assert!(d.abs() <= 1e-4 * cfg.upper_arm_length, "dH/dtheta = {d}");
        assert_eq!(eq.stability.status, StabilityStatus::Stable);
    }

    #[test]
    fn monotone_objective_reports_boundary() {
        let mut cfg = reference_config();
        cfg.scapula_angle = 0.0;
        cfg.coupling_head_radius = 0.03;
        cfg.elbow_moment_arm = 0.03;
        cfg.forearm_length = 1e-9;
        let eq = equilibrium_pose(&cfg, default_bracket(), 1e-9, 1.0, 1001).unwrap();
        assert!(eq.at_boundary);
        assert!((to_deg(eq.theta_e) + 90.0).abs() < 1e-6);
    }

    #[test]
    fn equilibrium_is_deterministic() {
        let cfg = reference_config();
        let a = equilibrium_pose(&cfg, default_bracket(), 1e-9, 1.0, 1001).unwrap();
        let b = equilibrium_pose(&cfg, default_bracket(), 1e-9, 1.0, 1001).unwrap();
        assert_eq!(a.theta_e.to_bits(), b.theta_e.to_bits());
        assert_eq!(a.height.to_bits(), b.height.to_bits());
    }

    /// Tiny deterministic generator for randomized configs; keeps the
    /// brute-force comparison reproducible without a seed dependency.
    struct Lcg(u64);
    impl Lcg {
        fn next_unit(&mut self) -> f64 {
            self.0 = self
                .0
                .wrapping_mul(6_364_136_223_846_793_005)
                .wrapping_add(1_442_695_040_888_963_407);
            (self.0 >> 11) as f64 / (1u64 << 53) as f64
        }
        fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
            lo + (hi - lo) * self.next_unit()
        }
    }

    #[test]
    fn equilibrium_matches_dense_grid_on_random_configs() {
        let mut rng = Lcg(0x9E37_79B9_7F4A_7C15);
        let bracket = default_bracket();
        let tol = 1e-9;
        for case in 0..100 {
            let cfg = CouplingConfig {
                coupling_head_radius: rng.in_range(0.01, 0.06),
                elbow_moment_arm: rng.in_range(0.02, 0.08),
                upper_arm_length: rng.in_range(0.2, 0.4),
                forearm_length: rng.in_range(0.15, 0.35),
                scapula_angle: rng.in_range(0.0, 1.0),
                socket_half_arc: rng.in_range(0.2, 1.0),
            };
            let eq = equilibrium_pose(&cfg, bracket, tol, 1.0, 1001).unwrap();
            let n = 100_000usize;
            let mut best = (f64::INFINITY, f64::NAN);
            for i in 0..=n {
                let x = bracket.lo + bracket.width() * (i as f64 / n as f64);
                let v = potential_height(x, &cfg).unwrap();
                if v < best.0 {
                    best = (v, x);
                }
            }
            let step = bracket.width() / n as f64;
            assert!(
                (eq.theta_e - best.1).abs() <= step.max(tol) + 1e-9,
                "case {case}: solver {} vs grid {}",
                eq.theta_e,
                best.1
            );
        }
    }

    #[test]
    fn coupling_condition_fixtures() {
        let tol = 1.0;
        // Failure case: angles summing past the flat line.
        let r = coupling_stability(
            deg_to_rad(165.0).unwrap(),
            deg_to_rad(30.0).unwrap(),
            deg_to_rad(60.0).unwrap(),
            tol,
        );
        assert_eq!(r.status, StabilityStatus::Unstable);
        assert!((r.margin + 15.0).abs() < 1e-9);

        let r = coupling_stability(
            deg_to_rad(165.0).unwrap(),
            deg_to_rad(30.0).unwrap(),
            deg_to_rad(77.0).unwrap(),
            tol,
        );
        assert_eq!(r.status, StabilityStatus::Unstable);
        assert!((r.margin + 32.0).abs() < 1e-9);

        let r = coupling_stability(0.0, 0.0, 0.0, tol);
        assert_eq!(r.status, StabilityStatus::Stable);
        assert!((r.margin - 180.0).abs() < 1e-12);

        // The six sub-threshold bench settings all classify stable.
        for d in [0.0, 30.0, 56.0, 71.0, 90.0, 120.0] {
            let r = coupling_stability(
                deg_to_rad(d).unwrap(),
                deg_to_rad(30.0).unwrap(),
                deg_to_rad(60.0).unwrap(),
                tol,
            );
            assert_eq!(r.status, StabilityStatus::Stable, "at {d} deg");
        }
    }

    proptest! {
        #[test]
        fn coupling_margin_is_affine(
            d in 0.0f64..3.0,
            s in 0.0f64..1.5,
            e in -1.5f64..3.0,
            delta in -0.5f64..0.5,
        ) {
            let base = coupling_stability(d, s, e, 1.0).margin;
            let shifted = coupling_stability(d + delta, s, e, 1.0).margin;
            let expected = base - to_deg(delta);
            prop_assert!((shifted - expected).abs() <= 1e-9);
        }
    }
}
