//! Dislocation resistance of the incomplete ball-and-socket joint, the
//! self-locking threshold, and range-of-motion relations for the contact arc.
//!
//! The dislocation model tracks the contact edge as the humeral head rides
//! out of the socket under an axial load. The supporting tendon stretches,
//! and the axial force balanced by tendon tension and socket support is
//! obtained in closed form, which stays well conditioned as the contact
//! angle approaches zero.

use crate::model::{RomEnvelope, ShoulderGeometry};
use crate::solver::{self, Bracket};
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilityError {
    #[error("contact angle {theta_c} rad exceeds the contact arc {theta_h} rad")]
    Domain { theta_c: f64, theta_h: f64 },
    #[error("contact angle {theta_c} rad reaches a quarter turn; the axial balance is singular")]
    SingularConfiguration { theta_c: f64 },
    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    AngleOutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("{name} must be strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("negative range of motion: full arc {full_arc} rad cannot absorb contact angle {contact} rad")]
    NegativeRom { full_arc: f64, contact: f64 },
    #[error("human span is zero for {motion}")]
    ZeroHumanSpan { motion: &'static str },
    #[error(transparent)]
    Solver(#[from] solver::SolverError),
}

/// Classification outcome of a stability criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityStatus {
    Stable,
    Marginal,
    Unstable,
}

/// Which criterion produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityCriterion {
    SelfLock,
    CouplingCondition,
    DislocationPeak,
}

/// Classification plus the scalar margin that produced it. The margin unit
/// is degrees for the angular criteria and newtons for the force criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityReport {
    pub status: StabilityStatus,
    pub margin: f64,
    pub criterion: StabilityCriterion,
    pub tolerance: f64,
}

impl StabilityReport {
    /// Stable iff margin > tolerance, unstable iff margin < −tolerance,
    /// marginal inside the band.
    pub fn classify(margin: f64, tolerance: f64, criterion: StabilityCriterion) -> Self {
        let status = if margin.abs() <= tolerance {
            StabilityStatus::Marginal
        } else if margin > tolerance {
            StabilityStatus::Stable
        } else {
            StabilityStatus::Unstable
        };
        Self {
            status,
            margin,
            criterion,
            tolerance,
        }
    }
}

/// Full force state of the dislocating joint at one contact angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DislocationState {
    /// Contact-edge angle (rad).
    pub theta_c: f64,
    /// Sideways displacement of the tendon end as the head rides out (m).
    pub tendon_offset: f64,
    /// In-line component of the displaced tendon (m).
    pub tendon_base: f64,
    /// Stretched tendon length (m).
    pub tendon_length: f64,
    /// Tendon inclination from the load axis (rad).
    pub theta_a: f64,
    /// Tendon tension (N).
    pub tendon_force: f64,
    /// Socket support force (N).
    pub socket_force: f64,
    /// Axial external force balanced by the two (N).
    pub external_force: f64,
}

fn check_contact_pair(theta_c: f64, theta_h: f64) -> Result<(), StabilityError> {
    if theta_c < 0.0 || !theta_c.is_finite() {
        return Err(StabilityError::AngleOutOfRange {
            name: "theta_c",
            value: theta_c,
            lo: 0.0,
            hi: FRAC_PI_2,
        });
    }
    if !(0.0..FRAC_PI_2).contains(&theta_h) {
        return Err(StabilityError::AngleOutOfRange {
            name: "theta_h",
            value: theta_h,
            lo: 0.0,
            hi: FRAC_PI_2,
        });
    }
    if theta_c > theta_h {
        return Err(StabilityError::Domain { theta_c, theta_h });
    }
    Ok(())
}

/// Geometry of the stretched tendon span at contact angle `theta_c` for a
/// socket arc `theta_h`: returns `(offset, base, stretched_length, incline)`.
///
/// At onset (`theta_c == theta_h`) everything collapses to the rest state
/// `(0, rest_length, rest_length, 0)` exactly.
pub fn dislocation_geometry(
    theta_c: f64,
    theta_h: f64,
    head_radius: f64,
    rest_length: f64,
) -> Result<(f64, f64, f64, f64), StabilityError> {
    check_contact_pair(theta_c, theta_h)?;
    if head_radius <= 0.0 {
        return Err(StabilityError::NonPositive {
            name: "head_radius",
            value: head_radius,
        });
    }
    if rest_length <= 0.0 {
        return Err(StabilityError::NonPositive {
            name: "rest_length",
            value: rest_length,
        });
    }
    let offset = head_radius * (theta_h.sin() - theta_c.sin());
    let base = rest_length + head_radius * (theta_c.cos() - theta_h.cos());
    let stretched = (base * base + offset * offset).sqrt();
    let incline = offset.atan2(base);
    Ok((offset, base, stretched, incline))
}

/// Force state at one contact angle: tendon tension from the stretch, the
/// socket support reconstructed from the transverse balance, and the axial
/// force both of them carry.
pub fn dislocation_state(
    theta_c: f64,
    theta_h: f64,
    g: &ShoulderGeometry,
) -> Result<DislocationState, StabilityError> {
    if theta_c >= FRAC_PI_2 {
        return Err(StabilityError::SingularConfiguration { theta_c });
    }
    let (offset, base, stretched, incline) =
        dislocation_geometry(theta_c, theta_h, g.head_radius, g.tendon_rest_length)?;
    let tension = g.tendon_stiffness * (stretched - g.tendon_rest_length);
    let (sin_a, cos_a) = (offset / stretched, base / stretched);
    // Closed-form elimination of the support force from the two balance
    // lines; the transverse line then gives the support itself.
    let external = tension * (sin_a + cos_a * theta_c.tan());
    let socket = tension * cos_a / theta_c.cos();
    Ok(DislocationState {
        theta_c,
        tendon_offset: offset,
        tendon_base: base,
        tendon_length: stretched,
        theta_a: incline,
        tendon_force: tension,
        socket_force: socket,
        external_force: external,
    })
}

/// Axial force the joint resists at contact angle `theta_c` (N).
pub fn dislocation_force(
    theta_c: f64,
    theta_h: f64,
    g: &ShoulderGeometry,
) -> Result<f64, StabilityError> {
    Ok(dislocation_state(theta_c, theta_h, g)?.external_force)
}

/// Peak axial force over the dislocation path and the contact angle where it
/// occurs. Grid sweep with golden-section refinement; deterministic for a
/// fixed grid.
pub fn max_dislocation_force(
    theta_h: f64,
    g: &ShoulderGeometry,
    grid_points: usize,
) -> Result<(f64, f64), StabilityError> {
    if !theta_h.is_finite() || theta_h <= 0.0 || theta_h >= FRAC_PI_2 {
        return Err(StabilityError::AngleOutOfRange {
            name: "theta_h",
            value: theta_h,
            lo: 0.0,
            hi: FRAC_PI_2,
        });
    }
    let bracket = Bracket::new(0.0, theta_h).map_err(StabilityError::Solver)?;
    // The closure domain is exactly the precondition domain, so errors can
    // only be numeric and surface as a non-finite objective.
    let result = solver::maximize(
        |tc| dislocation_force(tc, theta_h, g).unwrap_or(f64::NAN),
        bracket,
        grid_points,
        solver::DEFAULT_TOL,
        solver::DEFAULT_MAX_ITER,
    )?;
    Ok((result.fx, result.x))
}

/// Self-locking check: the wrap keeps pressing the head into the socket
/// while the upper contact edge stays below the head centre, which holds for
/// `scapula_angle + socket_half_arc < 90°`. Margin in degrees.
pub fn self_lock_status(
    scapula_angle: f64,
    socket_half_arc: f64,
    tol_deg: f64,
) -> Result<StabilityReport, StabilityError> {
    if !(0.0..=std::f64::consts::PI).contains(&scapula_angle) {
        return Err(StabilityError::AngleOutOfRange {
            name: "scapula_angle",
            value: scapula_angle,
            lo: 0.0,
            hi: std::f64::consts::PI,
        });
    }
    if !(0.0..FRAC_PI_2).contains(&socket_half_arc) {
        return Err(StabilityError::AngleOutOfRange {
            name: "socket_half_arc",
            value: socket_half_arc,
            lo: 0.0,
            hi: FRAC_PI_2,
        });
    }
    let margin = 90.0 - crate::model::to_deg(scapula_angle + socket_half_arc);
    Ok(StabilityReport::classify(
        margin,
        tol_deg,
        StabilityCriterion::SelfLock,
    ))
}

/// Range of motion left once the socket contact arc eats into the full
/// articular arcs: rotation loses twice the contact angle, abduction once.
/// Returns `(rotation_rom, abduction_rom)`.
pub fn rom_from_contact(
    full_rotation_arc: f64,
    rotation_contact: f64,
    full_abduction_arc: f64,
    abduction_contact: f64,
) -> Result<(f64, f64), StabilityError> {
    if full_rotation_arc < 2.0 * rotation_contact {
        return Err(StabilityError::NegativeRom {
            full_arc: full_rotation_arc,
            contact: rotation_contact,
        });
    }
    if full_abduction_arc < abduction_contact {
        return Err(StabilityError::NegativeRom {
            full_arc: full_abduction_arc,
            contact: abduction_contact,
        });
    }
    Ok((
        full_rotation_arc - 2.0 * rotation_contact,
        full_abduction_arc - abduction_contact,
    ))
}

/// Robot-to-human span ratio per motion group, percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RomCoverage {
    pub flexion_extension_pct: f64,
    pub abduction_adduction_pct: f64,
    pub rotation_pct: f64,
}

pub fn rom_coverage(envelope: &RomEnvelope) -> Result<RomCoverage, StabilityError> {
    let pct = |robot: f64, human: f64, motion: &'static str| -> Result<f64, StabilityError> {
        if human == 0.0 {
            return Err(StabilityError::ZeroHumanSpan { motion });
        }
        Ok(100.0 * robot / human)
    };
    Ok(RomCoverage {
        flexion_extension_pct: pct(
            envelope.robot.flexion_extension.span(),
            envelope.human.flexion_extension.span(),
            "flexion/extension",
        )?,
        abduction_adduction_pct: pct(
            envelope.robot.abduction_adduction.span(),
            envelope.human.abduction_adduction.span(),
            "abduction/adduction",
        )?,
        rotation_pct: pct(
            envelope.robot.rotation.span(),
            envelope.human.rotation.span(),
            "rotation",
        )?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;
    use crate::model::{deg_to_rad, MotionRange, RomRanges};
    use proptest::prelude::*;

    fn reference() -> ShoulderGeometry {
        RunConfig::reference().setup().unwrap().geometry
    }

    /// Geometry used by the worked numeric cases: smaller head, explicit
    /// values independent of the bundled reference configuration.
    fn worked_case_geometry() -> ShoulderGeometry {
        let mut g = reference();
        g.head_radius = 0.025;
        g.tendon_rest_length = 0.05;
        g
    }

    #[test]
    fn onset_collapses_to_rest_state() {
        let th = deg_to_rad(30.0).unwrap();
        let (offset, base, stretched, incline) = dislocation_geometry(th, th, 0.025, 0.05).unwrap();
        assert_eq!(offset, 0.0);
        assert_eq!(base, 0.05);
        assert_eq!(stretched, 0.05);
        assert_eq!(incline, 0.0);
    }

    #[test]
    fn worked_geometry_at_zero_contact() {
        // Frozen from an independent high-precision evaluation of the
        // stretched-span construction.
        let th = deg_to_rad(30.0).unwrap();
        let (offset, base, stretched, incline) =
            dislocation_geometry(0.0, th, 0.025, 0.05).unwrap();
        assert!((offset - 0.0125).abs() < 1e-15);
        assert!((base - 0.053_349_364_905_389_04).abs() < 1e-15);
        assert!((stretched - 0.054_794_203_487_306_535).abs() < 1e-15);
        assert!((incline - 0.230_152_823_542_658_79).abs() < 1e-14);
    }

    #[test]
    fn worked_geometry_at_fifteen_degrees() {
        let th = deg_to_rad(30.0).unwrap();
        let tc = deg_to_rad(15.0).unwrap();
        let (offset, ..) = dislocation_geometry(tc, th, 0.025, 0.05).unwrap();
        assert!((offset - 0.006_029_523_872_436_980_5).abs() < 1e-15);
    }

    #[test]
    fn contact_angle_beyond_arc_is_domain_error() {
        let th = deg_to_rad(30.0).unwrap();
        let tc = deg_to_rad(31.0).unwrap();
        assert!(matches!(
            dislocation_geometry(tc, th, 0.025, 0.05),
            Err(StabilityError::Domain { .. })
        ));
    }

    #[test]
    fn force_is_zero_at_onset() {
        let g = reference();
        let th = deg_to_rad(30.0).unwrap();
        assert_eq!(dislocation_force(th, th, &g).unwrap(), 0.0);
    }

    #[test]
    fn force_at_zero_contact_has_no_tangent_term() {
        let g = worked_case_geometry();
        let th = deg_to_rad(30.0).unwrap();
        let state = dislocation_state(0.0, th, &g).unwrap();
        let expected = state.tendon_force * state.theta_a.sin();
        assert!((state.external_force - expected).abs() <= 1e-12 * expected.abs());
    }

    #[test]
    fn reference_peak_hits_four_hundred_newtons() {
        let g = reference();
        let th = deg_to_rad(30.0).unwrap();
        let (fe_max, tc_star) = max_dislocation_force(th, &g, 1001).unwrap();
        assert!((fe_max - 400.0).abs() <= 1.0, "got {fe_max}");
        assert!(tc_star > 0.0 && tc_star < th);
    }

    #[test]
    fn peak_agrees_with_dense_sweep() {
        let g = reference();
        for th_deg in [20.0, 35.0, 50.0] {
            let th = deg_to_rad(th_deg).unwrap();
            let (fe_max, _) = max_dislocation_force(th, &g, 1001).unwrap();
            let mut dense = f64::NEG_INFINITY;
            let n = 100_000usize;
            for i in 0..=n {
                let tc = th * (i as f64 / n as f64);
                dense = dense.max(dislocation_force(tc, th, &g).unwrap());
            }
            assert!(
                (fe_max - dense).abs() <= 1e-6 * dense,
                "theta_h={th_deg}: refined {fe_max} vs dense {dense}"
            );
        }
    }

    #[test]
    fn peak_is_monotone_in_contact_arc() {
        let g = reference();
        let mut last = 0.0;
        for d in 1..=60 {
            let th = deg_to_rad(f64::from(d)).unwrap();
            let (fe_max, _) = max_dislocation_force(th, &g, 1001).unwrap();
            assert!(
                fe_max >= last,
                "peak fell from {last} to {fe_max} at {d} deg"
            );
            last = fe_max;
        }
    }

    #[test]
    fn peak_vanishes_with_the_arc() {
        let g = reference();
        let (fe_max, _) = max_dislocation_force(deg_to_rad(0.1).unwrap(), &g, 1001).unwrap();
        assert!(fe_max < 0.05, "got {fe_max}");
    }

    #[test]
    fn quarter_turn_arc_is_rejected() {
        let g = reference();
        assert!(matches!(
            max_dislocation_force(FRAC_PI_2, &g, 1001),
            Err(StabilityError::AngleOutOfRange { .. })
        ));
    }

    proptest! {
        #[test]
        fn force_balance_reconstructs(
            th_deg in 1.0f64..85.0,
            frac in 0.0f64..1.0,
            radius in 0.005f64..0.08,
            rest in 0.02f64..0.2,
            stiffness in 1.0f64..1e6,
        ) {
            prop_assume!(th_deg < 89.0);
            let mut g = reference();
            g.head_radius = radius;
            g.tendon_rest_length = rest;
            g.tendon_stiffness = stiffness;
            let th = deg_to_rad(th_deg.min(89.0)).unwrap();
            let tc = th * frac;
            let s = dislocation_state(tc, th, &g).unwrap();
            // Both balance lines hold to 1e-10 relative.
            let line1 = s.tendon_force * s.theta_a.sin() + s.socket_force * tc.sin();
            let line2a = s.tendon_force * s.theta_a.cos();
            let line2b = s.socket_force * tc.cos();
            let scale1 = s.external_force.abs().max(1e-30);
            let scale2 = line2a.abs().max(1e-30);
            prop_assert!((line1 - s.external_force).abs() / scale1 <= 1e-10);
            prop_assert!((line2a - line2b).abs() / scale2 <= 1e-10);
            prop_assert!(s.tendon_force >= 0.0 && s.socket_force >= 0.0 && s.external_force >= 0.0);
            // Stretch relation holds.
            let lhs = s.tendon_length * s.tendon_length;
            let rhs = s.tendon_base * s.tendon_base + s.tendon_offset * s.tendon_offset;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs);
        }

        #[test]
        fn onset_force_is_exactly_zero(
            th_deg in 0.5f64..89.0,
            radius in 0.005f64..0.08,
            rest in 0.02f64..0.2,
            stiffness in 1.0f64..1e6,
        ) {
            let mut g = reference();
            g.head_radius = radius;
            g.tendon_rest_length = rest;
            g.tendon_stiffness = stiffness;
            let th = deg_to_rad(th_deg).unwrap();
            prop_assert_eq!(dislocation_force(th, th, &g).unwrap(), 0.0);
        }
    }

    #[test]
    fn self_lock_fixture_sequence() {
        let tol = 1.0;
        let cases = [
            (30.0, StabilityStatus::Stable, 60.0),
            (120.0, StabilityStatus::Unstable, -30.0),
            (90.0, StabilityStatus::Marginal, 0.0),
        ];
        for (deg, status, margin) in cases {
            let report = self_lock_status(deg_to_rad(deg).unwrap(), 0.0, tol).unwrap();
            assert_eq!(report.status, status, "at {deg} deg");
            assert!((report.margin - margin).abs() < 1e-9);
            assert_eq!(report.criterion, StabilityCriterion::SelfLock);
        }
    }

    #[test]
    fn self_lock_does_not_flap_inside_stable_region() {
        // Anywhere the margin stays above tolerance, stepping the input by
        // half tolerances keeps the classification Stable.
        let tol = 1.0;
        let half_tol = deg_to_rad(0.5).unwrap();
        for k in 0..70 {
            let angle = half_tol * f64::from(k);
            let report = self_lock_status(angle, 0.0, tol).unwrap();
            if report.margin > tol {
                assert_eq!(report.status, StabilityStatus::Stable, "at step {k}");
            }
        }
    }

    #[test]
    fn rom_from_contact_cases() {
        // Zero contact keeps the full arcs.
        let (rot, abd) = rom_from_contact(2.0, 0.0, 1.5, 0.0).unwrap();
        assert_eq!((rot, abd), (2.0, 1.5));

        // 180° full arc with 25° contact leaves 130° of rotation.
        let full = deg_to_rad(180.0).unwrap();
        let contact = deg_to_rad(25.0).unwrap();
        let (rot, _) = rom_from_contact(full, contact, full, contact).unwrap();
        assert!((crate::model::to_deg(rot) - 130.0).abs() < 1e-12);

        // Increasing the contact angle by 10° costs rotation exactly 20°.
        let c2 = deg_to_rad(35.0).unwrap();
        let (rot2, _) = rom_from_contact(full, c2, full, c2).unwrap();
        assert!((crate::model::to_deg(rot - rot2) - 20.0).abs() < 1e-12);

        assert!(matches!(
            rom_from_contact(0.1, 0.2, 1.0, 0.0),
            Err(StabilityError::NegativeRom { .. })
        ));
    }

    #[test]
    fn rom_from_contact_is_exactly_linear() {
        let full = deg_to_rad(170.0).unwrap();
        let a = deg_to_rad(5.0).unwrap();
        let b = deg_to_rad(41.0).unwrap();
        let mid = 0.5 * (a + b);
        let (ra, _) = rom_from_contact(full, a, full, a).unwrap();
        let (rb, _) = rom_from_contact(full, b, full, b).unwrap();
        let (rm, _) = rom_from_contact(full, mid, full, mid).unwrap();
        assert!((0.5 * (ra + rb) - rm).abs() <= 1e-15);
    }

    #[test]
    fn rom_coverage_reference_matches_reported_percentages() {
        let envelope = RunConfig::reference().setup().unwrap().envelope;
        let cov = rom_coverage(&envelope).unwrap();
        assert!((cov.flexion_extension_pct - 46.26).abs() < 0.5);
        assert!((cov.abduction_adduction_pct - 105.43).abs() < 0.5);
        assert!((cov.rotation_pct - 99.23).abs() < 0.5);
    }

    #[test]
    fn rom_coverage_identity_and_zero_span() {
        let ranges = RomRanges {
            flexion_extension: MotionRange {
                min: -1.0,
                max: 1.0,
            },
            abduction_adduction: MotionRange {
                min: -0.5,
                max: 1.5,
            },
            rotation: MotionRange {
                min: -1.5,
                max: 0.5,
            },
        };
        let cov = rom_coverage(&RomEnvelope {
            robot: ranges,
            human: ranges,
        })
        .unwrap();
        assert_eq!(cov.flexion_extension_pct, 100.0);
        assert_eq!(cov.abduction_adduction_pct, 100.0);
        assert_eq!(cov.rotation_pct, 100.0);

        let mut degenerate = ranges;
        degenerate.rotation = MotionRange { min: 0.3, max: 0.3 };
        let err = rom_coverage(&RomEnvelope {
            robot: ranges,
            human: degenerate,
        })
        .unwrap_err();
        assert!(matches!(err, StabilityError::ZeroHumanSpan { .. }));
    }
}
