//! Torque–angle maps for the four motion groups, plus a finite-difference
//! virtual-work oracle for cross-checking the closed-form moment arms.
//!
//! Flexion and extension share one construction: the deltoid tendon runs
//! from an anchor on the shoulder girdle to an origin point on the humerus,
//! and the torque is the tension times the offset of the joint centre from
//! that chord. Abduction and adduction are planar lever models. Rotation
//! follows the tendon wrapping over the humeral head: the contact circle
//! shrinks as the arm abducts and the insertion rides up, and the moment
//! arm is the projection of that circle's radius onto the rotation plane.

use crate::model::{norm3, MuscleForces, ShoulderGeometry, DEGENERATE_TRIANGLE};
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

/// Slack accepted on the direction cosine before a pose is rejected as
/// geometrically inconsistent; covers rounding at collinear poses.
const COS_DOMAIN_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TorqueError {
    #[error("anchor and humerus direction are collinear: chord length {chord} m is degenerate")]
    DegenerateTriangle { chord: f64 },
    #[error("{name} = {value_deg}° is outside [{min_deg}°, {max_deg}°]")]
    PoseOutOfEnvelope {
        name: &'static str,
        value_deg: f64,
        min_deg: f64,
        max_deg: f64,
    },
    #[error(
        "moment arm would be imaginary: contact offset {offset} m exceeds head radius {radius} m"
    )]
    Domain { offset: f64, radius: f64 },
    #[error("direction cosine {value} falls outside [-1, 1]; attachment geometry is inconsistent at this pose")]
    CosineOutOfRange { value: f64 },
    #[error("tendon length is not finite near theta = {theta}")]
    NonFinite { theta: f64 },
    #[error("finite-difference step {h} is outside [1e-7, 1e-3]")]
    StepOutOfRange { h: f64 },
    #[error("{motion} takes a single angle grid")]
    UnexpectedSecondAxis { motion: &'static str },
    #[error("grid must not be empty")]
    EmptyGrid,
    #[error("cell ({row}, {col}) at ({axis1_deg}°, {axis2_deg}°): {source}")]
    Cell {
        row: usize,
        col: usize,
        axis1_deg: f64,
        axis2_deg: f64,
        #[source]
        source: Box<TorqueError>,
    },
}

/// Which variant of the flexion/extension moment arm to use.
///
/// `Verbatim` keeps the half-distance arm (chord divisor `2·l`), `Corrected`
/// uses the full perpendicular point-to-line distance. The two differ by an
/// exact factor of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArmMode {
    Verbatim,
    Corrected,
}

/// Motion groups of the glenohumeral joint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Motion {
    Flexion,
    Extension,
    Abduction,
    Adduction,
    Rotation,
}

impl Motion {
    pub fn name(self) -> &'static str {
        match self {
            Motion::Flexion => "flexion",
            Motion::Extension => "extension",
            Motion::Abduction => "abduction",
            Motion::Adduction => "adduction",
            Motion::Rotation => "rotation",
        }
    }
}

/// Unit-hint direction of the humerus origin point after abducting and then
/// flexing from the hanging rest pose.
fn humerus_point(length: f64, flexion: f64, abduction: f64) -> [f64; 3] {
    let (s31, c31) = flexion.sin_cos();
    let (s32, c32) = abduction.sin_cos();
    [-length * s32 * c31, length * s31, -length * c32]
}

/// Moment arm of the deltoid chord for a given anchor, in metres.
pub fn deltoid_moment_arm(
    anchor: &[f64; 3],
    origin_distance: f64,
    flexion: f64,
    abduction: f64,
    mode: ArmMode,
) -> Result<f64, TorqueError> {
    let anchor_len = norm3(anchor);
    let tip = humerus_point(origin_distance, flexion, abduction);
    let cos_raw = (anchor[0] * tip[0] + anchor[1] * tip[1] + anchor[2] * tip[2])
        / (anchor_len * origin_distance);
    if !cos_raw.is_finite() || cos_raw.abs() > 1.0 + COS_DOMAIN_SLACK {
        return Err(TorqueError::CosineOutOfRange { value: cos_raw });
    }
    let cos_m = cos_raw.clamp(-1.0, 1.0);
    let sin_m = (1.0 - cos_m * cos_m).max(0.0).sqrt();
    let chord = (anchor_len * anchor_len + origin_distance * origin_distance
        - 2.0 * anchor_len * origin_distance * cos_m)
        .sqrt();
    if chord <= DEGENERATE_TRIANGLE {
        return Err(TorqueError::DegenerateTriangle { chord });
    }
    let divisor = match mode {
        ArmMode::Verbatim => 2.0 * chord,
        ArmMode::Corrected => chord,
    };
    Ok(anchor_len * origin_distance * sin_m / divisor)
}

/// Flexion torque from the anterior deltoid (N·m).
pub fn flexion_torque(
    flexion: f64,
    abduction: f64,
    deltoid_force: f64,
    g: &ShoulderGeometry,
    mode: ArmMode,
) -> Result<f64, TorqueError> {
    let arm = deltoid_moment_arm(
        &g.deltoid_anterior_anchor,
        g.deltoid_origin_distance,
        flexion,
        abduction,
        mode,
    )?;
    Ok(deltoid_force * arm)
}

/// Extension torque from the posterior deltoid; identical construction with
/// the posterior anchor.
pub fn extension_torque(
    flexion: f64,
    abduction: f64,
    deltoid_force: f64,
    g: &ShoulderGeometry,
    mode: ArmMode,
) -> Result<f64, TorqueError> {
    let arm = deltoid_moment_arm(
        &g.deltoid_posterior_anchor,
        g.deltoid_origin_distance,
        flexion,
        abduction,
        mode,
    )?;
    Ok(deltoid_force * arm)
}

/// Abduction torque split by contributor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbductionTorque {
    /// Supraspinatus plus biceps long head, bending at the notch (N·m).
    pub supraspinatus_biceps: f64,
    /// Deltoid middle head (N·m).
    pub deltoid_middle: f64,
    pub total: f64,
}

const ABDUCTION_ROTATION_LIMIT_DEG: f64 = 60.0;

/// Abduction torque at humeral rotation `rotation`. The paired tendons bend
/// at the notch; the deltoid-middle contact point lags the rotation by half.
pub fn abduction_torque(
    rotation: f64,
    supraspinatus: f64,
    biceps: f64,
    deltoid_middle: f64,
    g: &ShoulderGeometry,
) -> Result<AbductionTorque, TorqueError> {
    let limit = ABDUCTION_ROTATION_LIMIT_DEG.to_radians();
    if !rotation.is_finite() || rotation.abs() > limit * (1.0 + 1e-12) {
        return Err(TorqueError::PoseOutOfEnvelope {
            name: "rotation",
            value_deg: crate::model::to_deg(rotation),
            min_deg: -ABDUCTION_ROTATION_LIMIT_DEG,
            max_deg: ABDUCTION_ROTATION_LIMIT_DEG,
        });
    }
    let (s33, c33) = rotation.sin_cos();
    let along = g.abduction_notch_offset + g.abduction_insertion_radius * c33;
    let cos_bend = along / along.hypot(g.abduction_insertion_radius * s33);
    let pair = (supraspinatus + biceps) * g.abduction_insertion_radius * cos_bend;
    let middle = deltoid_middle * g.abduction_insertion_radius * (0.5 * rotation).cos();
    Ok(AbductionTorque {
        supraspinatus_biceps: pair,
        deltoid_middle: middle,
        total: pair + middle,
    })
}

/// Adduction torque from the triceps long head at abduction `abduction`.
pub fn adduction_torque(abduction: f64, triceps: f64, g: &ShoulderGeometry) -> f64 {
    triceps * g.triceps_insertion_distance * (g.adduction_rest_angle - abduction).cos()
}

/// Rotation moment arm at pose `(abduction, rotation)`, metres.
///
/// The insertion projection shrinks with rotation, the contact circle
/// shrinks as the arm abducts, and the arm is the circle radius projected
/// onto the plane normal to the humeral axis. Exactly `rotation_head_radius`
/// at zero abduction, exactly zero when the insertion projection reaches
/// the head radius at a quarter-turn abduction.
pub fn rotation_moment_arm(
    abduction: f64,
    rotation: f64,
    g: &ShoulderGeometry,
) -> Result<f64, TorqueError> {
    if !(0.0..=FRAC_PI_2).contains(&abduction) {
        return Err(TorqueError::PoseOutOfEnvelope {
            name: "abduction",
            value_deg: crate::model::to_deg(abduction),
            min_deg: 0.0,
            max_deg: 90.0,
        });
    }
    let swept = g.rotation_insertion_offset + rotation;
    if !swept.is_finite() || swept.abs() > FRAC_PI_2 {
        return Err(TorqueError::PoseOutOfEnvelope {
            name: "insertion sweep",
            value_deg: crate::model::to_deg(swept),
            min_deg: -90.0,
            max_deg: 90.0,
        });
    }
    let motor = g.rotation_motor_distance;
    let head = g.rotation_head_radius;
    // Projection of the rotated insertion onto the motor section plane.
    let projection =
        g.rotation_insertion_projection * swept.cos() / g.rotation_insertion_offset.cos();
    let (s32, c32) = abduction.sin_cos();

    let reach = (motor * motor + projection * projection + 2.0 * motor * projection * c32).sqrt();
    let turn = (motor * s32 / reach).clamp(-1.0, 1.0).asin();

    let circle_radius = if motor * projection * s32 == 0.0 {
        head
    } else {
        let span = motor + projection * c32;
        let cap = head * span;
        let off = motor * projection * s32;
        let squared = cap * cap - off * off;
        if squared < 0.0 {
            if squared < -(cap * cap) * 1e-12 {
                return Err(TorqueError::Domain {
                    offset: off / span,
                    radius: head,
                });
            }
            0.0
        } else {
            squared.sqrt() / span
        }
    };
    Ok(circle_radius * turn.cos())
}

/// Rotation torque from the subscapularis/infraspinatus pair (N·m).
pub fn rotation_torque(
    abduction: f64,
    rotation: f64,
    rotator_force: f64,
    g: &ShoulderGeometry,
) -> Result<f64, TorqueError> {
    Ok(rotator_force * rotation_moment_arm(abduction, rotation, g)?)
}

/// A rectangular grid of torque values over one or two pose angles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorqueSurface {
    pub motion: Motion,
    pub axis1_name: &'static str,
    /// First axis grid, radians.
    pub axis1: Vec<f64>,
    pub axis2_name: Option<&'static str>,
    /// Second axis grid, radians; absent for single-angle motions.
    pub axis2: Option<Vec<f64>>,
    /// Row-major values: `values[i * ncols + j]` for `axis1[i]`, `axis2[j]`.
    pub values: Vec<f64>,
    pub muscle: &'static str,
    pub force_used: f64,
}

impl TorqueSurface {
    pub fn ncols(&self) -> usize {
        self.axis2.as_ref().map_or(1, Vec::len)
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.ncols() + col]
    }

    /// Maximum value and its grid position; ties keep the first occurrence
    /// in row-major order.
    pub fn max(&self) -> (f64, usize, usize) {
        let ncols = self.ncols();
        let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
        for (k, &v) in self.values.iter().enumerate() {
            if v > best.0 {
                best = (v, k / ncols, k % ncols);
            }
        }
        best
    }
}

/// Evaluates the torque map for `motion` over the given grids, row-major.
/// Cell failures carry their grid coordinates.
pub fn torque_surface(
    motion: Motion,
    axis1: &[f64],
    axis2: Option<&[f64]>,
    forces: &MuscleForces,
    g: &ShoulderGeometry,
    mode: ArmMode,
) -> Result<TorqueSurface, TorqueError> {
    if axis1.is_empty() || axis2.is_some_and(|a| a.is_empty()) {
        return Err(TorqueError::EmptyGrid);
    }
    let single_axis = matches!(motion, Motion::Abduction | Motion::Adduction);
    if single_axis && axis2.is_some() {
        return Err(TorqueError::UnexpectedSecondAxis {
            motion: motion.name(),
        });
    }

    let (axis1_name, axis2_name, muscle, force_used): (_, Option<&'static str>, _, f64) =
        match motion {
            Motion::Flexion => (
                "theta31_deg",
                Some("theta32_deg"),
                "deltoid (anterior)",
                forces.deltoid,
            ),
            Motion::Extension => (
                "theta31_deg",
                Some("theta32_deg"),
                "deltoid (posterior)",
                forces.deltoid,
            ),
            Motion::Abduction => (
                "theta33_deg",
                None,
                "supraspinatus + biceps (long) + deltoid (middle)",
                forces.supraspinatus + forces.biceps_long_head + forces.deltoid_middle,
            ),
            Motion::Adduction => (
                "theta32_deg",
                None,
                "triceps (long)",
                forces.triceps_long_head,
            ),
            Motion::Rotation => (
                "theta32_deg",
                Some("theta33_deg"),
                "subscapularis / infraspinatus",
                forces.rotator_pair,
            ),
        };

    // Missing second axis for a two-angle motion pins that angle at zero.
    let second: Vec<f64> = match (single_axis, axis2) {
        (true, _) => vec![0.0],
        (false, Some(a)) => a.to_vec(),
        (false, None) => vec![0.0],
    };

    let mut values = Vec::with_capacity(axis1.len() * second.len());
    for (i, &a1) in axis1.iter().enumerate() {
        for (j, &a2) in second.iter().enumerate() {
            let cell = match motion {
                Motion::Flexion => flexion_torque(a1, a2, forces.deltoid, g, mode),
                Motion::Extension => extension_torque(a1, a2, forces.deltoid, g, mode),
                Motion::Abduction => abduction_torque(
                    a1,
                    forces.supraspinatus,
                    forces.biceps_long_head,
                    forces.deltoid_middle,
                    g,
                )
                .map(|t| t.total),
                Motion::Adduction => Ok(adduction_torque(a1, forces.triceps_long_head, g)),
                Motion::Rotation => rotation_torque(a1, a2, forces.rotator_pair, g),
            };
            match cell {
                Ok(v) => values.push(v),
                Err(e) => {
                    return Err(TorqueError::Cell {
                        row: i,
                        col: j,
                        axis1_deg: crate::model::to_deg(a1),
                        axis2_deg: crate::model::to_deg(a2),
                        source: Box::new(e),
                    })
                }
            }
        }
    }

    let keep_axis2 = !single_axis && axis2.is_some();
    Ok(TorqueSurface {
        motion,
        axis1_name,
        axis1: axis1.to_vec(),
        axis2_name: if keep_axis2 { axis2_name } else { None },
        axis2: if keep_axis2 { Some(second) } else { None },
        values,
        muscle,
        force_used,
    })
}

/// Magnitude of the central finite difference `|dL/dθ|` of a tendon-length
/// function — the virtual-work moment arm.
pub fn moment_arm_virtual_work<F: Fn(f64) -> f64>(
    tendon_length: F,
    theta: f64,
    h: f64,
) -> Result<f64, TorqueError> {
    if !(1e-7..=1e-3).contains(&h) {
        return Err(TorqueError::StepOutOfRange { h });
    }
    if !theta.is_finite() {
        return Err(TorqueError::NonFinite { theta });
    }
    let above = tendon_length(theta + h);
    let below = tendon_length(theta - h);
    if !(above.is_finite() && below.is_finite()) {
        return Err(TorqueError::NonFinite { theta });
    }
    let arm = ((above - below) / (2.0 * h)).abs();
    if !arm.is_finite() {
        return Err(TorqueError::NonFinite { theta });
    }
    Ok(arm)
}

/// Tendon-length function for the rotation drive at a fixed pose, suitable
/// for [`moment_arm_virtual_work`].
///
/// Models the free span from the motor anchor to the lateral contact point
/// on the humeral head, measured in the motor section plane. The contact
/// point is taken from the wrap construction at the reference pose and then
/// carried rigidly by the rotating humerus; the wrapped portion rides with
/// the head and contributes no length change.
pub fn rotation_tendon_span(
    g: &ShoulderGeometry,
    abduction: f64,
    rotation_ref: f64,
) -> Result<impl Fn(f64) -> f64, TorqueError> {
    if !(0.0..=FRAC_PI_2).contains(&abduction) {
        return Err(TorqueError::PoseOutOfEnvelope {
            name: "abduction",
            value_deg: crate::model::to_deg(abduction),
            min_deg: 0.0,
            max_deg: 90.0,
        });
    }
    let swept = g.rotation_insertion_offset + rotation_ref;
    if swept.abs() > FRAC_PI_2 {
        return Err(TorqueError::PoseOutOfEnvelope {
            name: "insertion sweep",
            value_deg: crate::model::to_deg(swept),
            min_deg: -90.0,
            max_deg: 90.0,
        });
    }
    let motor = g.rotation_motor_distance;
    let head = g.rotation_head_radius;
    let projection =
        g.rotation_insertion_projection * swept.cos() / g.rotation_insertion_offset.cos();
    let (s32, c32) = abduction.sin_cos();
    let climb = motor * projection * s32 / (motor + projection * c32);
    let circle_radius = (head * head - climb * climb).max(0.0).sqrt();

    // Contact point on the wrap circle, and the humeral axis.
    let contact = [0.0, -circle_radius, climb];
    let axis = [-s32, 0.0, c32];

    Ok(move |rotation: f64| {
        let angle = rotation - rotation_ref;
        let (sa, ca) = angle.sin_cos();
        let dot = axis[0] * contact[0] + axis[1] * contact[1] + axis[2] * contact[2];
        let cross = [
            axis[1] * contact[2] - axis[2] * contact[1],
            axis[2] * contact[0] - axis[0] * contact[2],
            axis[0] * contact[1] - axis[1] * contact[0],
        ];
        let rotated = [
            contact[0] * ca + cross[0] * sa + axis[0] * dot * (1.0 - ca),
            contact[1] * ca + cross[1] * sa + axis[1] * dot * (1.0 - ca),
            contact[2] * ca + cross[2] * sa + axis[2] * dot * (1.0 - ca),
        ];
        // Sectional projection: the span from the anchor at (-motor, 0, 0),
        // with the out-of-plane component dropped.
        let dx = -motor - rotated[0];
        let dz = -rotated[2];
        dx.hypot(dz)
    })
}
