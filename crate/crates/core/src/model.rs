//! Shared domain types and unit conventions.
//!
//! Everything downstream computes in SI: angles in radians, lengths in
//! metres, forces in newtons. Degrees exist only at the file and CLI
//! boundaries, converted through [`deg_to_rad`] / [`rad_to_deg`].

use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

/// Threshold below which a triangle built from two anchors is considered
/// degenerate (collinear anchors).
pub const DEGENERATE_TRIANGLE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("{name} = {value_deg}° lies outside [{min_deg}°, {max_deg}°]")]
    OutsideEnvelope {
        name: &'static str,
        value_deg: f64,
        min_deg: f64,
        max_deg: f64,
    },
}

/// Exact multiplication by π/180.
pub fn deg_to_rad(deg: f64) -> Result<f64, ModelError> {
    if !deg.is_finite() {
        return Err(ModelError::NonFinite {
            name: "angle_deg",
            value: deg,
        });
    }
    Ok(deg * (PI / 180.0))
}

/// Inverse of [`deg_to_rad`].
pub fn rad_to_deg(rad: f64) -> Result<f64, ModelError> {
    if !rad.is_finite() {
        return Err(ModelError::NonFinite {
            name: "angle_rad",
            value: rad,
        });
    }
    Ok(rad * (180.0 / PI))
}

/// Unchecked conversion for values already known finite.
#[inline]
pub(crate) fn to_deg(rad: f64) -> f64 {
    rad * (180.0 / PI)
}

/// The three glenohumeral angles, radians.
///
/// `flexion` is positive for flexion and negative for extension,
/// `abduction` positive for abduction, `rotation` positive for external
/// rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointPose {
    pub flexion: f64,
    pub abduction: f64,
    pub rotation: f64,
}

impl JointPose {
    /// Builds a pose from finite angles. Raw construction accepts any finite
    /// value; envelope membership is a separate, opt-in check.
    pub fn new(flexion: f64, abduction: f64, rotation: f64) -> Result<Self, ModelError> {
        for (name, value) in [
            ("flexion", flexion),
            ("abduction", abduction),
            ("rotation", rotation),
        ] {
            if !value.is_finite() {
                return Err(ModelError::NonFinite { name, value });
            }
        }
        Ok(Self {
            flexion,
            abduction,
            rotation,
        })
    }

    /// Checks that every angle lies within the given motion ranges.
    pub fn validate_in(&self, ranges: &RomRanges) -> Result<(), ModelError> {
        for (name, value, range) in [
            ("flexion", self.flexion, &ranges.flexion_extension),
            ("abduction", self.abduction, &ranges.abduction_adduction),
            ("rotation", self.rotation, &ranges.rotation),
        ] {
            if value < range.min || value > range.max {
                return Err(ModelError::OutsideEnvelope {
                    name,
                    value_deg: to_deg(value),
                    min_deg: to_deg(range.min),
                    max_deg: to_deg(range.max),
                });
            }
        }
        Ok(())
    }
}

/// Closed angular interval, radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionRange {
    pub min: f64,
    pub max: f64,
}

impl MotionRange {
    pub fn span(&self) -> f64 {
        self.max - self.min
    }
}

/// Motion limits for one arm (three motion groups).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RomRanges {
    pub flexion_extension: MotionRange,
    pub abduction_adduction: MotionRange,
    pub rotation: MotionRange,
}

/// Paired robot and human motion limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RomEnvelope {
    pub robot: RomRanges,
    pub human: RomRanges,
}

impl RomEnvelope {
    /// Every motion group must satisfy min < max on both arms.
    pub fn validate(&self) -> Result<(), Vec<GeometryViolation>> {
        let mut violations = Vec::new();
        for (name, range) in [
            ("robot flexion/extension", self.robot.flexion_extension),
            ("robot abduction/adduction", self.robot.abduction_adduction),
            ("robot rotation", self.robot.rotation),
            ("human flexion/extension", self.human.flexion_extension),
            ("human abduction/adduction", self.human.abduction_adduction),
            ("human rotation", self.human.rotation),
        ] {
            if !(range.min.is_finite() && range.max.is_finite()) {
                violations.push(GeometryViolation::NonFinite {
                    name,
                    value: if range.min.is_finite() {
                        range.max
                    } else {
                        range.min
                    },
                });
            } else if range.min >= range.max {
                violations.push(GeometryViolation::EmptyRange {
                    name,
                    min_deg: to_deg(range.min),
                    max_deg: to_deg(range.max),
                });
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }
}

/// Tendon tension magnitudes by muscle, newtons.
///
/// `deltoid` drives flexion (anterior head) and extension (posterior head),
/// `rotator_pair` stands for the subscapularis/infraspinatus pair driving
/// internal/external rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuscleForces {
    pub deltoid: f64,
    pub supraspinatus: f64,
    pub biceps_long_head: f64,
    pub deltoid_middle: f64,
    pub triceps_long_head: f64,
    pub rotator_pair: f64,
}

impl MuscleForces {
    /// Tendons cannot push: every tension must be finite and nonnegative.
    pub fn validate(&self) -> Result<(), Vec<GeometryViolation>> {
        let mut violations = Vec::new();
        for (name, value) in [
            ("deltoid force", self.deltoid),
            ("supraspinatus force", self.supraspinatus),
            ("biceps long head force", self.biceps_long_head),
            ("deltoid middle force", self.deltoid_middle),
            ("triceps long head force", self.triceps_long_head),
            ("rotator pair force", self.rotator_pair),
        ] {
            if !value.is_finite() {
                violations.push(GeometryViolation::NonFinite { name, value });
            } else if value < 0.0 {
                violations.push(GeometryViolation::NegativeForce { name, value });
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }
}

/// Every length, radius and reference angle used by the force and torque
/// maps. Lengths in metres, angles in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct ShoulderGeometry {
    /// Humeral head radius in the dislocation model.
    pub head_radius: f64,
    /// Rest length of the supporting tendon span in the dislocation model.
    pub tendon_rest_length: f64,
    /// Tendon stiffness, N/m.
    pub tendon_stiffness: f64,
    /// Humeral head moment radius seen by the two-joint tendon.
    pub coupling_head_radius: f64,
    /// Elbow moment arm of the two-joint tendon.
    pub elbow_moment_arm: f64,
    /// Shoulder-to-elbow distance.
    pub upper_arm_length: f64,
    /// Elbow-to-load distance on the forearm.
    pub forearm_length: f64,
    /// Scapula inclination from the horizontal.
    pub scapula_angle: f64,
    /// Half-arc subtended by the socket contact surface.
    pub socket_half_arc: f64,
    /// Anterior deltoid insertion on the clavicle, joint-centred frame.
    pub deltoid_anterior_anchor: [f64; 3],
    /// Posterior deltoid insertion on the scapular spine.
    pub deltoid_posterior_anchor: [f64; 3],
    /// Distance from the joint centre to the deltoid origin on the humerus.
    pub deltoid_origin_distance: f64,
    /// Joint centre to the bend notch of the abduction tendons.
    pub abduction_notch_offset: f64,
    /// Joint centre to the abduction tendon insertion.
    pub abduction_insertion_radius: f64,
    /// Joint centre to the triceps insertion on the scapula.
    pub triceps_insertion_distance: f64,
    /// Adduction moment-arm angle at the rest pose.
    pub adduction_rest_angle: f64,
    /// Joint centre to the rotation-drive motor anchor.
    pub rotation_motor_distance: f64,
    /// Sectional projection of the rotation tendon insertion.
    pub rotation_insertion_projection: f64,
    /// Humeral head radius in the rotation model.
    pub rotation_head_radius: f64,
    /// Rest angle between the rotation insertion and its sectional projection.
    pub rotation_insertion_offset: f64,
}

impl ShoulderGeometry {
    /// Length of the anterior deltoid anchor vector.
    pub fn anterior_anchor_length(&self) -> f64 {
        norm3(&self.deltoid_anterior_anchor)
    }

    /// Length of the posterior deltoid anchor vector.
    pub fn posterior_anchor_length(&self) -> f64 {
        norm3(&self.deltoid_posterior_anchor)
    }
}

#[inline]
pub(crate) fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeometryViolation {
    #[error("{name} must be strictly positive, got {value}")]
    NonPositiveLength { name: &'static str, value: f64 },
    #[error("tendon stiffness must be nonnegative, got {value}")]
    NegativeStiffness { value: f64 },
    #[error(
        "rotation insertion projection {projection} m lies outside the head radius {radius} m"
    )]
    InsertionOutsideHead { projection: f64, radius: f64 },
    #[error("{name} = {value_deg}° is outside [{min_deg}°, {max_deg}°)")]
    AngleOutOfRange {
        name: &'static str,
        value_deg: f64,
        min_deg: f64,
        max_deg: f64,
    },
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("{name} must be a nonempty range, got [{min_deg}°, {max_deg}°]")]
    EmptyRange {
        name: &'static str,
        min_deg: f64,
        max_deg: f64,
    },
    #[error("{name} must be nonnegative, got {value}")]
    NegativeForce { name: &'static str, value: f64 },
}

/// Checks every geometry invariant and reports the complete list of
/// violations rather than stopping at the first.
pub fn validate_geometry(g: &ShoulderGeometry) -> Result<(), Vec<GeometryViolation>> {
    let mut violations = Vec::new();

    let finite_checks = [
        ("head radius", g.head_radius),
        ("tendon rest length", g.tendon_rest_length),
        ("tendon stiffness", g.tendon_stiffness),
        ("coupling head radius", g.coupling_head_radius),
        ("elbow moment arm", g.elbow_moment_arm),
        ("upper arm length", g.upper_arm_length),
        ("forearm length", g.forearm_length),
        ("scapula angle", g.scapula_angle),
        ("socket half arc", g.socket_half_arc),
        ("deltoid origin distance", g.deltoid_origin_distance),
        ("abduction notch offset", g.abduction_notch_offset),
        ("abduction insertion radius", g.abduction_insertion_radius),
        ("triceps insertion distance", g.triceps_insertion_distance),
        ("adduction rest angle", g.adduction_rest_angle),
        ("rotation motor distance", g.rotation_motor_distance),
        (
            "rotation insertion projection",
            g.rotation_insertion_projection,
        ),
        ("rotation head radius", g.rotation_head_radius),
        ("rotation insertion offset", g.rotation_insertion_offset),
        ("anterior deltoid anchor x", g.deltoid_anterior_anchor[0]),
        ("anterior deltoid anchor y", g.deltoid_anterior_anchor[1]),
        ("anterior deltoid anchor z", g.deltoid_anterior_anchor[2]),
        ("posterior deltoid anchor x", g.deltoid_posterior_anchor[0]),
        ("posterior deltoid anchor y", g.deltoid_posterior_anchor[1]),
        ("posterior deltoid anchor z", g.deltoid_posterior_anchor[2]),
    ];
    let mut all_finite = true;
    for (name, value) in finite_checks {
        if !value.is_finite() {
            violations.push(GeometryViolation::NonFinite { name, value });
            all_finite = false;
        }
    }
    if !all_finite {
        return Err(violations);
    }

    for (name, value) in [
        ("head radius", g.head_radius),
        ("tendon rest length", g.tendon_rest_length),
        ("coupling head radius", g.coupling_head_radius),
        ("elbow moment arm", g.elbow_moment_arm),
        ("upper arm length", g.upper_arm_length),
        ("forearm length", g.forearm_length),
        ("deltoid origin distance", g.deltoid_origin_distance),
        ("abduction notch offset", g.abduction_notch_offset),
        ("abduction insertion radius", g.abduction_insertion_radius),
        ("triceps insertion distance", g.triceps_insertion_distance),
        ("rotation motor distance", g.rotation_motor_distance),
        (
            "rotation insertion projection",
            g.rotation_insertion_projection,
        ),
        ("rotation head radius", g.rotation_head_radius),
        ("anterior deltoid anchor length", g.anterior_anchor_length()),
        (
            "posterior deltoid anchor length",
            g.posterior_anchor_length(),
        ),
    ] {
        if value <= 0.0 {
            violations.push(GeometryViolation::NonPositiveLength { name, value });
        }
    }

    if g.tendon_stiffness < 0.0 {
        violations.push(GeometryViolation::NegativeStiffness {
            value: g.tendon_stiffness,
        });
    }
    if g.rotation_insertion_projection > g.rotation_head_radius {
        violations.push(GeometryViolation::InsertionOutsideHead {
            projection: g.rotation_insertion_projection,
            radius: g.rotation_head_radius,
        });
    }
    if g.socket_half_arc <= 0.0 || g.socket_half_arc >= PI {
        violations.push(GeometryViolation::AngleOutOfRange {
            name: "socket half arc",
            value_deg: to_deg(g.socket_half_arc),
            min_deg: 0.0,
            max_deg: 180.0,
        });
    }
    if g.rotation_insertion_offset < 0.0 || g.rotation_insertion_offset >= PI / 2.0 {
        violations.push(GeometryViolation::AngleOutOfRange {
            name: "rotation insertion offset",
            value_deg: to_deg(g.rotation_insertion_offset),
            min_deg: 0.0,
            max_deg: 90.0,
        });
    }
    if g.scapula_angle < 0.0 || g.scapula_angle > PI {
        violations.push(GeometryViolation::AngleOutOfRange {
            name: "scapula angle",
            value_deg: to_deg(g.scapula_angle),
            min_deg: 0.0,
            max_deg: 180.0,
        });
    }

    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}
