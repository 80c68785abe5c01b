//! Run configuration: the JSON schema, validation, and conversion into the
//! internal SI model types.
//!
//! The file format keeps human units: angles in degrees, lengths in metres,
//! forces in newtons. Unknown keys are a hard error so a typo in a physics
//! parameter cannot silently fall back to a default.

use crate::coupling::CouplingConfig;
use crate::model::{
    deg_to_rad, validate_geometry, MotionRange, MuscleForces, RomEnvelope, RomRanges,
    ShoulderGeometry,
};
use crate::stability;
use crate::torque::{self, ArmMode, Motion};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

const REFERENCE_JSON: &str = include_str!("../config/reference.json");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config:\n{}", .0.join("\n"))]
    Invalid(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub head_radius_m: f64,
    pub tendon_rest_length_m: f64,
    pub tendon_stiffness_n_per_m: f64,
    pub coupling_head_radius_m: f64,
    pub elbow_moment_arm_m: f64,
    pub upper_arm_length_m: f64,
    pub forearm_length_m: f64,
    pub scapula_angle_deg: f64,
    pub socket_half_arc_deg: f64,
    pub deltoid_anterior_anchor_m: [f64; 3],
    pub deltoid_posterior_anchor_m: [f64; 3],
    pub deltoid_origin_distance_m: f64,
    pub abduction_notch_offset_m: f64,
    pub abduction_insertion_radius_m: f64,
    pub triceps_insertion_distance_m: f64,
    pub adduction_rest_angle_deg: f64,
    pub rotation_motor_distance_m: f64,
    pub rotation_insertion_projection_m: f64,
    pub rotation_head_radius_m: f64,
    pub rotation_insertion_offset_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcesConfig {
    pub deltoid: f64,
    pub supraspinatus: f64,
    pub biceps_long_head: f64,
    pub deltoid_middle: f64,
    pub triceps_long_head: f64,
    pub rotator_pair: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangesConfig {
    pub flexion_extension_deg: [f64; 2],
    pub abduction_adduction_deg: [f64; 2],
    pub rotation_deg: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RomEnvelopeConfig {
    pub robot: RangesConfig,
    pub human: RangesConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DislocationSweep {
    pub theta_h_deg: Vec<f64>,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorqueSweep {
    pub axis1_deg: [f64; 2],
    pub points1: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis2_deg: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points2: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RomContactSweep {
    pub theta0_deg: [f64; 2],
    pub points: usize,
    pub rotation_full_arc_deg: f64,
    pub abduction_full_arc_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquilibriumSweep {
    pub theta_e_deg: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepsConfig {
    pub dislocation: DislocationSweep,
    pub flexion: TorqueSweep,
    pub extension: TorqueSweep,
    pub abduction: TorqueSweep,
    pub adduction: TorqueSweep,
    pub rotation: TorqueSweep,
    pub rom_contact: RomContactSweep,
    pub equilibrium: EquilibriumSweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesConfig {
    pub marginal_band_deg: f64,
    pub marginal_band_n: f64,
    pub solver_tol: f64,
    pub solver_max_iter: usize,
    pub solver_grid_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    pub directory: String,
    pub formats: Vec<String>,
}

/// The whole run configuration as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub forces_n: ForcesConfig,
    pub rom_envelope: RomEnvelopeConfig,
    pub sweeps: SweepsConfig,
    pub tolerances: TolerancesConfig,
    pub outputs: OutputsConfig,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub provenance: BTreeMap<String, String>,
}

/// Validated, SI-converted view of a [`RunConfig`].
#[derive(Debug, Clone, PartialEq)]
pub struct Setup {
    pub geometry: ShoulderGeometry,
    pub forces: MuscleForces,
    pub envelope: RomEnvelope,
    pub tolerances: TolerancesConfig,
}

impl RunConfig {
    /// The bundled reference configuration with the calibrated values.
    pub fn reference() -> Self {
        serde_json::from_str(REFERENCE_JSON).expect("bundled reference config parses")
    }

    /// Raw bytes of the bundled reference configuration.
    pub fn reference_json() -> &'static str {
        REFERENCE_JSON
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_pretty(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("config serializes");
        text.push('\n');
        text
    }

    fn geometry_si(&self) -> Result<ShoulderGeometry, ConfigError> {
        let g = &self.geometry;
        let angle = |name: &str, deg: f64| -> Result<f64, ConfigError> {
            deg_to_rad(deg).map_err(|_| {
                ConfigError::Invalid(vec![format!("{name} must be finite, got {deg}")])
            })
        };
        Ok(ShoulderGeometry {
            head_radius: g.head_radius_m,
            tendon_rest_length: g.tendon_rest_length_m,
            tendon_stiffness: g.tendon_stiffness_n_per_m,
            coupling_head_radius: g.coupling_head_radius_m,
            elbow_moment_arm: g.elbow_moment_arm_m,
            upper_arm_length: g.upper_arm_length_m,
            forearm_length: g.forearm_length_m,
            scapula_angle: angle("scapula_angle_deg", g.scapula_angle_deg)?,
            socket_half_arc: angle("socket_half_arc_deg", g.socket_half_arc_deg)?,
            deltoid_anterior_anchor: g.deltoid_anterior_anchor_m,
            deltoid_posterior_anchor: g.deltoid_posterior_anchor_m,
            deltoid_origin_distance: g.deltoid_origin_distance_m,
            abduction_notch_offset: g.abduction_notch_offset_m,
            abduction_insertion_radius: g.abduction_insertion_radius_m,
            triceps_insertion_distance: g.triceps_insertion_distance_m,
            adduction_rest_angle: angle("adduction_rest_angle_deg", g.adduction_rest_angle_deg)?,
            rotation_motor_distance: g.rotation_motor_distance_m,
            rotation_insertion_projection: g.rotation_insertion_projection_m,
            rotation_head_radius: g.rotation_head_radius_m,
            rotation_insertion_offset: angle(
                "rotation_insertion_offset_deg",
                g.rotation_insertion_offset_deg,
            )?,
        })
    }

    fn ranges_si(ranges: &RangesConfig) -> Result<RomRanges, ConfigError> {
        let cvt = |pair: [f64; 2]| -> Result<MotionRange, ConfigError> {
            Ok(MotionRange {
                min: deg_to_rad(pair[0]).map_err(|e| ConfigError::Invalid(vec![e.to_string()]))?,
                max: deg_to_rad(pair[1]).map_err(|e| ConfigError::Invalid(vec![e.to_string()]))?,
            })
        };
        Ok(RomRanges {
            flexion_extension: cvt(ranges.flexion_extension_deg)?,
            abduction_adduction: cvt(ranges.abduction_adduction_deg)?,
            rotation: cvt(ranges.rotation_deg)?,
        })
    }

    /// Validates everything and returns the SI view: geometry invariants,
    /// nonnegative tensions, nonempty motion ranges, grid sizes, output
    /// paths, and a domain sweep proving every map stays finite across the
    /// configured envelope.
    pub fn setup(&self) -> Result<Setup, ConfigError> {
        let mut problems: Vec<String> = Vec::new();

        let geometry = self.geometry_si()?;
        if let Err(violations) = validate_geometry(&geometry) {
            problems.extend(violations.iter().map(ToString::to_string));
        }

        let forces = MuscleForces {
            deltoid: self.forces_n.deltoid,
            supraspinatus: self.forces_n.supraspinatus,
            biceps_long_head: self.forces_n.biceps_long_head,
            deltoid_middle: self.forces_n.deltoid_middle,
            triceps_long_head: self.forces_n.triceps_long_head,
            rotator_pair: self.forces_n.rotator_pair,
        };
        if let Err(violations) = forces.validate() {
            problems.extend(violations.iter().map(ToString::to_string));
        }

        let envelope = RomEnvelope {
            robot: Self::ranges_si(&self.rom_envelope.robot)?,
            human: Self::ranges_si(&self.rom_envelope.human)?,
        };
        if let Err(violations) = envelope.validate() {
            problems.extend(violations.iter().map(ToString::to_string));
        }

        for (name, points) in [
            ("sweeps.dislocation.points", self.sweeps.dislocation.points),
            ("sweeps.flexion.points1", self.sweeps.flexion.points1),
            ("sweeps.extension.points1", self.sweeps.extension.points1),
            ("sweeps.abduction.points1", self.sweeps.abduction.points1),
            ("sweeps.adduction.points1", self.sweeps.adduction.points1),
            ("sweeps.rotation.points1", self.sweeps.rotation.points1),
            ("sweeps.rom_contact.points", self.sweeps.rom_contact.points),
        ] {
            if points < 2 {
                problems.push(format!("{name} must be at least 2, got {points}"));
            }
        }
        for sweep in [
            &self.sweeps.flexion,
            &self.sweeps.extension,
            &self.sweeps.abduction,
            &self.sweeps.adduction,
            &self.sweeps.rotation,
        ] {
            if let Some(p2) = sweep.points2 {
                if p2 < 2 {
                    problems.push(format!("torque sweep points2 must be at least 2, got {p2}"));
                }
            }
        }
        if self.sweeps.dislocation.theta_h_deg.is_empty() {
            problems.push("sweeps.dislocation.theta_h_deg must not be empty".into());
        }
        for &th in &self.sweeps.dislocation.theta_h_deg {
            if !(th > 0.0 && th < 90.0) {
                problems.push(format!(
                    "dislocation contact arc must lie in (0°, 90°), got {th}°"
                ));
            }
        }

        if self.outputs.directory.is_empty() {
            problems.push("outputs.directory must not be empty".into());
        }
        for format in &self.outputs.formats {
            if format != "csv" && format != "json" {
                problems.push(format!("unknown output format {format:?}"));
            }
        }

        let t = &self.tolerances;
        if !t.solver_tol.is_finite() || t.solver_tol <= 0.0 {
            problems.push(format!("solver_tol must be positive, got {}", t.solver_tol));
        }
        if t.solver_grid_points < 3 {
            problems.push(format!(
                "solver_grid_points must be at least 3, got {}",
                t.solver_grid_points
            ));
        }
        if t.solver_max_iter == 0 {
            problems.push("solver_max_iter must be at least 1".into());
        }
        for (name, band) in [
            ("marginal_band_deg", t.marginal_band_deg),
            ("marginal_band_n", t.marginal_band_n),
        ] {
            if !band.is_finite() || band < 0.0 {
                problems.push(format!("{name} must be nonnegative, got {band}"));
            }
        }

        let setup = Setup {
            geometry,
            forces,
            envelope,
            tolerances: self.tolerances.clone(),
        };

        if problems.is_empty() {
            problems.extend(envelope_domain_errors(&setup, self));
        }

        if problems.is_empty() {
            Ok(setup)
        } else {
            Err(ConfigError::Invalid(problems))
        }
    }
}

/// Sweeps every map over the configured envelope (clipped to each map's own
/// pose domain) on a coarse grid and reports any pose where the geometry
/// turns a finite input into a domain error. A config that passes loads
/// cannot fail downstream inside its own envelope.
pub fn envelope_domain_errors(setup: &Setup, cfg: &RunConfig) -> Vec<String> {
    let mut problems = Vec::new();
    let g = &setup.geometry;
    let f = &setup.forces;
    let robot = &setup.envelope.robot;
    let step = deg_to_rad(5.0).expect("constant");

    let grid = |range: &MotionRange| -> Vec<f64> {
        let mut points = Vec::new();
        let mut x = range.min;
        while x < range.max {
            points.push(x);
            x += step;
        }
        points.push(range.max);
        points
    };

    let flexion_grid = grid(&robot.flexion_extension);
    let abduction_grid = grid(&robot.abduction_adduction);
    for &a1 in &flexion_grid {
        for &a2 in &abduction_grid {
            for (motion, result) in [
                (
                    "flexion",
                    torque::flexion_torque(a1, a2, f.deltoid, g, ArmMode::Verbatim),
                ),
                (
                    "extension",
                    torque::extension_torque(a1, a2, f.deltoid, g, ArmMode::Verbatim),
                ),
            ] {
                if let Err(e) = result {
                    problems.push(format!(
                        "{motion} map fails inside the envelope at ({:.1}°, {:.1}°): {e}",
                        crate::model::to_deg(a1),
                        crate::model::to_deg(a2)
                    ));
                    if problems.len() > 8 {
                        return problems;
                    }
                }
            }
        }
    }

    let rot_limit = deg_to_rad(60.0).expect("constant");
    for &a in &grid(&MotionRange {
        min: robot.rotation.min.max(-rot_limit),
        max: robot.rotation.max.min(rot_limit),
    }) {
        if let Err(e) =
            torque::abduction_torque(a, f.supraspinatus, f.biceps_long_head, f.deltoid_middle, g)
        {
            problems.push(format!(
                "abduction map fails inside the envelope at {:.1}°: {e}",
                crate::model::to_deg(a)
            ));
        }
    }

    let quarter = std::f64::consts::FRAC_PI_2;
    let rot32 = MotionRange {
        min: robot.abduction_adduction.min.max(0.0),
        max: robot.abduction_adduction.max.min(quarter),
    };
    let sweep_lo = (-quarter - g.rotation_insertion_offset).max(robot.rotation.min);
    let sweep_hi = (quarter - g.rotation_insertion_offset).min(robot.rotation.max);
    if rot32.min < rot32.max && sweep_lo < sweep_hi {
        for &a32 in &grid(&rot32) {
            for &a33 in &grid(&MotionRange {
                min: sweep_lo,
                max: sweep_hi,
            }) {
                if let Err(e) = torque::rotation_moment_arm(a32, a33, g) {
                    problems.push(format!(
                        "rotation map fails inside the envelope at ({:.1}°, {:.1}°): {e}",
                        crate::model::to_deg(a32),
                        crate::model::to_deg(a33)
                    ));
                    if problems.len() > 8 {
                        return problems;
                    }
                }
            }
        }
    }

    for &th_deg in &cfg.sweeps.dislocation.theta_h_deg {
        if let Ok(th) = deg_to_rad(th_deg) {
            if th > 0.0 && th < quarter {
                for i in 0..=20 {
                    let tc = th * (f64::from(i) / 20.0);
                    if let Err(e) = stability::dislocation_force(tc, th, g) {
                        problems.push(format!(
                            "dislocation map fails at theta_c {:.1}° for arc {th_deg}°: {e}",
                            crate::model::to_deg(tc)
                        ));
                    }
                }
            }
        }
    }

    let coupling = CouplingConfig::from(g);
    for i in 0..=36 {
        let te = -quarter + quarter * 2.0 * (f64::from(i) / 36.0);
        if let Err(e) = crate::coupling::potential_height(te, &coupling) {
            problems.push(format!(
                "coupling height fails at theta_e {:.1}°: {e}",
                crate::model::to_deg(te)
            ));
        }
    }

    problems
}

/// Grid helpers shared by the CLI sweeps.
pub fn linspace(range: [f64; 2], points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![range[0]];
    }
    (0..points)
        .map(|i| range[0] + (range[1] - range[0]) * (i as f64 / (points - 1) as f64))
        .collect()
}

/// Resolves the torque sweep for a motion, with an optional override of the
/// point counts from the command line.
pub fn torque_grids(
    cfg: &RunConfig,
    motion: Motion,
    grid_override: Option<usize>,
) -> (Vec<f64>, Option<Vec<f64>>) {
    let sweep = match motion {
        Motion::Flexion => &cfg.sweeps.flexion,
        Motion::Extension => &cfg.sweeps.extension,
        Motion::Abduction => &cfg.sweeps.abduction,
        Motion::Adduction => &cfg.sweeps.adduction,
        Motion::Rotation => &cfg.sweeps.rotation,
    };
    let p1 = grid_override.unwrap_or(sweep.points1);
    let axis1: Vec<f64> = linspace(sweep.axis1_deg, p1)
        .into_iter()
        .map(|d| deg_to_rad(d).expect("validated grid"))
        .collect();
    let axis2 = sweep.axis2_deg.map(|range| {
        let p2 = grid_override.or(sweep.points2).unwrap_or(sweep.points1);
        linspace(range, p2)
            .into_iter()
            .map(|d| deg_to_rad(d).expect("validated grid"))
            .collect()
    });
    (axis1, axis2)
}
