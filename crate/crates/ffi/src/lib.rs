//! C ABI for the glenostatics engine.
//!
//! The surface follows the usual opaque-handle pattern: load a validated
//! configuration into a [`GsEngine`], query it through plain functions that
//! return a [`GsStatus`] code and write results through out-pointers, free
//! the handle when done. All angles cross this boundary in degrees, lengths
//! in metres, forces in newtons, torques in newton metres.
//!
//! The matching declarations live in `include/glenostatics.h`; the header
//! is maintained by hand and the `abi` test keeps it honest.

use glenostatics::config::RunConfig;
use glenostatics::coupling::{self, CouplingConfig};
use glenostatics::model::deg_to_rad;
use glenostatics::solver::Bracket;
use glenostatics::stability::{self, StabilityStatus};
use glenostatics::torque::{self, ArmMode};
use glenostatics::Setup;
use libc::{c_char, c_double, c_int};
use std::ffi::CStr;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DomainError = 3,
    ConfigError = 4,
    Utf8Error = 5,
}

/// Stability classification across the ABI.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsStability {
    Stable = 0,
    Marginal = 1,
    Unstable = 2,
}

impl From<StabilityStatus> for GsStability {
    fn from(s: StabilityStatus) -> Self {
        match s {
            StabilityStatus::Stable => GsStability::Stable,
            StabilityStatus::Marginal => GsStability::Marginal,
            StabilityStatus::Unstable => GsStability::Unstable,
        }
    }
}

/// Motion groups across the ABI.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsMotion {
    Flexion = 0,
    Extension = 1,
    Abduction = 2,
    Adduction = 3,
    Rotation = 4,
}

/// Moment-arm variants for flexion/extension.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsArmMode {
    Verbatim = 0,
    Corrected = 1,
}

/// Opaque handle over a validated configuration.
pub struct GsEngine {
    setup: Setup,
    config: RunConfig,
}

fn engine_ref<'a>(ptr: *const GsEngine) -> Option<&'a GsEngine> {
    // SAFETY: the caller promises the pointer came from gs_engine_from_json
    // and has not been freed.
    unsafe { ptr.as_ref() }
}

fn rad_or_invalid(deg: f64) -> Result<f64, GsStatus> {
    deg_to_rad(deg).map_err(|_| GsStatus::InvalidArgument)
}

fn write_out(ptr: *mut c_double, value: f64) -> GsStatus {
    if ptr.is_null() {
        return GsStatus::NullPointer;
    }
    // SAFETY: non-null out-pointer supplied by the caller.
    unsafe { *ptr = value };
    GsStatus::Ok
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds an engine from a configuration JSON document.
///
/// On success writes the handle through `out` and returns `GS_OK`; the
/// handle must be released with [`gs_engine_free`].
///
/// # Safety
/// `json` must point to a valid NUL-terminated string and `out` to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_engine_from_json(
    json: *const c_char,
    out: *mut *mut GsEngine,
) -> GsStatus {
    if json.is_null() || out.is_null() {
        return GsStatus::NullPointer;
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(t) => t,
        Err(_) => return GsStatus::Utf8Error,
    };
    let config = match RunConfig::from_json(text) {
        Ok(c) => c,
        Err(_) => return GsStatus::ConfigError,
    };
    let setup = match config.setup() {
        Ok(s) => s,
        Err(_) => return GsStatus::ConfigError,
    };
    *out = Box::into_raw(Box::new(GsEngine { setup, config }));
    GsStatus::Ok
}

/// Builds an engine from the bundled reference configuration.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_engine_reference(out: *mut *mut GsEngine) -> GsStatus {
    if out.is_null() {
        return GsStatus::NullPointer;
    }
    let config = RunConfig::reference();
    let setup = match config.setup() {
        Ok(s) => s,
        Err(_) => return GsStatus::ConfigError,
    };
    *out = Box::into_raw(Box::new(GsEngine { setup, config }));
    GsStatus::Ok
}

/// Releases an engine. Passing NULL is a no-op.
///
/// # Safety
/// `engine` must be a pointer previously returned through
/// [`gs_engine_from_json`] or [`gs_engine_reference`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gs_engine_free(engine: *mut GsEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Axial force the joint resists at contact angle `theta_c_deg` along the
/// dislocation path of a socket arc `theta_h_deg`.
///
/// # Safety
/// `engine` must be a live handle from this library; `out_force_n` must be
/// writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn gs_dislocation_force(
    engine: *const GsEngine,
    theta_c_deg: c_double,
    theta_h_deg: c_double,
    out_force_n: *mut c_double,
) -> GsStatus {
    let Some(engine) = engine_ref(engine) else {
        return GsStatus::NullPointer;
    };
    let (Ok(tc), Ok(th)) = (rad_or_invalid(theta_c_deg), rad_or_invalid(theta_h_deg)) else {
        return GsStatus::InvalidArgument;
    };
    match stability::dislocation_force(tc, th, &engine.setup.geometry) {
        Ok(force) => write_out(out_force_n, force),
        Err(_) => GsStatus::DomainError,
    }
}

/// Peak dislocation force over the whole path and the contact angle where
/// it occurs.
///
/// # Safety
/// `engine` must be a live handle from this library; out-pointers must be
/// writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn gs_max_dislocation_force(
    engine: *const GsEngine,
    theta_h_deg: c_double,
    out_force_n: *mut c_double,
    out_theta_c_deg: *mut c_double,
) -> GsStatus {
    let Some(engine) = engine_ref(engine) else {
        return GsStatus::NullPointer;
    };
    let Ok(th) = rad_or_invalid(theta_h_deg) else {
        return GsStatus::InvalidArgument;
    };
    match stability::max_dislocation_force(
        th,
        &engine.setup.geometry,
        engine.setup.tolerances.solver_grid_points,
    ) {
        Ok((force, tc)) => {
            let status = write_out(out_force_n, force);
            if status != GsStatus::Ok {
                return status;
            }
            write_out(out_theta_c_deg, tc.to_degrees())
        }
        Err(_) => GsStatus::DomainError,
    }
}

/// Torque for one motion group at a pose. `angle1_deg`/`angle2_deg` follow
/// the motion's axes: flexion/extension take (flexion, abduction), rotation
/// takes (abduction, rotation), abduction takes (rotation, ignored), and
/// adduction takes (abduction, ignored).
///
/// # Safety
/// `engine` must be a live handle from this library; `out_torque_nm` must
/// be writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn gs_torque(
    engine: *const GsEngine,
    motion: GsMotion,
    angle1_deg: c_double,
    angle2_deg: c_double,
    mode: GsArmMode,
    out_torque_nm: *mut c_double,
) -> GsStatus {
    let Some(engine) = engine_ref(engine) else {
        return GsStatus::NullPointer;
    };
    let (Ok(a1), Ok(a2)) = (rad_or_invalid(angle1_deg), rad_or_invalid(angle2_deg)) else {
        return GsStatus::InvalidArgument;
    };
    let mode = match mode {
        GsArmMode::Verbatim => ArmMode::Verbatim,
        GsArmMode::Corrected => ArmMode::Corrected,
    };
    let g = &engine.setup.geometry;
    let f = &engine.setup.forces;
    let result = match motion {
        GsMotion::Flexion => torque::flexion_torque(a1, a2, f.deltoid, g, mode),
        GsMotion::Extension => torque::extension_torque(a1, a2, f.deltoid, g, mode),
        GsMotion::Abduction => {
            torque::abduction_torque(a1, f.supraspinatus, f.biceps_long_head, f.deltoid_middle, g)
                .map(|t| t.total)
        }
        GsMotion::Adduction => Ok(torque::adduction_torque(a1, f.triceps_long_head, g)),
        GsMotion::Rotation => torque::rotation_torque(a1, a2, f.rotator_pair, g),
    };
    match result {
        Ok(tau) => write_out(out_torque_nm, tau),
        Err(_) => GsStatus::DomainError,
    }
}

/// Abduction torque split into the paired-tendon and deltoid-middle terms.
///
/// # Safety
/// `engine` must be a live handle from this library; out-pointers must be
/// writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn gs_abduction_components(
    engine: *const GsEngine,
    rotation_deg: c_double,
    out_pair_nm: *mut c_double,
    out_deltoid_middle_nm: *mut c_double,
    out_total_nm: *mut c_double,
) -> GsStatus {
    let Some(engine) = engine_ref(engine) else {
        return GsStatus::NullPointer;
    };
    let Ok(rotation) = rad_or_invalid(rotation_deg) else {
        return GsStatus::InvalidArgument;
    };
    let f = &engine.setup.forces;
    match torque::abduction_torque(
        rotation,
        f.supraspinatus,
        f.biceps_long_head,
        f.deltoid_middle,
        &engine.setup.geometry,
    ) {
        Ok(t) => {
            for (ptr, value) in [
                (out_pair_nm, t.supraspinatus_biceps),
                (out_deltoid_middle_nm, t.deltoid_middle),
                (out_total_nm, t.total),
            ] {
                let status = write_out(ptr, value);
                if status != GsStatus::Ok {
                    return status;
                }
            }
            GsStatus::Ok
        }
        Err(_) => GsStatus::DomainError,
    }
}

/// Self-lock classification; the margin (degrees) and status are written
/// through the out-pointers.
///
/// # Safety
/// Out-pointers must be writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn gs_self_lock(
    theta_d_deg: c_double,
    socket_half_deg: c_double,
    tol_deg: c_double,
    out_status: *mut c_int,
    out_margin_deg: *mut c_double,
) -> GsStatus {
    let (Ok(d), Ok(s)) = (rad_or_invalid(theta_d_deg), rad_or_invalid(socket_half_deg)) else {
        return GsStatus::InvalidArgument;
    };
    if !tol_deg.is_finite() || tol_deg < 0.0 {
        return GsStatus::InvalidArgument;
    }
    match stability::self_lock_status(d, s, tol_deg) {
        Ok(report) => {
            if out_status.is_null() {
                return GsStatus::NullPointer;
            }
            // SAFETY: checked non-null.
            unsafe { *out_status = GsStability::from(report.status) as c_int };
            write_out(out_margin_deg, report.margin)
        }
        Err(_) => GsStatus::DomainError,
    }
}

/// Coupling-condition classification for one (theta_d, theta_s, theta_e).
///
/// # Safety
/// Out-pointers must be writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn gs_coupling_condition(
    theta_d_deg: c_double,
    theta_s_deg: c_double,
    theta_e_deg: c_double,
    tol_deg: c_double,
    out_status: *mut c_int,
    out_margin_deg: *mut c_double,
) -> GsStatus {
    let (Ok(d), Ok(s), Ok(e)) = (
        rad_or_invalid(theta_d_deg),
        rad_or_invalid(theta_s_deg),
        rad_or_invalid(theta_e_deg),
    ) else {
        return GsStatus::InvalidArgument;
    };
    if !tol_deg.is_finite() || tol_deg < 0.0 {
        return GsStatus::InvalidArgument;
    }
    let report = coupling::coupling_stability(d, s, e, tol_deg);
    if out_status.is_null() {
        return GsStatus::NullPointer;
    }
    // SAFETY: checked non-null.
    unsafe { *out_status = GsStability::from(report.status) as c_int };
    write_out(out_margin_deg, report.margin)
}

/// Lowest-potential pose of the coupled two-joint system over the engine's
/// configured bracket.
///
/// # Safety
/// `engine` must be a live handle from this library; out-pointers must be
/// writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn gs_equilibrium(
    engine: *const GsEngine,
    out_theta_e_deg: *mut c_double,
    out_theta_f_deg: *mut c_double,
    out_height_m: *mut c_double,
    out_at_boundary: *mut c_int,
) -> GsStatus {
    let Some(engine) = engine_ref(engine) else {
        return GsStatus::NullPointer;
    };
    let bracket_deg = engine.config.sweeps.equilibrium.theta_e_deg;
    let (Ok(lo), Ok(hi)) = (
        rad_or_invalid(bracket_deg[0]),
        rad_or_invalid(bracket_deg[1]),
    ) else {
        return GsStatus::InvalidArgument;
    };
    let Ok(bracket) = Bracket::new(lo, hi) else {
        return GsStatus::InvalidArgument;
    };
    let cfg = CouplingConfig::from(&engine.setup.geometry);
    match coupling::equilibrium_pose(
        &cfg,
        bracket,
        engine.setup.tolerances.solver_tol,
        engine.setup.tolerances.marginal_band_deg,
        engine.setup.tolerances.solver_grid_points,
    ) {
        Ok(eq) => {
            for (ptr, value) in [
                (out_theta_e_deg, eq.theta_e.to_degrees()),
                (out_theta_f_deg, eq.theta_f.to_degrees()),
                (out_height_m, eq.height),
            ] {
                let status = write_out(ptr, value);
                if status != GsStatus::Ok {
                    return status;
                }
            }
            if out_at_boundary.is_null() {
                return GsStatus::NullPointer;
            }
            // SAFETY: checked non-null.
            unsafe { *out_at_boundary = c_int::from(eq.at_boundary) };
            GsStatus::Ok
        }
        Err(_) => GsStatus::DomainError,
    }
}

/// Robot-to-human coverage percentages in the order flexion/extension,
/// abduction/adduction, rotation.
///
/// # Safety
/// `out_coverage_pct` must point to at least three writable doubles.
#[no_mangle]
pub unsafe extern "C" fn gs_rom_coverage(
    engine: *const GsEngine,
    out_coverage_pct: *mut c_double,
) -> GsStatus {
    let Some(engine) = engine_ref(engine) else {
        return GsStatus::NullPointer;
    };
    if out_coverage_pct.is_null() {
        return GsStatus::NullPointer;
    }
    match stability::rom_coverage(&engine.setup.envelope) {
        Ok(cov) => {
            let out = std::slice::from_raw_parts_mut(out_coverage_pct, 3);
            out[0] = cov.flexion_extension_pct;
            out[1] = cov.abduction_adduction_pct;
            out[2] = cov.rotation_pct;
            GsStatus::Ok
        }
        Err(_) => GsStatus::DomainError,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;
    use std::ptr;

    fn engine() -> *mut GsEngine {
        let mut out = ptr::null_mut();
        let status = unsafe { gs_engine_reference(&mut out) };
        assert_eq!(status, GsStatus::Ok);
        assert!(!out.is_null());
        out
    }

    #[test]
    fn engine_round_trip_from_json() {
        let json = CString::new(RunConfig::reference_json()).unwrap();
        let mut out = ptr::null_mut();
        let status = unsafe { gs_engine_from_json(json.as_ptr(), &mut out) };
        assert_eq!(status, GsStatus::Ok);
        unsafe { gs_engine_free(out) };
    }

    #[test]
    fn bad_json_is_config_error() {
        let json = CString::new("{\"geometry\": {}}").unwrap();
        let mut out = ptr::null_mut();
        let status = unsafe { gs_engine_from_json(json.as_ptr(), &mut out) };
        assert_eq!(status, GsStatus::ConfigError);
    }

    #[test]
    fn null_pointers_are_rejected() {
        let mut value = 0.0;
        assert_eq!(
            unsafe { gs_dislocation_force(ptr::null(), 0.0, 30.0, &mut value) },
            GsStatus::NullPointer
        );
        let e = engine();
        assert_eq!(
            unsafe { gs_dislocation_force(e, 0.0, 30.0, ptr::null_mut()) },
            GsStatus::NullPointer
        );
        unsafe { gs_engine_free(e) };
    }

    #[test]
    fn dislocation_matches_core() {
        let e = engine();
        let mut force = 0.0;
        let mut tc = 0.0;
        assert_eq!(
            unsafe { gs_max_dislocation_force(e, 30.0, &mut force, &mut tc) },
            GsStatus::Ok
        );
        assert!((force - 400.0).abs() <= 1.0);
        assert!(tc > 0.0 && tc < 30.0);

        // Onset force is exactly zero.
        assert_eq!(
            unsafe { gs_dislocation_force(e, 30.0, 30.0, &mut force) },
            GsStatus::Ok
        );
        assert_eq!(force, 0.0);

        // Contact angle past the arc is a domain error.
        assert_eq!(
            unsafe { gs_dislocation_force(e, 31.0, 30.0, &mut force) },
            GsStatus::DomainError
        );
        unsafe { gs_engine_free(e) };
    }

    #[test]
    fn torques_match_reference_anchors() {
        let e = engine();
        let mut tau = 0.0;
        assert_eq!(
            unsafe {
                gs_torque(
                    e,
                    GsMotion::Rotation,
                    0.0,
                    0.0,
                    GsArmMode::Verbatim,
                    &mut tau,
                )
            },
            GsStatus::Ok
        );
        assert_eq!(tau, 18.0);

        assert_eq!(
            unsafe {
                gs_torque(
                    e,
                    GsMotion::Abduction,
                    0.0,
                    0.0,
                    GsArmMode::Verbatim,
                    &mut tau,
                )
            },
            GsStatus::Ok
        );
        assert!((tau - 54.0).abs() < 1e-9);

        let mut pair = 0.0;
        let mut middle = 0.0;
        let mut total = 0.0;
        assert_eq!(
            unsafe { gs_abduction_components(e, 0.0, &mut pair, &mut middle, &mut total) },
            GsStatus::Ok
        );
        assert!((pair - 33.0).abs() < 1e-9);
        assert!((middle - 21.0).abs() < 1e-9);

        // Out-of-domain pose surfaces as a domain error.
        assert_eq!(
            unsafe {
                gs_torque(
                    e,
                    GsMotion::Rotation,
                    95.0,
                    0.0,
                    GsArmMode::Verbatim,
                    &mut tau,
                )
            },
            GsStatus::DomainError
        );
        unsafe { gs_engine_free(e) };
    }

    #[test]
    fn stability_reports_match_fixtures() {
        let mut status = -1;
        let mut margin = 0.0;
        assert_eq!(
            unsafe { gs_self_lock(30.0, 0.0, 1.0, &mut status, &mut margin) },
            GsStatus::Ok
        );
        assert_eq!(status, GsStability::Stable as c_int);
        assert!((margin - 60.0).abs() < 1e-9);

        assert_eq!(
            unsafe { gs_coupling_condition(165.0, 30.0, 60.0, 1.0, &mut status, &mut margin) },
            GsStatus::Ok
        );
        assert_eq!(status, GsStability::Unstable as c_int);
        assert!((margin + 15.0).abs() < 1e-9);
    }

    #[test]
    fn equilibrium_and_coverage() {
        let e = engine();
        let mut te = 0.0;
        let mut tf = 0.0;
        let mut height = 0.0;
        let mut boundary = -1;
        assert_eq!(
            unsafe { gs_equilibrium(e, &mut te, &mut tf, &mut height, &mut boundary) },
            GsStatus::Ok
        );
        assert!((-74.0..=-73.0).contains(&te));
        assert_eq!(boundary, 0);

        let mut coverage = [0.0f64; 3];
        assert_eq!(
            unsafe { gs_rom_coverage(e, coverage.as_mut_ptr()) },
            GsStatus::Ok
        );
        assert!((coverage[0] - 46.26).abs() < 0.5);
        assert!((coverage[1] - 105.43).abs() < 0.5);
        assert!((coverage[2] - 99.23).abs() < 0.5);
        unsafe { gs_engine_free(e) };
    }

    #[test]
    fn version_is_nul_terminated() {
        let v = unsafe { CStr::from_ptr(gs_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
