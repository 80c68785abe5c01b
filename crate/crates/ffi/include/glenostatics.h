/* C interface for the glenostatics engine.
 *
 * Opaque-handle pattern: build a GsEngine from a configuration JSON
 * document (or the bundled reference configuration), query it through
 * functions returning a GsStatus code, free it with gs_engine_free.
 *
 * Units across this boundary: angles in degrees, lengths in metres,
 * forces in newtons, torques in newton metres.
 *
 * This header is maintained by hand; the Rust test suite checks the
 * declarations against the implementation.
 */

#ifndef GLENOSTATICS_H
#define GLENOSTATICS_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum GsStatus {
  GS_OK = 0,
  GS_NULL_POINTER = 1,
  GS_INVALID_ARGUMENT = 2,
  GS_DOMAIN_ERROR = 3,
  GS_CONFIG_ERROR = 4,
  GS_UTF8_ERROR = 5,
} GsStatus;

typedef enum GsStability {
  GS_STABLE = 0,
  GS_MARGINAL = 1,
  GS_UNSTABLE = 2,
} GsStability;

typedef enum GsMotion {
  GS_MOTION_FLEXION = 0,
  GS_MOTION_EXTENSION = 1,
  GS_MOTION_ABDUCTION = 2,
  GS_MOTION_ADDUCTION = 3,
  GS_MOTION_ROTATION = 4,
} GsMotion;

typedef enum GsArmMode {
  GS_ARM_VERBATIM = 0,
  GS_ARM_CORRECTED = 1,
} GsArmMode;

/* Opaque handle over a validated configuration. */
typedef struct GsEngine GsEngine;

/* Library version as a static NUL-terminated string. */
const char *gs_version(void);

/* Builds an engine from a configuration JSON document. On success writes
 * the handle through `out`. The handle must be freed with gs_engine_free. */
GsStatus gs_engine_from_json(const char *json, GsEngine **out);

/* Builds an engine from the bundled reference configuration. */
GsStatus gs_engine_reference(GsEngine **out);

/* Releases an engine. NULL is a no-op. */
void gs_engine_free(GsEngine *engine);

/* Axial force (N) the joint resists at contact angle theta_c along the
 * dislocation path of a socket arc theta_h. */
GsStatus gs_dislocation_force(const GsEngine *engine, double theta_c_deg,
                              double theta_h_deg, double *out_force_n);

/* Peak dislocation force (N) over the whole path and the contact angle
 * (deg) where it occurs. */
GsStatus gs_max_dislocation_force(const GsEngine *engine, double theta_h_deg,
                                  double *out_force_n,
                                  double *out_theta_c_deg);

/* Torque (N*m) for one motion group at a pose. The angle pair follows the
 * motion's axes: flexion/extension take (flexion, abduction), rotation
 * takes (abduction, rotation), abduction takes (rotation, ignored),
 * adduction takes (abduction, ignored). `mode` selects the
 * flexion/extension moment-arm variant and is ignored elsewhere. */
GsStatus gs_torque(const GsEngine *engine, GsMotion motion, double angle1_deg,
                   double angle2_deg, GsArmMode mode, double *out_torque_nm);

/* Abduction torque split into the paired-tendon term and the
 * deltoid-middle term (N*m). */
GsStatus gs_abduction_components(const GsEngine *engine, double rotation_deg,
                                 double *out_pair_nm,
                                 double *out_deltoid_middle_nm,
                                 double *out_total_nm);

/* Self-lock classification. Writes a GsStability value and the margin in
 * degrees. Stable while theta_d + socket_half stays short of 90 degrees. */
GsStatus gs_self_lock(double theta_d_deg, double socket_half_deg,
                      double tol_deg, int *out_status, double *out_margin_deg);

/* Coupling-condition classification for one (theta_d, theta_s, theta_e)
 * triple. Stable while theta_d - theta_s + theta_e stays short of 180
 * degrees. */
GsStatus gs_coupling_condition(double theta_d_deg, double theta_s_deg,
                               double theta_e_deg, double tol_deg,
                               int *out_status, double *out_margin_deg);

/* Lowest-potential pose of the coupled shoulder-elbow system over the
 * engine's configured bracket. `out_at_boundary` receives 1 when the
 * minimum sits on the bracket boundary. */
GsStatus gs_equilibrium(const GsEngine *engine, double *out_theta_e_deg,
                        double *out_theta_f_deg, double *out_height_m,
                        int *out_at_boundary);

/* Robot-to-human coverage percentages in the order flexion/extension,
 * abduction/adduction, rotation. `out_coverage_pct` must hold 3 doubles. */
GsStatus gs_rom_coverage(const GsEngine *engine, double *out_coverage_pct);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* GLENOSTATICS_H */
