//! Compiles and runs a small C program against `include/glenostatics.h`
//! and the built static library, keeping the hand-maintained header honest.
//! Skips silently when no C compiler is on the PATH.

use std::path::PathBuf;
use std::process::Command;

const SMOKE_C: &str = r#"
#include <stdio.h>
#include "glenostatics.h"

int main(void) {
    GsEngine *engine = NULL;
    if (gs_engine_reference(&engine) != GS_OK) return 1;

    double force = 0.0, theta_c = 0.0;
    if (gs_max_dislocation_force(engine, 30.0, &force, &theta_c) != GS_OK) return 2;
    if (force < 399.0 || force > 401.0) return 3;

    double onset = -1.0;
    if (gs_dislocation_force(engine, 30.0, 30.0, &onset) != GS_OK) return 4;
    if (onset != 0.0) return 5;

    double tau = 0.0;
    if (gs_torque(engine, GS_MOTION_ROTATION, 0.0, 0.0, GS_ARM_VERBATIM, &tau) != GS_OK) return 6;
    if (tau < 17.9 || tau > 18.1) return 7;

    int status = -1;
    double margin = 0.0;
    if (gs_self_lock(120.0, 0.0, 1.0, &status, &margin) != GS_OK) return 8;
    if (status != GS_UNSTABLE) return 9;

    double coverage[3];
    if (gs_rom_coverage(engine, coverage) != GS_OK) return 10;
    if (coverage[1] < 100.0) return 11;

    gs_engine_free(engine);
    printf("peak %.3f N at %.3f deg; rotation torque %.3f N*m\n", force, theta_c, tau);
    return 0;
}
"#;

fn compiler() -> Option<&'static str> {
    ["cc", "gcc", "clang"].into_iter().find(|cc| {
        Command::new(cc)
            .arg("--version")
            .output()
            .is_ok_and(|o| o.status.success())
    })
}

fn staticlib_path() -> Option<PathBuf> {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let target = manifest.parent()?.parent()?.join("target");
    for profile in ["debug", "release"] {
        let candidate = target.join(profile).join("libglenostatics_ffi.a");
        if candidate.exists() {
            return Some(candidate);
        }
    }
    None
}

#[test]
fn c_smoke_program_links_and_runs() {
    let Some(cc) = compiler() else {
        eprintln!("no C compiler found; skipping header smoke test");
        return;
    };
    let Some(lib) = staticlib_path() else {
        eprintln!("staticlib not built; skipping header smoke test");
        return;
    };
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");

    let dir = tempfile_dir();
    let source = dir.join("smoke.c");
    let binary = dir.join("smoke");
    std::fs::write(&source, SMOKE_C).unwrap();

    let compile = Command::new(cc)
        .arg(&source)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&binary)
        .output()
        .expect("compiler runs");
    assert!(
        compile.status.success(),
        "compile failed:\n{}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&binary).output().expect("smoke binary runs");
    assert!(
        run.status.success(),
        "smoke binary exited with {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stdout)
    );
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("peak 400.000 N"), "stdout: {stdout}");
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("glenostatics-abi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
