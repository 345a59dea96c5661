use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "supq_weyl.h"

int main(void) {
    const char *id = "{\"p\":1,\"q\":1,\"A\":[[[1,0]]],\"B\":[[[0,0]]],\"C\":[[[0,0]]],\"D\":[[[1,0]]]}";
    SwSupq *k = NULL;
    SwSymbol *w = NULL;
    if (sw_supq_from_json(id, &k) != SW_STATUS_OK) return 10;
    if (sw_weyl_sigma(k, 2.0, -1.0, &w) != SW_STATUS_OK) return 11;
    double z[4] = {0.3, -0.2, 0.1, 0.5};
    double out[2];
    if (sw_symbol_eval(w, z, 2, out) != SW_STATUS_OK) return 12;
    if (fabs(out[0] - 1.0) > 1e-14 || fabs(out[1]) > 1e-14) return 13;
    if (sw_symbol_eval(w, z, 3, out) != SW_STATUS_DIMENSION_MISMATCH) return 14;
    if (sw_last_error_message() == NULL) return 15;
    sw_symbol_free(w);
    sw_supq_free(k);
    printf("ok %s\n", sw_version());
    return 0;
}
"#;

#[test]
fn header_compiles_and_links() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header_dir = manifest.join("include");
    assert!(header_dir.join("supq_weyl.h").exists());
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    // integration tests only get the rlib, so refresh the static archive
    let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
    let built = Command::new(cargo)
        .args(["build", "--quiet", "-p", "supq-weyl-ffi", "--lib", "--profile", "test"])
        .current_dir(&manifest)
        .status()
        .expect("run cargo build");
    assert!(built.success());
    let lib = profile_dir.join("libsupq_weyl_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&header_dir)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("run cc");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
