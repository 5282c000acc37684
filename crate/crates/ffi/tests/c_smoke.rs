use std::path::PathBuf;
use std::process::Command;

/// Compiles `examples/smoke.c` against the generated header and the static
/// library, then runs it. Skipped when no C compiler is on the path.
#[test]
fn c_program_links_and_runs() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler ({cc}); skipping");
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    // The test harness does not build the staticlib, and the outer cargo holds
    // the lock on the main target dir, so build into a private one.
    let target_dir = tmp.join("ffi-staticlib");
    let built = Command::new(env!("CARGO"))
        .args(["build", "--quiet", "-p", "paving-ffi", "--lib", "--target-dir"])
        .arg(&target_dir)
        .current_dir(&manifest)
        .status()
        .unwrap();
    assert!(built.success(), "building the static library failed");
    let lib = target_dir.join("debug").join("libpaving_ffi.a");
    let exe = tmp.join("paving_smoke");
    let status = Command::new(&cc)
        .arg(manifest.join("examples/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("dim=8 rank=3 min="));
}
