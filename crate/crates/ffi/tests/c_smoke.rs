use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "betadyn.h"

int main(void) {
    BetadynBeta *two = NULL;
    if (betadyn_beta_new("2", &two) != BETADYN_STATUS_OK) return 1;
    BetadynDimension d;
    if (betadyn_dim_e(two, two, 0.3, 1.0, &d) != BETADYN_STATUS_OK) return 2;
    if (fabs(d.value - 4.0 / 7.0) > 1e-12 || d.regime != BETADYN_REGIME_CASE_AB) return 3;
    uint64_t c = 0;
    if (betadyn_count_words(two, 10, &c) != BETADYN_STATUS_OK || c != 1024) return 4;
    betadyn_beta_free(two);
    BetadynBeta *bad = NULL;
    if (betadyn_beta_new("0", &bad) == BETADYN_STATUS_OK) return 5;
    if (betadyn_last_error() == NULL) return 6;
    puts("ok");
    return 0;
}
"#;

fn cc() -> Option<String> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    Command::new(&cc).arg("--version").output().ok().filter(|o| o.status.success()).map(|_| cc)
}

#[test]
fn c_program_links_against_static_library() {
    let Some(cc) = cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let target = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = target.join("libbetadyn_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let dir = std::env::temp_dir().join(format!("betadyn-c-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("main.c");
    let exe = dir.join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
    std::fs::remove_dir_all(&dir).ok();
}
