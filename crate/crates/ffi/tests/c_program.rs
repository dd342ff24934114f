//! Compiles a small C program against the generated header and the static
//! library, then runs it.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "sourcebf.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "line %d: %s\n", __LINE__, #cond); return 1; } } while (0)

int main(int argc, char **argv) {
    SbfConfig *cfg = NULL;
    SbfReport *report = NULL;
    char *text = NULL;
    double log_v = 0.0, se = 0.0;

    CHECK(argc == 2);
    CHECK(strlen(sbf_version()) > 0);
    CHECK(sbf_config_load(NULL, &cfg) == SBF_STATUS_NULL_POINTER);
    CHECK(sbf_last_error_message() != NULL);

    CHECK(sbf_config_load(argv[1], &cfg) == SBF_STATUS_OK);
    CHECK(sbf_config_set_iterations(cfg, 2000, 500) == SBF_STATUS_OK);
    CHECK(sbf_evaluate(cfg, &report) == SBF_STATUS_OK);
    CHECK(sbf_report_log_v(report, SBF_FORM_FULL, &log_v, &se) == SBF_STATUS_OK);
    CHECK(se > 0.0);
    CHECK(sbf_report_render(report, SBF_FORMAT_TEXT, &text) == SBF_STATUS_OK);
    CHECK(strstr(text, "parameters unknown") != NULL);
    printf("log_v_full=%.6f\n", log_v);

    sbf_string_free(text);
    sbf_report_free(report);
    sbf_config_free(cfg);
    return 0;
}
"#;

/// Directory holding the library artifacts for this test build.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

fn find_static_lib() -> PathBuf {
    let dir = artifact_dir();
    [dir.join("libsourcebf_ffi.a"), dir.join("deps").join("libsourcebf_ffi.a")]
        .into_iter()
        .find(|p| p.is_file())
        .unwrap_or_else(|| panic!("libsourcebf_ffi.a not found under {}", dir.display()))
}

#[test]
fn c_program_links_and_runs() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("main.c");
    let exe = tmp.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&src)
        .arg(find_static_lib())
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler (cc) on PATH");
    assert!(status.success());
    let config = manifest.join("../core/fixtures/scenario1.toml");
    let out = Command::new(&exe).arg(&config).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("log_v_full="));
}
