use std::path::Path;
use std::process::{Command, Output};

fn efr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_efr-atmos")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SHORT: &str = "benchmark = density_current\nh = 800\nfilter.kind = smagorinsky\nfilter.alpha = 30\n\
                     t_final = 5\nsnapshot_times = 5\n";

#[test]
fn check_accepts_a_valid_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "ok.cfg", SHORT);
    let out = efr(&["check", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("50 steps"));
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.cfg", &format!("{SHORT}relax.chi = 1.5\n"));
    for cmd in ["check", "run"] {
        let out = efr(&[cmd, &bad]);
        assert_eq!(out.status.code(), Some(1), "{cmd}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains("relax.chi") && err.contains("line 7"), "{err}");
    }
    let missing = dir.path().join("absent.cfg");
    assert_eq!(efr(&["check", missing.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", SHORT);
    let out_dir = dir.path().join("out");
    let out = efr(&["run", &cfg, "--output-dir", out_dir.to_str().unwrap(), "--deterministic"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["diagnostics.csv", "manifest.txt", "snapshot_t5.vtk"] {
        assert!(out_dir.join(name).is_file(), "{name}");
    }
}

#[test]
fn runtime_aborts_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cold.cfg",
        "benchmark = density_current\nh = 800\nfilter.kind = linear\nfilter.alpha = 0\n\
         dt = 1\nt_final = 300\ncv = 0.01\n",
    );
    let out_dir = dir.path().join("out");
    let out = efr(&["run", &cfg, "--output-dir", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("step"));
    assert!(out_dir.join("diagnostics.csv").is_file());
}
