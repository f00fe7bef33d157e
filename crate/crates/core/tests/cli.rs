use std::path::Path;
use std::process::Command;

fn phi4(out: &Path, args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_phi4"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
        .status
        .code()
        .expect("exit code")
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_name() != "manifest.json")
        .map(|e| (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    assert_eq!(phi4(out, &["bogus"]), 2);
    assert_eq!(phi4(out, &["--lambda", "2", "stability"]), 2);
    assert_eq!(phi4(out, &["--gamma", "1.5", "propagator"]), 2);
    assert_eq!(phi4(out, &["graphs", "--couplings", "5"]), 3);
    assert_eq!(phi4(out, &["--cutoff", "9", "stability"]), 3);
    assert_eq!(phi4(out, &["--check", "--dim", "3", "--cutoff", "2", "propagator"]), 0);
}

#[test]
fn runs_write_a_manifest_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("prop");
    assert_eq!(phi4(&out, &["--format", "csv", "--cutoff", "2", "propagator"]), 0);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "propagator");
    assert!(manifest["rng_scheme"].as_str().is_some());
    assert!(files(&out).iter().any(|(name, _)| name.ends_with(".csv")));
}

#[test]
fn identical_arguments_give_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in [
        vec!["--seed", "5", "--samples", "1000", "--cutoff", "2", "sample"],
        vec!["--gamma", "1.4142135623730951", "--cutoff", "2", "--lambda", "0.02", "stability", "--method", "qmc"],
        vec!["--gamma", "1.4142135623730951", "--cutoff", "2", "rgflow", "--source", "1,0.5,-0.5,0.25"],
    ] {
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        assert_eq!(phi4(&a, &cmd), 0, "{cmd:?}");
        assert_eq!(phi4(&b, &cmd), 0, "{cmd:?}");
        let (fa, fb) = (files(&a), files(&b));
        assert!(!fa.is_empty());
        assert_eq!(fa, fb, "{cmd:?}");
        std::fs::remove_dir_all(&a).unwrap();
        std::fs::remove_dir_all(&b).unwrap();
    }
}

#[test]
fn reference_stability_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let code = phi4(
        dir.path(),
        &["--check", "--gamma", "1.4142135623730951", "--cutoff", "2", "--lambda", "0.05", "stability", "--source", "1,0.5,-0.5,0.25"],
    );
    assert_eq!(code, 0);
}
