use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_eigencount"))
}

fn bundled() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/b0-alpha1.json")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tree(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn malformed_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"name": "x", "truncation": "many"}"#).unwrap();
    let out_dir = dir.path().join("out");
    let res = run(&["--out", out_dir.to_str().unwrap(), "run", cfg.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["exit_code"], 2);
    assert_eq!(manifest["stages"][0]["stage"], "parse");

    let missing = run(&["run", dir.path().join("absent.json").to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn bundled_scenario_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a");
    let second = dir.path().join("b");
    for out in [&first, &second] {
        let res = run(&["--threads", "1", "--out", out.to_str().unwrap(), "run", bundled().to_str().unwrap()]);
        assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    }
    let (a, b) = (tree(&first), tree(&second));
    assert!(a.len() > 10);
    assert_eq!(a, b);

    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(first.join("manifest.json")).unwrap()).unwrap();
    for file in manifest["files"].as_array().unwrap() {
        assert!(first.join(file.as_str().unwrap()).exists(), "{file}");
    }
    let wa: serde_json::Value = serde_json::from_slice(&fs::read(first.join("r000/wa.json")).unwrap()).unwrap();
    assert_eq!(wa["pass"], true);
    let (n_a, n_trb, nu) = (wa["n_A"].as_i64().unwrap(), wa["n_TrB"].as_i64().unwrap(), wa["nu"].as_i64().unwrap());
    assert_eq!(n_a, n_trb + nu);
}

#[test]
fn failing_stage_sets_its_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    // a = 0.1 < 96 b² l = 0.24 violates the lacuna precondition
    let text = fs::read_to_string(bundled()).unwrap().replace("\"a\": 1.0", "\"a\": 0.1");
    let cfg = dir.path().join("small-a.json");
    fs::write(&cfg, text).unwrap();
    let res = run(&["--out", dir.path().join("out").to_str().unwrap(), "run", cfg.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(5));
}

#[test]
fn subcommands_write_their_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &str); 6] = [
        (&["sweep", "--count", "60"], "sweep.csv"),
        (&["bounds", "--r", "20.5"], "strip.json"),
        (&["lacuna", "--r", "20.5"], "wa.json"),
        (&["det", "--r", "20.5"], "det_bounds.json"),
        (&["gallery", "--kind", "condensing"], "perturbation.bin"),
        (&["gallery", "--kind", "periodic", "--mapping", "folded"], "spectrum.json"),
    ];
    for (i, (args, file)) in cases.iter().enumerate() {
        let out = dir.path().join(format!("c{i}"));
        let mut full = vec!["--trunc", "64", "--seed", "3", "--out", out.to_str().unwrap()];
        full.extend_from_slice(args);
        let res = run(&full);
        assert_eq!(res.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&res.stderr));
        assert!(out.join(file).exists(), "{args:?} did not write {file}");
        let line = String::from_utf8(res.stdout).unwrap();
        serde_json::from_str::<serde_json::Value>(line.trim()).expect("one JSON summary line");
    }
}

#[test]
fn counterexample_reports_column_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cx");
    let res = run(&["--out", out.to_str().unwrap(), "counterexample", "--truncations", "16,32", "--betas", "0"]);
    assert!(matches!(res.status.code(), Some(0 | 1)));
    let rep: serde_json::Value = serde_json::from_slice(&fs::read(out.join("counterexample.json")).unwrap()).unwrap();
    assert_eq!(rep["column_norms_bounded"], true);
}
