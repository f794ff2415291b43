use std::path::Path;
use std::process::{Command, Output};

fn abr_sim(args: &[&str], dir: &Path) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_abr-sim"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "abr-sim {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn end_to_end_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    abr_sim(&["gen", "trace", "--duration-s", "600", "--seed", "3", "--out", "a.csv"], d);
    abr_sim(&["gen", "trace", "--duration-s", "600", "--seed", "4", "--out", "b.csv"], d);
    abr_sim(&["concat-traces", "a.csv", "b.csv", "--out", "ab.csv"], d);
    let rows = std::fs::read_to_string(d.join("ab.csv")).unwrap().lines().count();
    assert_eq!(rows, 1 + 600 + 600);
    abr_sim(&["gen", "manifest", "--segments", "200", "--jitter", "0.1", "--out", "m.json"], d);

    let report = abr_sim(&["run", "--manifest", "m.json", "--trace", "ab.csv", "--beta", "0.3", "--out", "run"], d);
    let report: serde_json::Value = serde_json::from_slice(&report.stdout).unwrap();
    assert_eq!(report["method"], "l2a-b0.3");
    assert_eq!(report["horizon"], 200);
    for ext in ["json", "log.csv", "convergence.csv"] {
        let file = d.join("run").join(format!("l2a-b0.3__{}.{ext}", report["trace"].as_str().unwrap()));
        assert!(file.exists(), "missing {}", file.display());
    }

    let log = abr_sim(&["run", "--manifest", "m.json", "--trace", "ab.csv", "--abr", "bb", "--format", "csv"], d);
    let log = String::from_utf8(log.stdout).unwrap();
    assert!(log.starts_with("t,x_t,r_kbps,size_kbit,C_kbps"));
    assert_eq!(log.lines().count(), 201);
    std::fs::write(d.join("bb.csv"), &log).unwrap();

    let bench = abr_sim(&["benchmark", "--manifest", "m.json", "--log", "bb.csv", "--mode", "disjoint"], d);
    let bench: serde_json::Value = serde_json::from_slice(&bench.stdout).unwrap();
    let omega: Vec<f64> = serde_json::from_value(bench["omega_star"].clone()).unwrap();
    assert_eq!(omega.len(), 8);
    assert!((omega.iter().sum::<f64>() - 1.0).abs() <= 1e-5);
}

#[test]
fn bad_input_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_abr-sim"))
        .args(["run", "--manifest", "missing.json", "--trace", "missing.csv"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}
