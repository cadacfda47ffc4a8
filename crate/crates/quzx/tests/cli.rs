use std::path::Path;
use std::process::{Command, Output};

use quzx::io::{diagram_to_json, Matrix};
use quzx::{Diagram, PhaseVector, C64};

fn quzx(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quzx"))
        .args(args)
        .current_dir(dir)
        .env_remove("QUZX_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn synth_then_roundtrip_identity() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("i2.json"), Matrix::identity(2).to_json()).unwrap();
    let s = quzx(&["synth", "i2.json", "-o", "i2d.json"], dir.path());
    assert_eq!(s.status.code(), Some(0), "{}", String::from_utf8_lossy(&s.stderr));
    let r = quzx(&["roundtrip", "i2.json", "--diagram", "i2d.json", "--tol", "1e-12"], dir.path());
    assert_eq!(r.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&r)).unwrap();
    assert!(v["max_dev"].as_f64().unwrap() < 1e-12);
    assert_eq!(v["pass"], true);
}

#[test]
fn roundtrip_against_wrong_matrix_fails() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("i2.json"), Matrix::identity(2).to_json()).unwrap();
    let m = Matrix::new(2, 2, vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
    std::fs::write(dir.path().join("x.json"), m.to_json()).unwrap();
    quzx(&["synth", "i2.json", "-o", "i2d.json"], dir.path());
    let r = quzx(&["roundtrip", "x.json", "--diagram", "i2d.json"], dir.path());
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn eval_over_cap_exits_nonzero_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    // One spider with 11 outputs at d = 3 has 177147 entries.
    let big = Diagram::z(PhaseVector::ones(3), 0, 11).unwrap();
    std::fs::write(dir.path().join("big.json"), diagram_to_json(&big)).unwrap();
    let o = quzx(&["eval", "big.json", "--cap", "65536"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("cap exceeded"), "{err}");

    let env = Command::new(env!("CARGO_BIN_EXE_quzx"))
        .args(["eval", "big.json"])
        .current_dir(dir.path())
        .env("QUZX_CAP", "65536")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(2));
    assert_eq!(quzx(&["eval", "big.json"], dir.path()).status.code(), Some(0));
}

#[test]
fn config_invariants_are_enforced() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["verify-rules", "--d", "1,2"][..],
        &["verify-rules", "--d", "17"],
        &["lemmas", "--tol", "0"],
        &["verify-rules", "--cap", "1000"],
    ] {
        let o = quzx(args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn malformed_input_is_diagnosed() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\"version\": \"1\", \"nodes\": [{\"id\": 0}]").unwrap();
    let o = quzx(&["eval", "bad.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.json"));
    assert_eq!(quzx(&["eval", "missing.json"], dir.path()).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = quzx(&["verify-rules", "--d", "2,3", "--trials", "2", "--seed", "7"], dir.path());
    let b = quzx(&["verify-rules", "--d", "2..3", "--trials", "2", "--seed", "7"], dir.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["summary"]["failed"], 0);
}

#[test]
fn verify_writes_json_and_prints_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = quzx(&["lemmas", "--d", "2", "--trials", "1", "--format", "table", "-o", "r.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("passed"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert!(v["entries"].as_array().unwrap().len() >= 40);
}

#[test]
fn simplify_writes_a_replayable_trace() {
    let dir = tempfile::tempdir().unwrap();
    let z = Diagram::z(PhaseVector::ones(3), 1, 1).unwrap();
    let chain = z.compose_seq(&z).unwrap().compose_seq(&z).unwrap();
    std::fs::write(dir.path().join("c.json"), diagram_to_json(&chain)).unwrap();
    let o = quzx(&["simplify", "c.json", "--trace", "t.json", "-o", "s.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let steps = quzx::rewrite::Trace::from_json(&std::fs::read_to_string(dir.path().join("t.json")).unwrap()).unwrap();
    let replayed = quzx::rewrite::replay(&chain, &steps).unwrap();
    let out = std::fs::read_to_string(dir.path().join("s.json")).unwrap();
    assert_eq!(diagram_to_json(&replayed), out);
}

#[test]
fn eval_matches_golden_dump() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let o = quzx(&["eval", "hadamard_d3.json"], &golden);
    assert_eq!(o.status.code(), Some(0));
    let want = std::fs::read_to_string(golden.join("hadamard_d3.tensor.json")).unwrap();
    assert_eq!(stdout(&o), want);
}
