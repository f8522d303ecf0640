use std::process::Command;

use serde_json::Value;

fn gkz(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gkz"))
        .args(args)
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8_lossy(&out.stdout).to_string();
    let value = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (
        out.status.code().unwrap_or(-1),
        value,
        String::from_utf8_lossy(&out.stderr).to_string(),
    )
}

#[test]
fn build_prints_matrix() {
    let (code, v, _) = gkz(&["build", "--instance", "p1-elliptic"]);
    assert_eq!(code, 0);
    assert_eq!(v["matrix"], serde_json::json!([[1, 1, 1], [0, 1, -1]]));
    assert_eq!(v["beta"], serde_json::json!(["-1/2", "0"]));
}

#[test]
fn resonant_beta_exits_nonzero() {
    let (code, v, stderr) = gkz(&["check", "--instance", "p1-elliptic", "--beta", "0,0"]);
    assert_eq!(code, 1);
    assert_eq!(v["non_resonant"], Value::Bool(false));
    assert!(stderr.contains("FAIL"));
}

#[test]
fn solve_writes_json_file() {
    let dir = std::env::temp_dir().join(format!("gkz-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("sols.json");
    let (code, _, _) = gkz(&[
        "solve",
        "--instance",
        "p1-elliptic",
        "--json",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let sols = v["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 2);
    assert_eq!(sols[0]["basis_element"], "1");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn instance_file_and_schema_errors() {
    let dir = std::env::temp_dir().join(format!("gkz-cli-inst-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.json");
    std::fs::write(
        &good,
        r#"{"name": "line", "nabla": {"dim": 1, "parts": [[[0], [1], [-1]]]}, "options": {"order": 2}}"#,
    )
    .unwrap();
    let (code, v, _) = gkz(&["verify", "--instance", good.to_str().unwrap()]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["order"], 2);

    let bad = dir.join("bad.json");
    std::fs::write(
        &bad,
        r#"{"name": "x", "nabla": {"dim": 1, "parts": [[["a"]]]}}"#,
    )
    .unwrap();
    let (code, _, stderr) = gkz(&["build", "--instance", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("nabla.parts[0][0][0]"), "{stderr}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_instance_is_an_error() {
    let (code, _, stderr) = gkz(&["build", "--instance", "/nonexistent/instance.json"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("cannot read"));
}

#[test]
fn order_zero_warns() {
    let (code, _, stderr) = gkz(&["verify", "--instance", "p1-elliptic", "--order", "0"]);
    assert_eq!(code, 0);
    assert!(stderr.contains("warning"));
}

fn raw(args: &[&str]) -> Vec<u8> {
    Command::new(env!("CARGO_BIN_EXE_gkz"))
        .args(args)
        .output()
        .expect("binary runs")
        .stdout
}

#[test]
fn outputs_match_golden_files() {
    let golden = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for (cmd, inst) in [
        ("build", "p1-elliptic"),
        ("build", "p3-8planes"),
        ("dualize", "p1-elliptic"),
        ("dualize", "p3-8planes"),
        ("solve", "p1-elliptic"),
    ] {
        let want = std::fs::read_to_string(golden.join(format!("{inst}.{cmd}.json"))).unwrap();
        let got = String::from_utf8(raw(&[cmd, "--instance", inst])).unwrap();
        assert_eq!(got, want, "{cmd} {inst}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    for args in [
        ["check", "--instance", "p3-8planes"],
        ["oracle", "--instance", "p3-8planes"],
        ["verify", "--instance", "p1-elliptic"],
    ] {
        assert_eq!(raw(&args), raw(&args), "{args:?}");
    }
}

#[test]
fn p3_nablas_as_printed() {
    let (code, v, _) = gkz(&["dualize", "--instance", "p3-8planes"]);
    assert_eq!(code, 0);
    let printed = [
        [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]],
        [[0, 0, 0], [-1, 0, 0], [-1, 1, 0], [-1, 0, 1]],
        [[0, 0, 0], [0, -1, 0], [1, -1, 0], [0, -1, 1]],
        [[0, 0, 0], [0, 0, -1], [1, 0, -1], [0, 1, -1]],
    ];
    for (i, want) in printed.iter().enumerate() {
        let mut got: Vec<Vec<i64>> = serde_json::from_value(v["nabla"][i].clone()).unwrap();
        let mut want: Vec<Vec<i64>> = want.iter().map(|p| p.to_vec()).collect();
        got.sort();
        want.sort();
        assert_eq!(got, want, "nabla {}", i + 1);
    }
    assert_eq!(v["delta_reflexive"], Value::Bool(true));
    assert_eq!(v["nabla_sum_reflexive"], Value::Bool(true));
}

#[test]
fn degmax_option_alias() {
    let dir = std::env::temp_dir().join(format!("gkz-cli-degmax-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let f = dir.join("i.json");
    std::fs::write(&f, r#"{"name": "line", "nabla": {"dim": 1, "parts": [[[0], [1], [-1]]]}, "options": {"degmax": 6, "seed": 3}}"#).unwrap();
    let (code, v, _) = gkz(&["solve", "--instance", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["order"], 6);
    std::fs::remove_dir_all(&dir).ok();
}
