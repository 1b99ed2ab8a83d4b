use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_toric-manin"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn validate_bundled_fan() {
    let (code, out, _) = run(&["validate", "--fan", "bl2p2"]);
    assert_eq!(code, 0);
    assert!(out.contains("smooth") && out.contains("true"));
}

#[test]
fn invalid_fan_exits_one() {
    let dir = std::env::temp_dir().join(format!("toric-manin-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, r#"{"rays": [[1, 0], [0, 1], [1, 1]], "cones": [[0, 1], [0, 2]]}"#).unwrap();
    let (code, _, err) = run(&["validate", "--fan", path.to_str().unwrap()]);
    assert_eq!(code, 1, "{err}");
    let (code, _, _) = run(&["validate", "--fan", "no-such-fan"]);
    assert_eq!(code, 1);
}

#[test]
fn predict_json() {
    let (code, out, _) = run(&["--format", "json", "predict", "--fan", "bl2p2", "--face", "inf=3,4"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["prediction"]["b"], 2);
}

#[test]
fn count_affine_line_with_verdict() {
    let dir = std::env::temp_dir().join(format!("toric-manin-cli-line-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("line.csv");
    let (code, out, err) = run(&[
        "count", "--fan", "p1", "--tmax", "1000000", "--workers", "1", "--expect", "1,1", "--out", csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{out}{err}");
    assert!(out.contains("PASS"));
    let (code, out, _) = run(&["fit", "--records", csv.to_str().unwrap(), "--expect", "2,1"]);
    assert_eq!(code, 3);
    assert!(out.contains("FAIL"));
}

#[test]
fn bad_schedule_is_invalid_input() {
    let (code, _, _) = run(&["count", "--fan", "p1", "--schedule", "10,5,20"]);
    assert_eq!(code, 1);
}
