use std::process::Command;

fn lrtrace() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lrtrace"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = lrtrace().args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn weights_then_trace_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lift.json");
    let path = path.to_str().unwrap();
    let (code, _, err) = run(&["weights", "--b0", "0.7,-1.2", "--sign", "-", "--output", path]);
    assert_eq!(code, 0, "{err}");

    let (code, from_file, err) = run(&["trace", "--lift", path, "--n", "21:25"]);
    assert_eq!(code, 0, "{err}");
    let (_, direct, _) = run(&["trace", "--b0", "0.7,-1.2", "--sign", "-", "--n", "21:25"]);
    assert_eq!(from_file, direct);
    assert_eq!(from_file.lines().count(), 4);
    assert!(from_file.starts_with("n,n_mod_4,modulus"));
}

#[test]
fn trace_json_output() {
    let (code, out, _) = run(&["trace", "--n", "101", "--format", "json"]);
    assert_eq!(code, 0);
    let rows: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(rows[0]["n"], 101);
    assert_eq!(rows[0]["congruence"], 1);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["trace", "--n", "100"]).0, 2);
    assert_eq!(run(&["trace", "--n", "9001"]).0, 3);
    assert_eq!(run(&["trace", "--n", "103", "--n-cap", "101"]).0, 3);
    assert_eq!(run(&["trace", "--n", "8193", "--n-cap", "8193"]).0, 0);
    assert_eq!(run(&["trace", "--n", "8677", "--n-cap", "9001"]).0, 3);
    assert_eq!(run(&["converge", "--n", "401:801:400", "--class", "3"]).0, 2);
    assert_eq!(run(&["weights", "--b0", "-1,0"]).0, 2);
    assert_eq!(run(&["verify", "--only", "nothing-matches"]).0, 2);
    assert_eq!(run(&["verify", "--only", "8", "--mutation", "swap-parity"]).0, 1);
}

#[test]
fn verify_only_dq() {
    let (code, out, _) = run(&["verify", "--only", "dq"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines.iter().all(|l| l.starts_with("[PASS]")));
}

#[test]
fn cloud_csv_has_header_and_rows() {
    let (code, out, _) = run(&["cloud", "--n", "33", "--gnuplot"]);
    assert_eq!(code, 0);
    let data: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "index1,re,im");
    assert_eq!(data.len(), 34);
    assert!(out.starts_with('#'));

    let (code, out, _) = run(&["cloud", "--source", "word", "--b0", "example-llr", "--n", "5"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("index1,index2,index3,re,im"));
    assert_eq!(out.lines().count(), 1 + 125);
}
