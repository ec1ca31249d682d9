use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn s1data(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_s1data"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_cp3_piped_into_reduce() {
    let data = s1data(&["gen", "cp3", "1", "2", "3"], "");
    assert_eq!(data.status.code(), Some(0));
    let cert = s1data(&["reduce", "-"], &stdout(&data));
    assert_eq!(cert.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&cert)).unwrap();
    let kinds: Vec<&str> = doc["steps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["kind"].as_str().unwrap())
        .collect();
    assert_eq!(kinds, ["OP2", "OP1", "OP1"]);
}

#[test]
fn validate_single_point() {
    let out = s1data(&["validate", "-"], "+ 1 2 3\n");
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("FAIL sign_balance"), "{text}");
    assert!(text.contains("FAIL weight_parity"), "{text}");
}

#[test]
fn validate_json_report() {
    let out = s1data(&["validate", "--json", "-"], "+ 2 4 6\n- 2 4 6\n");
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["overall"], true);
    assert_eq!(v["divisor"], 2);
    assert_eq!(v["checks"].as_array().unwrap().len(), 6);
}

#[test]
fn validate_parse_error() {
    let out = s1data(&["validate", "-"], "# header\n+ 0 1 2\n");
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn fuzz_example_run() {
    let out = s1data(
        &["fuzz", "--seed", "7", "--iterations", "100", "--max-summands", "6", "--max-param", "8"],
        "",
    );
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("100 passed"));
}

#[test]
fn certificate_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("z.txt");
    let cert = dir.path().join("z.json");
    let out = s1data(&["gen", "z2sum", "7", "3", "--reverse", "-o", path(&data)], "");
    assert_eq!(out.status.code(), Some(0));
    let out = s1data(&["reduce", path(&data), "--cert", path(&cert)], "");
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("reduced 10 points"), "{}", stdout(&out));
    let out = s1data(&["reduce", path(&data), "--cert", path(&cert), "--quiet"], "");
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let out = s1data(&["verify", path(&cert)], "");
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));

    let text = std::fs::read_to_string(&cert).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["steps"][0]["added"][0] = serde_json::json!("+ 99 1 1");
    let out = s1data(&["verify", "-"], &doc.to_string());
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("rejected"));
}

#[test]
fn connect_two_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    std::fs::write(&a, "+ 3 2 1\n+ 2 1 1\n- 3 2 1\n- 2 1 1\n").unwrap();
    std::fs::write(&b, "+ 3 2 1\n- 3 2 1\n").unwrap();
    let out = s1data(&["connect", path(&a), path(&b), "--pair", "+3 2 1=-3 2 1"], "");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "+ 3 2 1\n+ 2 1 1\n- 3 2 1\n- 2 1 1\n");
    let out = s1data(&["connect", path(&a), path(&b), "--pair", "+ 2 1 1=- 2 1 1"], "");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    assert_eq!(s1data(&[], "").status.code(), Some(64));
    assert_eq!(s1data(&["validate"], "").status.code(), Some(64));
    assert_eq!(s1data(&["verify", "/no/such/certificate"], "").status.code(), Some(66));
    assert_eq!(s1data(&["reduce", "-"], "+ 1 2 3\n").status.code(), Some(1));
    assert_eq!(
        s1data(&["reduce", "-"], "+ 3 3 2\n+ 3 3 1\n+ 3 2 2\n- 4 3 2\n- 4 3 2\n- 3 2 1\n")
            .status
            .code(),
        Some(3)
    );
    assert_eq!(s1data(&["gen", "zn", "1", "2", "2", "1"], "").status.code(), Some(1));
}
