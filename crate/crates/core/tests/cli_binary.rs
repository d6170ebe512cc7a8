use std::process::{Command, Output};

fn sqfactor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqfactor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn factor_exit_codes() {
    let o = sqfactor(&["factor", "187"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "p=11 q=17 k=0 iterations=0\n");

    let o = sqfactor(&["factor", "17"]);
    assert_eq!(o.status.code(), Some(2));

    let o = sqfactor(&["factor", "-5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());

    let o = sqfactor(&["factor", "0xBB"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "p=11 q=17 k=0 iterations=0\n");
}

#[test]
fn budget_exhaustion_resumes_through_a_file() {
    let n = (1_000_003u64 * 1_100_009).to_string();
    let o = sqfactor(&["factor", &n, "--max-iterations", "10"]);
    assert_eq!(o.status.code(), Some(3));
    let checkpoint = String::from_utf8(o.stderr).unwrap();
    assert!(checkpoint.starts_with(&format!("n={n} ")), "{checkpoint}");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.txt");
    std::fs::write(&path, &checkpoint).unwrap();
    let o = sqfactor(&["factor", "--resume", path.to_str().unwrap(), "--no-limit"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("p=1000003 q=1100009 "), "{}", stdout(&o));
}

#[test]
fn json_mode_prints_one_document() {
    let o = sqfactor(&["factor", "187", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["p"], "11");

    let o = sqfactor(&["generate", "--bits", "32", "--max-gap", "2^10", "--seed", "1", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["n"].is_string());
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(sqfactor(&["--help"]).status.code(), Some(0));
    assert_eq!(sqfactor(&["factor"]).status.code(), Some(1));
    assert_eq!(sqfactor(&["frobnicate"]).status.code(), Some(1));
}
