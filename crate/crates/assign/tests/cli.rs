use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_walsh-assign"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden_bytes(kind: &str, k: &str, n: &str, golden: &str) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.wam");
    let o = run(&["generate", kind, k, n, "-o", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(
        std::fs::read(&out).unwrap(),
        std::fs::read(data(golden)).unwrap()
    );
}

#[test]
fn generate_golden_files() {
    golden_bytes("banded", "5", "10", "golden/banded_5_10.wam");
    golden_bytes("augmented", "6", "10", "golden/augmented_6_10.wam");
}

#[test]
fn generate_prints_stats() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.wam");
    let o = run(&["generate", "banded", "5", "10", "-o", out.to_str().unwrap()]);
    assert_eq!(stdout(&o), "N: 30\nl_max: 3\nlower_bound: 30\n");
}

#[test]
fn generate_rejects_even_banded_without_writing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.wam");
    let o = run(&["generate", "banded", "4", "8", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("k must be odd"));
    assert!(!out.exists());
}

#[test]
fn verify_exit_codes() {
    let golden = data("golden/banded_5_10.wam");
    for method in ["auto", "exhaustive", "bruteforce"] {
        let o = run(&["verify", golden.to_str().unwrap(), "--method", method]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o), "HOLDS\n");
    }
    let o = run(&["verify", data("data/null_column.wam").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "FAILS rows=1,2,3 cols=1,2\n");

    let o = run(&["verify", data("data/truncated.wam").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 5"));
}

#[test]
fn verify_structured() {
    let o = run(&[
        "--format",
        "structured",
        "verify",
        data("data/null_column.wam").to_str().unwrap(),
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["holds"], false);
    assert_eq!(v["witness"]["rows"], serde_json::json!([1, 2, 3]));
}

fn parse_pairs(text: &str) -> Vec<(usize, usize)> {
    text.lines()
        .filter(|l| l.starts_with("user "))
        .map(|l| {
            let parts: Vec<&str> = l.split_whitespace().collect();
            (parts[1].parse().unwrap(), parts[4].parse().unwrap())
        })
        .collect()
}

#[test]
fn assign_fast_path_with_trace() {
    let path = data("golden/banded_5_10.wam");
    let o = run(&["assign", path.to_str().unwrap(), "1,6,2,3,4", "--trace"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let pairs = parse_pairs(&text);
    assert_eq!(pairs.len(), 5);
    let m = walsh_assign::format::load_matrix(&path).unwrap();
    let mut codes: Vec<usize> = pairs.iter().map(|p| p.1).collect();
    codes.sort_unstable();
    assert_eq!(codes, vec![1, 2, 3, 4, 5]);
    assert!(pairs.iter().all(|&(u, c)| m.get(u - 1, c - 1)));
    assert!(text.contains("move row 6 : slot 6 -> slot 2\n"));
}

#[test]
fn assign_augmented() {
    let path = data("golden/augmented_6_10.wam");
    let o = run(&["assign", path.to_str().unwrap(), "1,2,3,4,5,6"]);
    assert!(o.status.success());
    assert_eq!(parse_pairs(&stdout(&o)).len(), 6);
}

#[test]
fn assign_reports_violation() {
    let o = run(&[
        "assign",
        data("data/null_column.wam").to_str().unwrap(),
        "1,2,3",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAILS rows="));
    let o = run(&[
        "assign",
        data("data/null_column.wam").to_str().unwrap(),
        "1,x",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bounds_reports() {
    let o = run(&["bounds", data("golden/banded_5_10.wam").to_str().unwrap()]);
    assert!(stdout(&o).contains("optimal: true\n"));
    let o = run(&[
        "bounds",
        data("golden/augmented_6_10.wam").to_str().unwrap(),
    ]);
    assert!(stdout(&o).contains("ratio: 7/6\n"));
}

#[test]
fn simulate_is_deterministic() {
    let cfg = data("data/two_pools.toml");
    let a = run(&["--format", "structured", "simulate", cfg.to_str().unwrap()]);
    let b = run(&["--format", "structured", "simulate", cfg.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let lines: Vec<&str> = std::str::from_utf8(&a.stdout).unwrap().lines().collect();
    assert_eq!(lines.len(), 2001);
    let summary: serde_json::Value = serde_json::from_str(lines[2000]).unwrap();
    assert_eq!(summary["summary"]["failures"], 0);

    let c = run(&[
        "--format",
        "structured",
        "simulate",
        cfg.to_str().unwrap(),
        "--seed",
        "5",
    ]);
    assert_ne!(a.stdout, c.stdout);
    let text = run(&["simulate", cfg.to_str().unwrap()]);
    assert!(stdout(&text).contains("failures: 0\n"));
}

#[test]
fn table_input_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let wat = dir.path().join("m.wat");
    std::fs::write(&wat, "3 3\n1: 1 2\n2: 2 3\n3: 1 3\n").unwrap();
    let o = run(&["verify", wat.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}
