use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn q2sat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_q2sat"))
        .args(args)
        .output()
        .expect("run q2sat")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn put(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SINGLET: &str = "q2sat 1\nfield poly 0 1\nqubits 2\n\
constraint 0 1 1:1 1:0 1:0 1:0\nconstraint 0 1 1:0 1:0 1:0 1:1\nconstraint 0 1 1:1 1:1 1:1 1:1\n";

const RANK4: &str = "q2sat 1\nfield poly 0 1\nqubits 2\n\
constraint 0 1 1:1 1:0 1:0 1:0\nconstraint 0 1 1:0 1:1 1:0 1:0\nconstraint 0 1 1:0 1:0 1:1 1:0\nconstraint 0 1 1:0 1:0 1:0 1:1\n";

#[test]
fn solve_singlet_writes_pair_line() {
    let dir = TempDir::new().unwrap();
    let inst = put(&dir, "singlet.q2s", SINGLET);
    let out = dir.path().join("singlet.out");
    let o = q2sat(&["solve", s(&inst), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("pair 0 1 "), "{text}");
}

#[test]
fn solve_rank_four_is_unsat() {
    let dir = TempDir::new().unwrap();
    let inst = put(&dir, "rank4.q2s", RANK4);
    let o = q2sat(&["solve", s(&inst)]);
    assert_eq!(code(&o), 1);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "UNSAT");
}

#[test]
fn solve_missing_file_is_input_error() {
    let o = q2sat(&["solve", "/nonexistent/instance.q2s"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn solve_malformed_instance_is_input_error() {
    let dir = TempDir::new().unwrap();
    let inst = put(
        &dir,
        "bad.q2s",
        "q2sat 1\nfield poly 0 1\nqubits 2\nconstraint 0 1 1 0\n",
    );
    assert_eq!(code(&q2sat(&["solve", s(&inst)])), 2);
}

#[test]
fn metrics_json_report() {
    let dir = TempDir::new().unwrap();
    let inst = put(&dir, "singlet.q2s", SINGLET);
    let o = q2sat(&["solve", s(&inst), "--metrics", "json", "--no-fastpath"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    assert_eq!(v["decision"], "SAT");
    assert!(v["metrics"]["field_ops"].as_u64().unwrap() > 0);
    assert!(v["metrics"].get("edge_traversals").is_some());
}

#[test]
fn verify_round_trip_and_tampering() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("rand.q2s");
    let o = q2sat(&[
        "gen",
        "random",
        "--qubits",
        "6",
        "--constraints",
        "7",
        "--planted",
        "--seed",
        "3",
        "--out",
        s(&inst),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let asg = dir.path().join("rand.out");
    assert_eq!(code(&q2sat(&["solve", s(&inst), "--out", s(&asg)])), 0);
    assert_eq!(code(&q2sat(&["verify", s(&inst), s(&asg)])), 0);

    // swap the two amplitudes of a qubit line until a constraint breaks
    let text = fs::read_to_string(&asg).unwrap();
    let mut broke = false;
    for (i, line) in text.lines().enumerate() {
        let t: Vec<&str> = line.split_whitespace().collect();
        if t[0] != "qubit" || t[3] == t[4] {
            continue;
        }
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        lines[i] = format!("qubit {} {} {} {}", t[1], t[2], t[4], t[3]);
        let bad = put(&dir, "tampered.out", &(lines.join("\n") + "\n"));
        let o = q2sat(&["verify", s(&inst), s(&bad)]);
        if code(&o) == 1 {
            assert!(stderr(&o).contains("constraint"), "{}", stderr(&o));
            broke = true;
            break;
        }
    }
    assert!(broke, "no tampering was detected");
}

#[test]
fn verify_wrong_qubit_count_is_input_error() {
    let dir = TempDir::new().unwrap();
    let inst = put(&dir, "singlet.q2s", SINGLET);
    let asg = put(
        &dir,
        "three.out",
        "qubit 0 [] 1:1 1:0\nqubit 1 [] 1:1 1:0\nqubit 2 [] 1:1 1:0\n",
    );
    assert_eq!(code(&q2sat(&["verify", s(&inst), s(&asg)])), 2);
    let short = put(&dir, "one.out", "qubit 0 [] 1:1 1:0\n");
    assert_eq!(code(&q2sat(&["verify", s(&inst), s(&short)])), 2);
}

#[test]
fn verify_missing_file_is_input_error() {
    let dir = TempDir::new().unwrap();
    let inst = put(&dir, "singlet.q2s", SINGLET);
    assert_eq!(code(&q2sat(&["verify", s(&inst), "/nonexistent.out"])), 2);
}

#[test]
fn gen_lowerbound_full_counts() {
    let o = q2sat(&[
        "gen",
        "lowerbound-full",
        "--bits",
        "4",
        "--m",
        "11",
        "--n",
        "13",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("qubits 10\n"));
    assert_eq!(
        text.lines().filter(|l| l.starts_with("constraint")).count(),
        10
    );
}

#[test]
fn gen_lowerbound_rejects_even_parameter() {
    let o = q2sat(&["gen", "lowerbound-chain", "--bits", "4", "--m", "12"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn gen_cnf_import_one_constraint_per_clause() {
    let dir = TempDir::new().unwrap();
    let cnf = put(&dir, "f.cnf", "c demo\np cnf 3 3\n1 2 0\n-2 3 0\n-1 -3 0\n");
    let o = q2sat(&["gen", "cnf-import", s(&cnf)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(
        text.lines().filter(|l| l.starts_with("constraint")).count(),
        3
    );
}

#[test]
fn gen_random_is_deterministic() {
    let args = [
        "gen",
        "random",
        "--qubits",
        "9",
        "--constraints",
        "14",
        "--gaussian",
        "--seed",
        "42",
    ];
    let a = q2sat(&args);
    let b = q2sat(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = q2sat(&[
        "gen",
        "random",
        "--qubits",
        "9",
        "--constraints",
        "14",
        "--gaussian",
        "--seed",
        "43",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn bench_csv_rows() {
    let o = q2sat(&["bench", "chain", "--sizes", "100,200,400"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 3);
    let traversals: Vec<u64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(traversals.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn bench_classical_bits_constant() {
    let o = q2sat(&["bench", "classical", "--sizes", "50,500"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let bits: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(6).unwrap())
        .collect();
    assert_eq!(bits[0], bits[1]);
}

#[test]
fn bench_unknown_family_is_error() {
    assert_eq!(code(&q2sat(&["bench", "nonsense"])), 2);
}
