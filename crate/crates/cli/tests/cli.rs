use std::path::Path;
use std::process::{Command, Output};

fn certlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_certlab"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn fig1_prints_eleven_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = certlab(dir.path(), &["fig1", "--csv", "fig1.csv"]);
    assert!(o.status.success());
    let rows: Vec<String> = stdout(&o).lines().skip(2).map(String::from).collect();
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[10].split_whitespace().collect::<Vec<_>>(), ["10", "1"]);
    let csv = std::fs::read_to_string(dir.path().join("fig1.csv")).unwrap();
    assert!(csv.starts_with("delta,g_steps\n0,1024\n1,512\n"));
    assert!(csv.ends_with("10,1\n"));
}

#[test]
fn run_an_assembled_verifier() {
    let dir = tempfile::tempdir().unwrap();
    let o = certlab(
        dir.path(),
        &[
            "assemble",
            "--shipped",
            "periodic_verifier",
            "--out",
            "periodic.tm",
        ],
    );
    assert!(o.status.success());
    let o = certlab(
        dir.path(),
        &[
            "run",
            "--machine",
            "periodic.tm",
            "--input",
            "abab",
            "--cert",
            "10",
            "--fuel",
            "100000",
        ],
    );
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("accepted"));
    assert!(out.contains("steps: 65"));
    let o = certlab(
        dir.path(),
        &[
            "run",
            "--machine",
            "periodic.tm",
            "--input",
            "abab",
            "--cert",
            "11",
            "--fuel",
            "100000",
        ],
    );
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("rejected"));
}

#[test]
fn tmir_files_are_assembled_on_load() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("first.tmir"),
        "name: first\ntape in input a b\ntape cert certificate 0 1\n\n        branch cert 1->accept\n        reject\n",
    )
    .unwrap();
    let o = certlab(
        dir.path(),
        &[
            "run",
            "--machine",
            "first.tmir",
            "--input",
            "ab",
            "--cert",
            "1",
            "--fuel",
            "10",
            "--trace",
            "5",
        ],
    );
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("accepted"));
    assert!(out.lines().next().unwrap().trim_start().starts_with('0'));
}

#[test]
fn bench_then_check_bound() {
    let dir = tempfile::tempdir().unwrap();
    let o = certlab(
        dir.path(),
        &[
            "bench",
            "--problem",
            "periodic",
            "--n",
            "8..32:x2",
            "--instances",
            "3",
            "--roles",
            "verifier,naive-solver",
            "--csv",
            "p.csv",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(
        stdout(&o).starts_with("# problem=periodic roles=verifier,naive-solver instances=3 seed=20240607\n")
    );
    let csv = std::fs::read_to_string(dir.path().join("p.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 3 * 3);

    let o = certlab(
        dir.path(),
        &["check-bound", "--solver-csv", "p.csv", "--verifier-csv", "p.csv"],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("PASS\n"));

    let o = certlab(
        dir.path(),
        &[
            "check-bound",
            "--solver-csv",
            "p.csv",
            "--verifier-csv",
            "p.csv",
            "--tolerance-bits",
            "-5",
        ],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).ends_with("FAIL\n"));
}

#[test]
fn sweeps_do_not_depend_on_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "bench",
        "--problem",
        "rotation",
        "--n",
        "4..16:x2",
        "--roles",
        "verifier,naive-solver",
    ];
    let a = certlab(dir.path(), &[&args[..], &["--csv", "a.csv"]].concat());
    let b = certlab(
        dir.path(),
        &[&args[..], &["--csv", "b.csv", "--jobs", "3"]].concat(),
    );
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(
        std::fs::read(dir.path().join("a.csv")).unwrap(),
        std::fs::read(dir.path().join("b.csv")).unwrap()
    );
}

#[test]
fn solve_with_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = certlab(
        dir.path(),
        &[
            "solve",
            "--problem",
            "sat3",
            "--role",
            "enum",
            "--n",
            "4..6",
            "--instances",
            "2",
            "--csv",
            "s.json",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let json = std::fs::read_to_string(dir.path().join("s.json")).unwrap();
    assert!(json.trim_start().starts_with('['));
    assert!(json.contains("\"role\": \"enum-solver\""));
}

#[test]
fn blowup_on_an_unsatisfiable_formula() {
    let dir = tempfile::tempdir().unwrap();
    // every assignment of x1, x2, x3 falsifies one clause
    let mut cnf = String::from("p cnf 4 8\n");
    for a in 0..8 {
        let lits: Vec<String> = (0..3)
            .map(|i| {
                if a >> i & 1 == 1 {
                    format!("-{}", i + 1)
                } else {
                    format!("{}", i + 1)
                }
            })
            .collect();
        cnf.push_str(&format!("{} 0\n", lits.join(" ")));
    }
    std::fs::write(dir.path().join("u.cnf"), cnf).unwrap();
    let o = certlab(dir.path(), &["blowup", "--cnf", "u.cnf", "--missing", "0..4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let candidates: Vec<u64> = stdout(&o)
        .lines()
        .skip(2)
        .map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(candidates, [1, 2, 4, 8, 16]);

    std::fs::write(dir.path().join("s.cnf"), "p cnf 3 1\n1 2 3 0\n").unwrap();
    let o = certlab(dir.path(), &["blowup", "--cnf", "s.cnf", "--missing", "0..2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn entropy_reports_a_slope() {
    let dir = tempfile::tempdir().unwrap();
    let o = certlab(
        dir.path(),
        &[
            "entropy",
            "--n",
            "8..12:2",
            "--samples",
            "20",
            "--seed",
            "3",
            "--csv",
            "e.csv",
        ],
    );
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("# samples=20 seed=3\n"));
    assert!(out.contains("slope: "));
    let csv = std::fs::read_to_string(dir.path().join("e.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn compile_one_tape_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    assert!(certlab(
        dir.path(),
        &["assemble", "--shipped", "periodic_verifier", "--out", "p.tm"]
    )
    .status
    .success());
    let o = certlab(
        dir.path(),
        &["compile-1tape", "--machine", "p.tm", "--out", "p1.tm"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = certlab(
        dir.path(),
        &[
            "run",
            "--machine",
            "p1.tm",
            "--input",
            "abab",
            "--cert",
            "10",
            "--fuel",
            "1000000",
        ],
    );
    assert_eq!(stdout(&o).lines().next(), Some("accepted"));
}

#[test]
fn usage_and_encoding_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert!(certlab(
        dir.path(),
        &["assemble", "--shipped", "periodic_verifier", "--out", "p.tm"]
    )
    .status
    .success());
    let cases: [&[&str]; 6] = [
        &["bench", "--problem", "tsp", "--n", "4", "--csv", "x.csv"],
        &["bench", "--problem", "periodic", "--n", "9..3", "--csv", "x.csv"],
        &["run", "--machine", "missing.tm", "--fuel", "5"],
        &["run", "--machine", "p.tm", "--input", "abc", "--fuel", "5"],
        &[
            "run",
            "--machine",
            "p.tm",
            "--input",
            "ab",
            "--cert",
            "12",
            "--fuel",
            "5",
        ],
        &["frobnicate"],
    ];
    for args in cases {
        let o = certlab(dir.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}
