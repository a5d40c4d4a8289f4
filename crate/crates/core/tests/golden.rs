//! Frozen outputs. Set `CERTLAB_BLESS=1` to rewrite the sweep file after an
//! intentional change to gadget expansion.

use std::path::PathBuf;

use certlab::bench::{run_sweep, write_records_csv, Role, SweepPlan};
use certlab::machine::RunStatus;
use certlab::problems::{CnfFormula, Problem};

const VERIFIER_STEPS: &[(Problem, &str, &str, RunStatus, u64)] = &[
    (Problem::Periodic, "abab", "10", RunStatus::Accepted, 65),
    (Problem::Periodic, "abab", "01", RunStatus::Rejected, 56),
    (Problem::Periodic, "aaa", "01", RunStatus::Accepted, 60),
    (Problem::Rotation, "abcde|cdeab", "010", RunStatus::Accepted, 66),
    (Problem::Rotation, "ab|ba", "0", RunStatus::Rejected, 26),
];

const SOLVER_STEPS: &[(Problem, &str, RunStatus, u64)] = &[
    (Problem::Periodic, "abab", RunStatus::Accepted, 118),
    (Problem::Periodic, "aaaaaaab", RunStatus::Rejected, 425),
    (Problem::Rotation, "abcde|cdeab", RunStatus::Accepted, 132),
    (Problem::Rotation, "aaaa|aaab", RunStatus::Rejected, 181),
];

#[test]
fn verifier_step_counts() {
    for &(p, x, c, status, steps) in VERIFIER_STEPS {
        let r = p.verifier().machine.run_text(x, c, 1_000_000).unwrap();
        assert_eq!((r.status, r.steps), (status, steps), "{p} {x} {c}");
    }
    let f = CnfFormula::new(3, vec![[1, 2, 3]]).unwrap();
    let r = Problem::Sat3
        .verifier()
        .machine
        .run_text(&f.encode(), "100", 1_000_000)
        .unwrap();
    assert_eq!((r.status, r.steps), (RunStatus::Accepted, 84));
}

#[test]
fn solver_step_counts() {
    for &(p, x, status, steps) in SOLVER_STEPS {
        let s = p.naive_solver().unwrap();
        let r = s.run(&s.machine.encode_input(x).unwrap(), 1_000_000).unwrap();
        assert_eq!((r.status, r.steps), (status, steps), "{p} {x}");
    }
}

#[test]
fn seeded_sweep_is_frozen() {
    let mut plan = SweepPlan::new(Problem::Periodic, Role::ALL.to_vec(), vec![4, 8]);
    plan.instances = 2;
    let mut out = Vec::new();
    write_records_csv(&run_sweep(&plan).unwrap(), &mut out).unwrap();
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/periodic_sweep.csv");
    if std::env::var_os("CERTLAB_BLESS").is_some() {
        std::fs::write(&path, &out).unwrap();
    }
    let frozen = std::fs::read(&path).unwrap();
    assert_eq!(
        String::from_utf8(out).unwrap(),
        String::from_utf8(frozen).unwrap()
    );

    plan.parallel = true;
    let mut again = Vec::new();
    write_records_csv(&run_sweep(&plan).unwrap(), &mut again).unwrap();
    assert_eq!(again, std::fs::read(&path).unwrap());
}
