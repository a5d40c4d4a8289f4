use certlab::machine::RunStatus;
use certlab::problems::{CnfFormula, Instance, Problem};
use certlab::verifier::{solver_fuel, verifier_fuel};

const FUEL: u64 = 1_000_000;

fn verify(problem: Problem, input: &str, cert: &str) -> RunStatus {
    let m = &problem.verifier().machine;
    m.run_text(input, cert, FUEL).unwrap().status
}

fn solve(problem: Problem, input: &str) -> certlab::machine::RunResult {
    let s = problem.naive_solver().unwrap();
    let sym = s.machine.encode_input(input).unwrap();
    s.run(&sym, FUEL).unwrap()
}

#[test]
fn periodic_verifier_examples() {
    assert_eq!(verify(Problem::Periodic, "abab", "10"), RunStatus::Accepted);
    assert_eq!(verify(Problem::Periodic, "abab", "11"), RunStatus::Rejected);
    assert_eq!(verify(Problem::Periodic, "abab", "01"), RunStatus::Rejected);
    assert_eq!(verify(Problem::Periodic, "aaa", "01"), RunStatus::Accepted);
    assert_eq!(verify(Problem::Periodic, "aa", "1"), RunStatus::Accepted);
    assert_eq!(verify(Problem::Periodic, "ab", "1"), RunStatus::Rejected);
    assert_eq!(verify(Problem::Periodic, "abab", "00"), RunStatus::Rejected);
}

#[test]
fn rotation_verifier_examples() {
    assert_eq!(
        verify(Problem::Rotation, "abcde|cdeab", "010"),
        RunStatus::Accepted
    );
    assert_eq!(
        verify(Problem::Rotation, "abcde|cdeab", "011"),
        RunStatus::Rejected
    );
    assert_eq!(
        verify(Problem::Rotation, "abcde|abcde", "000"),
        RunStatus::Accepted
    );
    assert_eq!(verify(Problem::Rotation, "ab|ba", "0"), RunStatus::Rejected);
    assert_eq!(verify(Problem::Rotation, "ab|ba", "1"), RunStatus::Accepted);
    assert_eq!(verify(Problem::Rotation, "ab|bab", "1"), RunStatus::Rejected);
}

#[test]
fn sat3_verifier_examples() {
    let f = CnfFormula::new(3, vec![[1, 2, 3]]).unwrap();
    assert_eq!(verify(Problem::Sat3, &f.encode(), "100"), RunStatus::Accepted);
    assert_eq!(verify(Problem::Sat3, &f.encode(), "000"), RunStatus::Rejected);
    let g = CnfFormula::new(3, vec![[1, -2, 3], [-1, 2, -3]]).unwrap();
    for a in 0..8u32 {
        let bits: Vec<bool> = (0..3).map(|i| a >> (2 - i) & 1 == 1).collect();
        let cert: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        let want = if g.satisfied_by(&bits) {
            RunStatus::Accepted
        } else {
            RunStatus::Rejected
        };
        assert_eq!(verify(Problem::Sat3, &g.encode(), &cert), want, "{cert}");
    }
}

#[test]
fn naive_solver_examples() {
    assert_eq!(solve(Problem::Periodic, "abab").status, RunStatus::Accepted);
    assert_eq!(solve(Problem::Periodic, "a").status, RunStatus::Rejected);
    assert_eq!(solve(Problem::Periodic, "aaaaaaab").status, RunStatus::Rejected);
    assert_eq!(
        solve(Problem::Rotation, "abcde|cdeab").status,
        RunStatus::Accepted
    );
    assert_eq!(solve(Problem::Rotation, "a|b").status, RunStatus::Rejected);
    assert_eq!(solve(Problem::Rotation, "aaaa|aaab").status, RunStatus::Rejected);
}

#[test]
fn witnesses_are_accepted() {
    let i = Instance::periodic("abab").unwrap();
    let m = &Problem::Periodic.verifier().machine;
    let r = m
        .run(&i.symbols(m).unwrap(), &i.witness().unwrap(), verifier_fuel(4))
        .unwrap();
    assert_eq!(r.status, RunStatus::Accepted);
    let _ = solver_fuel(4);
}
