use std::collections::HashMap;
use std::fmt;

use super::{MachineSpec, StateId, Symbol, TapeRole};

/// A broken machine invariant. Validation reports these as data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Tape roles do not form a supported layout.
    TapeLayout(String),
    /// A distinguished state index is outside the state list.
    UnknownState {
        what: &'static str,
        index: u32,
    },
    AcceptIsReject,
    /// A rule mentions a state that does not exist.
    RuleStateOutOfRange {
        rule: usize,
    },
    /// A rule has the wrong number of symbols or moves for the tape count.
    Arity {
        rule: usize,
        state: String,
    },
    /// Two rules share the same `(state, symbols)` key.
    Nondeterministic {
        state: String,
        read: Vec<String>,
    },
    /// A rule changes the contents of a read-only tape.
    ReadOnlyWrite {
        state: String,
        tape: usize,
        read: String,
        wrote: String,
    },
    /// The accept or reject state has an outgoing rule.
    HaltingStateHasRule {
        state: String,
    },
    /// A rule reads or writes a symbol outside the alphabet.
    SymbolNotInAlphabet {
        state: String,
        symbol: u16,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TapeLayout(msg) => write!(f, "tape layout: {msg}"),
            Violation::UnknownState { what, index } => {
                write!(f, "{what} state index {index} does not exist")
            }
            Violation::AcceptIsReject => write!(f, "accept and reject are the same state"),
            Violation::RuleStateOutOfRange { rule } => {
                write!(f, "rule #{rule} references a missing state")
            }
            Violation::Arity { rule, state } => {
                write!(f, "rule #{rule} from {state} has the wrong number of tapes")
            }
            Violation::Nondeterministic { state, read } => {
                write!(
                    f,
                    "nondeterministic: two rules for ({state}, [{}])",
                    read.join(",")
                )
            }
            Violation::ReadOnlyWrite {
                state,
                tape,
                read,
                wrote,
            } => write!(
                f,
                "read-only write: rule from {state} writes {wrote} over {read} on tape {tape}"
            ),
            Violation::HaltingStateHasRule { state } => {
                write!(f, "halting state {state} has an outgoing rule")
            }
            Violation::SymbolNotInAlphabet { state, symbol } => {
                write!(f, "rule from {state} uses symbol #{symbol} outside the alphabet")
            }
        }
    }
}

fn check_layout(tapes: &[TapeRole]) -> Option<String> {
    if tapes.is_empty() {
        return Some("machine has no tapes".into());
    }
    let count = |role| tapes.iter().filter(|&&r| r == role).count();
    if count(TapeRole::Combined) > 0 {
        if tapes.len() != 1 {
            return Some("a combined tape must be the only tape".into());
        }
        return None;
    }
    match (count(TapeRole::Input), count(TapeRole::Certificate)) {
        (1, 1) => None,
        (i, c) => Some(format!(
            "expected exactly one input and one certificate tape, found {i} and {c}"
        )),
    }
}

/// Checks every [`MachineSpec`] invariant. An empty list means the machine is
/// well formed.
pub fn validate_machine(spec: &MachineSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    if let Some(msg) = check_layout(&spec.tapes) {
        out.push(Violation::TapeLayout(msg));
    }
    let n_states = spec.states.len() as u32;
    for (what, id) in [
        ("start", spec.start),
        ("accept", spec.accept),
        ("reject", spec.reject),
    ] {
        if id.0 >= n_states {
            out.push(Violation::UnknownState { what, index: id.0 });
        }
    }
    if spec.accept == spec.reject {
        out.push(Violation::AcceptIsReject);
    }

    let name = |id: StateId| -> String {
        spec.states
            .get(id.index())
            .cloned()
            .unwrap_or_else(|| format!("#{}", id.0))
    };
    let sym_name = |s: Symbol| -> String {
        if spec.alphabet.contains(s) {
            spec.alphabet.name(s).to_string()
        } else {
            format!("#{}", s.0)
        }
    };

    let arity = spec.tapes.len();
    let mut seen: HashMap<(StateId, &[Symbol]), usize> = HashMap::with_capacity(spec.rules.len());
    for (i, rule) in spec.rules.iter().enumerate() {
        if rule.from.0 >= n_states || rule.to.0 >= n_states {
            out.push(Violation::RuleStateOutOfRange { rule: i });
            continue;
        }
        if rule.read.len() != arity || rule.write.len() != arity || rule.moves.len() != arity {
            out.push(Violation::Arity {
                rule: i,
                state: name(rule.from),
            });
            continue;
        }
        if spec.is_halting(rule.from) {
            out.push(Violation::HaltingStateHasRule {
                state: name(rule.from),
            });
        }
        if let Some(&bad) = rule
            .read
            .iter()
            .chain(rule.write.iter())
            .find(|s| !spec.alphabet.contains(**s))
        {
            out.push(Violation::SymbolNotInAlphabet {
                state: name(rule.from),
                symbol: bad.0,
            });
        }
        for (tape, role) in spec.tapes.iter().enumerate() {
            if role.is_read_only() && rule.read[tape] != rule.write[tape] {
                out.push(Violation::ReadOnlyWrite {
                    state: name(rule.from),
                    tape,
                    read: sym_name(rule.read[tape]),
                    wrote: sym_name(rule.write[tape]),
                });
            }
        }
        if seen.insert((rule.from, &rule.read[..]), i).is_some() {
            out.push(Violation::Nondeterministic {
                state: name(rule.from),
                read: rule.read.iter().map(|&s| sym_name(s)).collect(),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{parse_tm, Symbol};

    const BASE: &str = "\
name: v
tapes: input:ro certificate:ro work
alphabet: _ a 0 1
start: q0
accept: acc
reject: rej
q0 a,0,_ -> q0 a,0,1 R,R,R
q0 _,_,_ -> acc _,_,_ S,S,S
q0 a,1,_ -> rej a,1,_ S,S,S
";

    #[test]
    fn valid_machine_has_no_violations() {
        assert!(validate_machine(&parse_tm(BASE).unwrap()).is_empty());
        let periodic = crate::problems::Problem::Periodic.verifier().machine.spec();
        assert!(validate_machine(periodic).is_empty());
    }

    #[test]
    fn duplicate_key_is_nondeterministic() {
        let mut m = parse_tm(BASE).unwrap();
        let mut r = m.rules[0].clone();
        r.to = m.reject;
        m.rules.push(r);
        let v = validate_machine(&m);
        assert_eq!(v.len(), 1);
        assert!(matches!(&v[0], Violation::Nondeterministic { state, .. } if state == "q0"));
    }

    #[test]
    fn certificate_overwrite_is_flagged_once() {
        let mut m = parse_tm(BASE).unwrap();
        m.rules[0].write[1] = m.alphabet.lookup("1").unwrap();
        let v = validate_machine(&m);
        assert_eq!(
            v,
            [Violation::ReadOnlyWrite {
                state: "q0".into(),
                tape: 1,
                read: "0".into(),
                wrote: "1".into()
            }]
        );
    }

    #[test]
    fn structural_violations() {
        let mut m = parse_tm(BASE).unwrap();
        let mut r = m.rules[1].clone();
        r.from = m.accept;
        m.rules.push(r);
        m.rules[0].write[2] = Symbol(42);
        let v = validate_machine(&m);
        assert_eq!(v.len(), 2, "{v:?}");
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::HaltingStateHasRule { .. })));
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::SymbolNotInAlphabet { symbol: 42, .. })));

        let mut m = parse_tm(BASE).unwrap();
        m.tapes.push(TapeRole::Input);
        let v = validate_machine(&m);
        assert!(matches!(v[0], Violation::TapeLayout(_)));
        assert_eq!(
            v.iter().filter(|x| matches!(x, Violation::Arity { .. })).count(),
            3
        );

        let mut m = parse_tm(BASE).unwrap();
        m.reject = m.accept;
        assert!(validate_machine(&m).contains(&Violation::AcceptIsReject));
    }
}
