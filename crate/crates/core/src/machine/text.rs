//! Line-oriented `.tm` machine format.
//!
//! ```text
//! # comment
//! name: flip
//! tapes: input:ro certificate:ro work
//! alphabet: _ a b 0 1
//! start: scan
//! accept: yes
//! reject: no
//! scan a,_,_ -> scan a,_,a R,S,R
//! scan _,_,_ -> yes _,_,_ S,S,S
//! ```
//!
//! The first alphabet symbol is the blank. States are numbered in order of
//! first appearance.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::validate::{validate_machine, Violation};
use super::{Alphabet, MachineSpec, Move, MoveVec, Rule, StateId, SymVec, TapeRole};
use crate::error::{LineError, ParseErrors};

struct Builder {
    states: Vec<String>,
    ids: HashMap<String, StateId>,
}

impl Builder {
    fn state(&mut self, name: &str) -> StateId {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = StateId(self.states.len() as u32);
        self.states.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        id
    }
}

fn err(line: usize, message: impl Into<String>) -> LineError {
    LineError {
        line,
        message: message.into(),
    }
}

/// Parses a `.tm` document and validates the resulting machine. Every
/// problem is reported with its 1-based line number (0 for whole-file
/// problems).
pub fn parse_tm(text: &str) -> Result<MachineSpec, ParseErrors> {
    let mut errors = Vec::new();
    let mut name = None;
    let mut tapes: Option<Vec<TapeRole>> = None;
    let mut alphabet: Option<Alphabet> = None;
    let mut special: [Option<(String, usize)>; 3] = [None, None, None];
    let mut rule_lines: Vec<(usize, &str)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.contains("->") {
            rule_lines.push((lineno, line));
            continue;
        }
        let Some((key, value)) = line.split_once(':') else {
            errors.push(err(lineno, format!("unrecognised line {line:?}")));
            continue;
        };
        let value = value.trim();
        match key.trim() {
            "name" => name = Some(value.to_string()),
            "tapes" => {
                let mut roles = Vec::new();
                for tok in value.split_whitespace() {
                    match TapeRole::from_token(tok) {
                        Some(r) => roles.push(r),
                        None => errors.push(err(lineno, format!("unknown tape role {tok:?}"))),
                    }
                }
                tapes = Some(roles);
            }
            "alphabet" => match Alphabet::new(value.split_whitespace()) {
                Ok(a) => alphabet = Some(a),
                Err(e) => errors.push(err(lineno, e)),
            },
            "start" => special[0] = Some((value.to_string(), lineno)),
            "accept" => special[1] = Some((value.to_string(), lineno)),
            "reject" => special[2] = Some((value.to_string(), lineno)),
            other => errors.push(err(lineno, format!("unknown header {other:?}"))),
        }
    }

    let (Some(tapes), Some(alphabet)) = (tapes, alphabet) else {
        errors.push(err(0, "missing `tapes:` or `alphabet:` header"));
        return Err(ParseErrors(errors));
    };
    let mut b = Builder {
        states: Vec::new(),
        ids: HashMap::new(),
    };
    let mut ids = [StateId(0); 3];
    for (slot, (key, entry)) in ["start", "accept", "reject"].iter().zip(&special).enumerate() {
        match entry {
            Some((s, _)) => ids[slot] = b.state(s),
            None => errors.push(err(0, format!("missing `{key}:` header"))),
        }
    }

    let arity = tapes.len();
    let mut rules = Vec::with_capacity(rule_lines.len());
    let mut rule_line_of = Vec::with_capacity(rule_lines.len());
    for (lineno, line) in rule_lines {
        match parse_rule(line, arity, &alphabet, &mut b) {
            Ok(rule) => {
                rules.push(rule);
                rule_line_of.push(lineno);
            }
            Err(msg) => errors.push(err(lineno, msg)),
        }
    }
    if !errors.is_empty() {
        return Err(ParseErrors(errors));
    }

    let spec = MachineSpec {
        name: name.unwrap_or_else(|| "unnamed".into()),
        alphabet,
        tapes,
        states: b.states,
        start: ids[0],
        accept: ids[1],
        reject: ids[2],
        rules,
    };
    let violations = validate_machine(&spec);
    if violations.is_empty() {
        return Ok(spec);
    }
    let errors = violations
        .into_iter()
        .map(|v| {
            let line = violation_line(&spec, &v, &rule_line_of, &special);
            err(line, v.to_string())
        })
        .collect();
    Err(ParseErrors(errors))
}

fn violation_line(
    spec: &MachineSpec,
    v: &Violation,
    rule_line_of: &[usize],
    special: &[Option<(String, usize)>; 3],
) -> usize {
    let rule_for_state = |state: &str| {
        spec.rules
            .iter()
            .position(|r| spec.state_name(r.from) == state)
            .map(|i| rule_line_of[i])
            .unwrap_or(0)
    };
    match v {
        Violation::Nondeterministic { state, read } => {
            // report the second (duplicate) occurrence
            let matches: Vec<usize> = spec
                .rules
                .iter()
                .enumerate()
                .filter(|(_, r)| {
                    spec.state_name(r.from) == state
                        && r.read
                            .iter()
                            .map(|&s| spec.alphabet.name(s))
                            .eq(read.iter().map(String::as_str))
                })
                .map(|(i, _)| rule_line_of[i])
                .collect();
            matches.get(1).or(matches.first()).copied().unwrap_or(0)
        }
        Violation::ReadOnlyWrite {
            state,
            tape,
            read,
            wrote,
        } => spec
            .rules
            .iter()
            .position(|r| {
                spec.state_name(r.from) == state
                    && spec.alphabet.name(r.read[*tape]) == read
                    && spec.alphabet.name(r.write[*tape]) == wrote
            })
            .map(|i| rule_line_of[i])
            .unwrap_or(0),
        Violation::HaltingStateHasRule { state } | Violation::SymbolNotInAlphabet { state, .. } => {
            rule_for_state(state)
        }
        Violation::AcceptIsReject => special[2].as_ref().map(|s| s.1).unwrap_or(0),
        Violation::Arity { rule, .. } | Violation::RuleStateOutOfRange { rule } => {
            rule_line_of.get(*rule).copied().unwrap_or(0)
        }
        Violation::TapeLayout(_) | Violation::UnknownState { .. } => 0,
    }
}

fn parse_rule(line: &str, arity: usize, alphabet: &Alphabet, b: &mut Builder) -> Result<Rule, String> {
    let (lhs, rhs) = line.split_once("->").expect("caller checked for ->");
    let lhs: Vec<&str> = lhs.split_whitespace().collect();
    let rhs: Vec<&str> = rhs.split_whitespace().collect();
    if lhs.len() != 2 || rhs.len() != 3 {
        return Err("expected `<state> <r1>,.. -> <state> <w1>,.. <m1>,..`".into());
    }
    let syms = |field: &str| -> Result<SymVec, String> {
        let out: SymVec = field
            .split(',')
            .map(|t| {
                alphabet
                    .lookup(t)
                    .ok_or_else(|| format!("symbol {t:?} is not in the alphabet"))
            })
            .collect::<Result<_, _>>()?;
        if out.len() != arity {
            return Err(format!("expected {arity} symbols, found {}", out.len()));
        }
        Ok(out)
    };
    let read = syms(lhs[1])?;
    let write = syms(rhs[1])?;
    let moves: MoveVec = rhs[2]
        .split(',')
        .map(|t| {
            let mut chars = t.chars();
            match (chars.next().and_then(Move::from_char), chars.next()) {
                (Some(m), None) => Ok(m),
                _ => Err(format!("invalid move {t:?}")),
            }
        })
        .collect::<Result<_, _>>()?;
    if moves.len() != arity {
        return Err(format!("expected {arity} moves, found {}", moves.len()));
    }
    Ok(Rule {
        from: b.state(lhs[0]),
        read,
        to: b.state(rhs[0]),
        write,
        moves,
    })
}

/// Renders a machine in `.tm` format. `parse_tm(write_tm(m))` reproduces `m`
/// up to state numbering.
pub fn write_tm(spec: &MachineSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "name: {}", spec.name);
    let roles: Vec<&str> = spec.tapes.iter().map(|r| r.token()).collect();
    let _ = writeln!(out, "tapes: {}", roles.join(" "));
    let _ = writeln!(out, "alphabet: {}", spec.alphabet.names().join(" "));
    let _ = writeln!(out, "start: {}", spec.state_name(spec.start));
    let _ = writeln!(out, "accept: {}", spec.state_name(spec.accept));
    let _ = writeln!(out, "reject: {}", spec.state_name(spec.reject));
    let join_syms = |v: &SymVec| -> String {
        v.iter()
            .map(|&s| spec.alphabet.name(s))
            .collect::<Vec<_>>()
            .join(",")
    };
    for r in &spec.rules {
        let moves: String = r
            .moves
            .iter()
            .map(|m| m.as_char().to_string())
            .collect::<Vec<_>>()
            .join(",");
        let _ = writeln!(
            out,
            "{} {} -> {} {} {}",
            spec.state_name(r.from),
            join_syms(&r.read),
            spec.state_name(r.to),
            join_syms(&r.write),
            moves
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLIP: &str = "\
# copies a's to the work tape
name: flip
tapes: input:ro certificate:ro work
alphabet: _ a b 0 1
start: scan
accept: yes
reject: no
scan a,_,_ -> scan a,_,a R,S,R
scan _,_,_ -> yes _,_,_ S,S,S
";

    #[test]
    fn parses_headers_and_rules() {
        let m = parse_tm(FLIP).unwrap();
        assert_eq!(m.name, "flip");
        assert_eq!(m.tapes, [TapeRole::Input, TapeRole::Certificate, TapeRole::Work]);
        assert_eq!(m.alphabet.names(), ["_", "a", "b", "0", "1"]);
        assert_eq!(m.states, ["scan", "yes", "no"]);
        assert_eq!(m.rules.len(), 2);
        assert_eq!(
            m.rules[0].moves.as_slice(),
            [Move::Right, Move::Stay, Move::Right]
        );
    }

    #[test]
    fn write_then_parse_is_identity() {
        let m = parse_tm(FLIP).unwrap();
        let text = write_tm(&m);
        let again = parse_tm(&text).unwrap();
        assert_eq!(write_tm(&again), text);
        assert_eq!(again.rules, m.rules);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = FLIP.replace("scan _,_,_ -> yes _,_,_ S,S,S", "scan _,_,_ -> yes _,_,_ S,S,Q");
        let e = parse_tm(&bad).unwrap_err();
        assert_eq!(e.0.len(), 1);
        assert_eq!(e.0[0].line, 9);

        let dup = format!("{FLIP}scan a,_,_ -> no a,_,_ S,S,S\n");
        let e = parse_tm(&dup).unwrap_err();
        assert_eq!(e.0[0].line, 10);
        assert!(e.0[0].message.contains("nondeterministic"));

        let ro = format!("{FLIP}scan b,_,_ -> no a,_,_ S,S,S\n");
        let e = parse_tm(&ro).unwrap_err();
        assert_eq!(e.0[0].line, 10);
        assert!(e.0[0].message.contains("read-only"));
    }

    #[test]
    fn missing_headers() {
        assert!(parse_tm("name: x\n").is_err());
        let no_start = FLIP.replace("start: scan\n", "");
        let e = parse_tm(&no_start).unwrap_err();
        assert!(e.0.iter().any(|l| l.message.contains("start")));
        let unknown = FLIP.replace("yes _,_,_", "yes _,_,z");
        assert!(parse_tm(&unknown).is_err());
    }
}
