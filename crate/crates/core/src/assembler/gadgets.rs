use std::collections::HashMap;

use super::{AssembleError, CompiledArtifact, CopyLimit, Instr, ProgramIR, Target};
use crate::machine::{validate_machine, MachineSpec, Move, MoveVec, Rule, StateId, SymVec, Symbol, TapeRole};

/// Largest per-state read space the assembler will enumerate.
const READ_SPACE_CAP: u64 = 1 << 16;

const ACCEPT: StateId = StateId(0);
const REJECT: StateId = StateId(1);

struct Act {
    to: StateId,
    write: Vec<(usize, Symbol)>,
    moves: Vec<(usize, Move)>,
}

impl Act {
    fn go(to: StateId) -> Act {
        Act {
            to,
            write: Vec::new(),
            moves: Vec::new(),
        }
    }

    fn mv(mut self, tape: usize, dir: Move) -> Act {
        self.moves.push((tape, dir));
        self
    }

    fn put(mut self, tape: usize, sym: Symbol) -> Act {
        self.write.push((tape, sym));
        self
    }
}

type StateFn<'a> = Box<dyn Fn(&[Symbol]) -> Option<Act> + 'a>;

fn gadget_size(instr: &Instr) -> usize {
    match instr {
        Instr::Move { count, .. } => *count as usize,
        Instr::Copy {
            limit: CopyLimit::Count(n),
            ..
        } => *n as usize,
        Instr::ModScan { .. } | Instr::Dec { .. } => 4,
        Instr::Inc { .. } => 3,
        Instr::Goto(_) | Instr::Halt(_) => 0,
        _ => 1,
    }
}

struct Layout<'p> {
    p: &'p ProgramIR,
    base: Vec<u32>,
    labels: HashMap<&'p str, usize>,
    entry: Vec<StateId>,
}

impl<'p> Layout<'p> {
    fn new(p: &'p ProgramIR) -> Result<Layout<'p>, AssembleError> {
        let mut labels = HashMap::new();
        for (name, idx) in &p.labels {
            if name == "accept" || name == "reject" || labels.insert(name.as_str(), *idx).is_some() {
                return Err(AssembleError::DuplicateLabel(name.clone()));
            }
            if name.starts_with('@') || name.contains(['.', ',', '#']) || name.contains(char::is_whitespace) {
                return Err(AssembleError::Malformed {
                    instr: *idx,
                    reason: format!("invalid label name {name:?}"),
                });
            }
            if *idx > p.instrs.len() {
                return Err(AssembleError::UnresolvedLabel {
                    instr: *idx,
                    label: name.clone(),
                });
            }
        }
        let mut base = Vec::with_capacity(p.instrs.len());
        let mut next = 2u32;
        for instr in &p.instrs {
            base.push(next);
            next += gadget_size(instr) as u32;
        }
        let mut layout = Layout {
            p,
            base,
            labels,
            entry: Vec::new(),
        };
        layout.entry = (0..=p.instrs.len())
            .map(|i| layout.resolve_index(i))
            .collect::<Result<_, _>>()?;
        Ok(layout)
    }

    fn label_index(&self, instr: usize, label: &str) -> Result<Option<usize>, AssembleError> {
        match label {
            "accept" | "reject" => Ok(None),
            _ => self
                .labels
                .get(label)
                .copied()
                .map(Some)
                .ok_or_else(|| AssembleError::UnresolvedLabel {
                    instr,
                    label: label.to_string(),
                }),
        }
    }

    /// Entry state of instruction `i`, following `goto` chains.
    fn resolve_index(&self, mut i: usize) -> Result<StateId, AssembleError> {
        let mut seen = Vec::new();
        loop {
            match self.p.instrs.get(i) {
                None => return Ok(REJECT),
                Some(Instr::Halt(true)) => return Ok(ACCEPT),
                Some(Instr::Halt(false)) => return Ok(REJECT),
                Some(Instr::Goto(label)) => {
                    if seen.contains(&i) {
                        return Err(AssembleError::EmptyLoop(label.clone()));
                    }
                    seen.push(i);
                    match self.label_index(i, label)? {
                        Some(j) => i = j,
                        None => return Ok(if label == "accept" { ACCEPT } else { REJECT }),
                    }
                }
                Some(_) => return Ok(StateId(self.base[i])),
            }
        }
    }

    fn target(&self, instr: usize, label: &Target) -> Result<StateId, AssembleError> {
        Ok(match self.label_index(instr, label)? {
            Some(j) => self.entry[j],
            None if label == "accept" => ACCEPT,
            None => REJECT,
        })
    }
}

pub(super) fn check(p: &ProgramIR, i: usize, instr: &Instr) -> Result<(), AssembleError> {
    let n = p.tapes.len();
    let tape_ok = |t: usize| {
        if t < n {
            Ok(())
        } else {
            Err(AssembleError::UnknownTape { instr: i, tape: t })
        }
    };
    let writable = |t: usize| {
        tape_ok(t)?;
        if p.tapes[t].role.is_read_only() {
            Err(AssembleError::ReadOnlyWrite {
                instr: i,
                tape: p.tapes[t].name.clone(),
            })
        } else {
            Ok(())
        }
    };
    let declared = |t: usize, s: Symbol| {
        if s == Symbol::BLANK || p.tapes[t].symbols.contains(&s) {
            Ok(())
        } else {
            Err(AssembleError::UndeclaredSymbol {
                instr: i,
                tape: p.tapes[t].name.clone(),
                symbol: s.0,
            })
        }
    };
    let counter = |t: usize, needs_bits: bool| {
        tape_ok(t)?;
        if p.tapes[t].role != TapeRole::Work {
            return Err(AssembleError::CounterNotWork {
                instr: i,
                tape: p.tapes[t].name.clone(),
            });
        }
        if needs_bits {
            for bit in ["0", "1"] {
                let ok = p
                    .alphabet
                    .lookup(bit)
                    .is_some_and(|s| p.tapes[t].symbols.contains(&s));
                if !ok {
                    return Err(AssembleError::Malformed {
                        instr: i,
                        reason: format!("counter tape {:?} must declare 0 and 1", p.tapes[t].name),
                    });
                }
            }
        }
        Ok(())
    };
    match instr {
        Instr::Move { tape, .. } => tape_ok(*tape),
        Instr::Scan { heads, stop } => {
            if heads.is_empty() || stop.is_empty() {
                return Err(AssembleError::Malformed {
                    instr: i,
                    reason: "scan needs heads and stop conditions".into(),
                });
            }
            for (t, _) in heads {
                tape_ok(*t)?;
            }
            for (t, syms) in stop {
                tape_ok(*t)?;
                for &s in syms {
                    declared(*t, s)?;
                }
            }
            Ok(())
        }
        Instr::Write { tape, sym } => {
            writable(*tape)?;
            declared(*tape, *sym)
        }
        Instr::Copy { src, dst, limit } => {
            tape_ok(*src)?;
            writable(*dst)?;
            if src == dst {
                return Err(AssembleError::Malformed {
                    instr: i,
                    reason: "copy needs two distinct tapes".into(),
                });
            }
            let stops: &[Symbol] = match limit {
                CopyLimit::Until(syms) => syms,
                CopyLimit::Count(_) => &[],
            };
            for &s in stops {
                declared(*src, s)?;
            }
            for &s in &p.tapes[*src].symbols {
                if !stops.contains(&s) {
                    declared(*dst, s)?;
                }
            }
            Ok(())
        }
        Instr::Compare { a, b, .. } => {
            tape_ok(*a)?;
            tape_ok(*b)
        }
        Instr::ModScan { tape, counter: c, .. } => {
            tape_ok(*tape)?;
            counter(*c, false)?;
            if tape == c {
                return Err(AssembleError::Malformed {
                    instr: i,
                    reason: "modscan needs two distinct tapes".into(),
                });
            }
            Ok(())
        }
        Instr::Dec { counter: c, .. } | Instr::Inc { counter: c } => counter(*c, true),
        Instr::Branch { tape, arms } => {
            tape_ok(*tape)?;
            for (syms, _) in arms {
                for &s in syms {
                    declared(*tape, s)?;
                }
            }
            Ok(())
        }
        Instr::Goto(_) | Instr::Nop | Instr::Halt(_) => Ok(()),
    }
}

fn state_fns<'a>(
    layout: &'a Layout<'_>,
    i: usize,
    instr: &'a Instr,
) -> Result<Vec<StateFn<'a>>, AssembleError> {
    let me = |k: usize| StateId(layout.base[i] + k as u32);
    let next = layout.entry[i + 1];
    let alphabet = &layout.p.alphabet;
    let bit = |name: &str| alphabet.lookup(name).unwrap_or(Symbol::BLANK);
    let mut fns: Vec<StateFn<'a>> = Vec::new();
    match instr {
        Instr::Move { tape, dir, count } => {
            for k in 0..*count as usize {
                let to = if k + 1 == *count as usize { next } else { me(k + 1) };
                fns.push(Box::new(move |_| Some(Act::go(to).mv(*tape, *dir))));
            }
        }
        Instr::Scan { heads, stop } => {
            let here = me(0);
            fns.push(Box::new(move |s| {
                if stop.iter().any(|(t, syms)| syms.contains(&s[*t])) {
                    return Some(Act::go(next));
                }
                let mut a = Act::go(here);
                a.moves.extend(heads.iter().copied());
                Some(a)
            }));
        }
        Instr::Write { tape, sym } => {
            fns.push(Box::new(move |_| Some(Act::go(next).put(*tape, *sym))));
        }
        Instr::Copy { src, dst, limit } => match limit {
            CopyLimit::Count(n) => {
                for k in 0..*n as usize {
                    let to = if k + 1 == *n as usize { next } else { me(k + 1) };
                    fns.push(Box::new(move |s| {
                        Some(
                            Act::go(to)
                                .put(*dst, s[*src])
                                .mv(*src, Move::Right)
                                .mv(*dst, Move::Right),
                        )
                    }));
                }
            }
            CopyLimit::Until(stop) => {
                let here = me(0);
                fns.push(Box::new(move |s| {
                    if stop.contains(&s[*src]) {
                        return Some(Act::go(next));
                    }
                    Some(
                        Act::go(here)
                            .put(*dst, s[*src])
                            .mv(*src, Move::Right)
                            .mv(*dst, Move::Right),
                    )
                }));
            }
        },
        Instr::Compare { a, b, mismatch } => {
            let here = me(0);
            let miss = layout.target(i, mismatch)?;
            fns.push(Box::new(move |s| {
                let (x, y) = (s[*a], s[*b]);
                Some(if x == Symbol::BLANK || y == Symbol::BLANK {
                    Act::go(next)
                } else if x != y {
                    Act::go(miss)
                } else {
                    Act::go(here).mv(*a, Move::Right).mv(*b, Move::Right)
                })
            }));
        }
        Instr::ModScan {
            tape,
            counter,
            nonzero,
        } => {
            let (t, c) = (*tape, *counter);
            let nz = layout.target(i, nonzero)?;
            let (m, wrap, end) = (me(1), me(2), me(3));
            let main = move |s: &[Symbol]| {
                Some(if s[c] == Symbol::BLANK {
                    Act::go(wrap).mv(c, Move::Left)
                } else if s[t] == Symbol::BLANK {
                    Act::go(end).mv(c, Move::Left)
                } else {
                    Act::go(m).mv(t, Move::Right).mv(c, Move::Right)
                })
            };
            fns.push(Box::new(move |s| {
                if s[c] == Symbol::BLANK {
                    Some(Act::go(nz))
                } else {
                    main(s)
                }
            }));
            fns.push(Box::new(main));
            fns.push(Box::new(move |s| {
                Some(if s[c] == Symbol::BLANK {
                    Act::go(m).mv(c, Move::Right)
                } else {
                    Act::go(wrap).mv(c, Move::Left)
                })
            }));
            fns.push(Box::new(move |s| {
                Some(if s[c] == Symbol::BLANK {
                    Act::go(next).mv(c, Move::Right)
                } else {
                    Act::go(nz).mv(c, Move::Right)
                })
            }));
        }
        Instr::Dec { counter, zero } => {
            let c = *counter;
            let z = layout.target(i, zero)?;
            let (zero_s, one_s) = (bit("0"), bit("1"));
            let (borrow, ret, undo) = (me(1), me(2), me(3));
            fns.push(Box::new(move |s| match s[c] {
                x if x == one_s => Some(Act::go(next).put(c, zero_s)),
                x if x == zero_s => Some(Act::go(borrow).put(c, one_s).mv(c, Move::Left)),
                x if x == Symbol::BLANK => Some(Act::go(z)),
                _ => None,
            }));
            fns.push(Box::new(move |s| match s[c] {
                x if x == one_s => Some(Act::go(ret).put(c, zero_s).mv(c, Move::Right)),
                x if x == zero_s => Some(Act::go(borrow).put(c, one_s).mv(c, Move::Left)),
                x if x == Symbol::BLANK => Some(Act::go(undo).mv(c, Move::Right)),
                _ => None,
            }));
            fns.push(Box::new(move |s| {
                Some(if s[c] == Symbol::BLANK {
                    Act::go(next).mv(c, Move::Left)
                } else {
                    Act::go(ret).mv(c, Move::Right)
                })
            }));
            fns.push(Box::new(move |s| match s[c] {
                x if x == one_s => Some(Act::go(undo).put(c, zero_s).mv(c, Move::Right)),
                x if x == Symbol::BLANK => Some(Act::go(z).mv(c, Move::Left)),
                _ => None,
            }));
        }
        Instr::Inc { counter } => {
            let c = *counter;
            let (zero_s, one_s) = (bit("0"), bit("1"));
            let (carry, ret) = (me(1), me(2));
            fns.push(Box::new(move |s| match s[c] {
                x if x == one_s => Some(Act::go(carry).put(c, zero_s).mv(c, Move::Left)),
                x if x == zero_s || x == Symbol::BLANK => Some(Act::go(next).put(c, one_s)),
                _ => None,
            }));
            fns.push(Box::new(move |s| match s[c] {
                x if x == one_s => Some(Act::go(carry).put(c, zero_s).mv(c, Move::Left)),
                x if x == zero_s || x == Symbol::BLANK => Some(Act::go(ret).put(c, one_s).mv(c, Move::Right)),
                _ => None,
            }));
            fns.push(Box::new(move |s| {
                Some(if s[c] == Symbol::BLANK {
                    Act::go(next).mv(c, Move::Left)
                } else {
                    Act::go(ret).mv(c, Move::Right)
                })
            }));
        }
        Instr::Branch { tape, arms } => {
            let resolved: Vec<(&Vec<Symbol>, StateId)> = arms
                .iter()
                .map(|(syms, l)| Ok((syms, layout.target(i, l)?)))
                .collect::<Result<_, AssembleError>>()?;
            fns.push(Box::new(move |s| {
                let to = resolved
                    .iter()
                    .find(|(syms, _)| syms.contains(&s[*tape]))
                    .map(|&(_, to)| to)
                    .unwrap_or(next);
                Some(Act::go(to))
            }));
        }
        Instr::Nop => fns.push(Box::new(move |_| Some(Act::go(next)))),
        Instr::Goto(label) => {
            layout.target(i, label)?;
        }
        Instr::Halt(_) => {}
    }
    debug_assert_eq!(fns.len(), gadget_size(instr));
    Ok(fns)
}

/// Expands every primitive into its gadget and returns the resulting
/// machine together with a state-to-instruction map.
pub fn assemble(p: &ProgramIR) -> Result<CompiledArtifact, AssembleError> {
    let roles: Vec<TapeRole> = p.tapes.iter().map(|t| t.role).collect();
    let count = |r: TapeRole| roles.iter().filter(|&&x| x == r).count();
    if count(TapeRole::Input) != 1 || count(TapeRole::Certificate) != 1 || count(TapeRole::Combined) != 0 {
        return Err(AssembleError::TapeLayout);
    }
    for (i, instr) in p.instrs.iter().enumerate() {
        check(p, i, instr)?;
    }
    let domains: Vec<Vec<Symbol>> = p.tapes.iter().map(|t| t.domain()).collect();
    let space: u64 = domains.iter().map(|d| d.len() as u64).product();
    if space > READ_SPACE_CAP {
        return Err(AssembleError::AlphabetOverflow {
            required: space,
            cap: READ_SPACE_CAP,
        });
    }

    let layout = Layout::new(p)?;
    let mut states = vec!["accept".to_string(), "reject".to_string()];
    let mut source_map = vec![None, None];
    let mut rules = Vec::new();
    let arity = p.tapes.len();
    let mut read = vec![Symbol::BLANK; arity];
    for (i, instr) in p.instrs.iter().enumerate() {
        let fns = state_fns(&layout, i, instr)?;
        let stem = match p.label_at(i) {
            Some(l) => l.to_string(),
            None => format!("@{i}"),
        };
        for (k, f) in fns.iter().enumerate() {
            let from = StateId(states.len() as u32);
            states.push(if k == 0 {
                stem.clone()
            } else {
                format!("{stem}.{k}")
            });
            source_map.push(Some(i));
            let mut digits = vec![0usize; arity];
            'odometer: loop {
                for t in 0..arity {
                    read[t] = domains[t][digits[t]];
                }
                if let Some(act) = f(&read) {
                    let mut write: SymVec = read.iter().copied().collect();
                    let mut moves: MoveVec = std::iter::repeat_n(Move::Stay, arity).collect();
                    for (t, s) in act.write {
                        write[t] = s;
                    }
                    for (t, m) in act.moves {
                        moves[t] = m;
                    }
                    rules.push(Rule {
                        from,
                        read: read.iter().copied().collect(),
                        to: act.to,
                        write,
                        moves,
                    });
                }
                for t in (0..arity).rev() {
                    digits[t] += 1;
                    if digits[t] < domains[t].len() {
                        continue 'odometer;
                    }
                    digits[t] = 0;
                }
                break;
            }
        }
    }
    let spec = MachineSpec {
        name: p.name.clone(),
        alphabet: p.alphabet.clone(),
        tapes: roles,
        states,
        start: layout.entry[0],
        accept: ACCEPT,
        reject: REJECT,
        rules,
    };
    let violations = validate_machine(&spec);
    if !violations.is_empty() {
        return Err(AssembleError::Invalid(violations));
    }
    Ok(CompiledArtifact { spec, source_map })
}
