use std::collections::HashMap;

use super::{AssembleError, CopyLimit, Instr, ProgramIR};
use crate::machine::{Move, Symbol};

/// Verdict of [`interpret`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IrOutcome {
    Accepted,
    Rejected,
    /// Some head read a symbol its tape does not declare.
    Stuck,
    OutOfBudget,
}

#[derive(Default)]
struct Cells {
    cells: HashMap<i64, Symbol>,
    head: i64,
}

impl Cells {
    fn read(&self) -> Symbol {
        self.cells.get(&self.head).copied().unwrap_or(Symbol::BLANK)
    }

    fn write(&mut self, s: Symbol) {
        if s == Symbol::BLANK {
            self.cells.remove(&self.head);
        } else {
            self.cells.insert(self.head, s);
        }
    }

    fn go(&mut self, m: Move) {
        self.head += m.delta();
    }
}

enum Flow {
    Next,
    Jump(usize),
    Halt(bool),
}

/// Runs a program directly on the host, primitive by primitive, without
/// building a transition table. `budget` bounds the number of loop
/// iterations across all primitives. Machine step counts are not modelled;
/// only the verdict is meant to agree with the assembled machine.
pub fn interpret(
    p: &ProgramIR,
    input: &[Symbol],
    cert: &[bool],
    budget: u64,
) -> Result<IrOutcome, AssembleError> {
    for (i, instr) in p.instrs.iter().enumerate() {
        super::gadgets::check(p, i, instr)?;
    }
    let mut labels = HashMap::new();
    for (name, idx) in &p.labels {
        labels.insert(name.as_str(), *idx);
    }
    let bit = |name: &str| {
        p.alphabet.lookup(name).ok_or_else(|| AssembleError::Malformed {
            instr: 0,
            reason: format!("alphabet lacks certificate symbol {name:?}"),
        })
    };
    let (zero, one) = (bit("0")?, bit("1")?);
    let domains: Vec<Vec<Symbol>> = p.tapes.iter().map(|t| t.domain()).collect();
    let in_tape = p
        .tapes
        .iter()
        .position(|t| t.role == crate::machine::TapeRole::Input)
        .ok_or(AssembleError::TapeLayout)?;
    let cert_tape = p
        .tapes
        .iter()
        .position(|t| t.role == crate::machine::TapeRole::Certificate)
        .ok_or(AssembleError::TapeLayout)?;
    let mut tapes: Vec<Cells> = p.tapes.iter().map(|_| Cells::default()).collect();
    for (i, &s) in input.iter().enumerate() {
        tapes[in_tape].cells.insert(i as i64, s);
    }
    for (i, &b) in cert.iter().enumerate() {
        tapes[cert_tape]
            .cells
            .insert(i as i64, if b { one } else { zero });
    }

    let resolve = |instr: usize, label: &str| -> Result<Flow, AssembleError> {
        match label {
            "accept" => Ok(Flow::Halt(true)),
            "reject" => Ok(Flow::Halt(false)),
            _ => labels
                .get(label)
                .map(|&j| Flow::Jump(j))
                .ok_or_else(|| AssembleError::UnresolvedLabel {
                    instr,
                    label: label.to_string(),
                }),
        }
    };

    let mut pc = 0usize;
    let mut spent = 0u64;
    macro_rules! tick {
        () => {{
            if spent >= budget {
                return Ok(IrOutcome::OutOfBudget);
            }
            spent += 1;
            if tapes.iter().zip(&domains).any(|(t, d)| !d.contains(&t.read())) {
                return Ok(IrOutcome::Stuck);
            }
        }};
    }

    loop {
        let Some(instr) = p.instrs.get(pc) else {
            return Ok(IrOutcome::Rejected);
        };
        let flow = match instr {
            Instr::Move { tape, dir, count } => {
                for _ in 0..*count {
                    tick!();
                    tapes[*tape].go(*dir);
                }
                Flow::Next
            }
            Instr::Scan { heads, stop } => loop {
                tick!();
                if stop.iter().any(|(t, syms)| syms.contains(&tapes[*t].read())) {
                    break Flow::Next;
                }
                for (t, d) in heads {
                    tapes[*t].go(*d);
                }
            },
            Instr::Write { tape, sym } => {
                tick!();
                tapes[*tape].write(*sym);
                Flow::Next
            }
            Instr::Copy { src, dst, limit } => {
                let mut copied = 0u32;
                loop {
                    match limit {
                        CopyLimit::Count(n) if copied == *n => break,
                        _ => {}
                    }
                    tick!();
                    let s = tapes[*src].read();
                    if let CopyLimit::Until(stop) = limit {
                        if stop.contains(&s) {
                            break;
                        }
                    }
                    tapes[*dst].write(s);
                    tapes[*src].go(Move::Right);
                    tapes[*dst].go(Move::Right);
                    copied += 1;
                }
                Flow::Next
            }
            Instr::Compare { a, b, mismatch } => loop {
                tick!();
                let (x, y) = (tapes[*a].read(), tapes[*b].read());
                if x == Symbol::BLANK || y == Symbol::BLANK {
                    break Flow::Next;
                }
                if x != y {
                    break resolve(pc, mismatch)?;
                }
                tapes[*a].go(Move::Right);
                tapes[*b].go(Move::Right);
            },
            Instr::ModScan {
                tape,
                counter,
                nonzero,
            } => {
                tick!();
                if tapes[*counter].read() == Symbol::BLANK {
                    resolve(pc, nonzero)?
                } else {
                    loop {
                        if tapes[*counter].read() == Symbol::BLANK {
                            tapes[*counter].go(Move::Left);
                            loop {
                                tick!();
                                if tapes[*counter].read() == Symbol::BLANK {
                                    tapes[*counter].go(Move::Right);
                                    break;
                                }
                                tapes[*counter].go(Move::Left);
                            }
                        } else if tapes[*tape].read() == Symbol::BLANK {
                            tapes[*counter].go(Move::Left);
                            tick!();
                            let aligned = tapes[*counter].read() == Symbol::BLANK;
                            tapes[*counter].go(Move::Right);
                            break if aligned {
                                Flow::Next
                            } else {
                                resolve(pc, nonzero)?
                            };
                        } else {
                            tapes[*tape].go(Move::Right);
                            tapes[*counter].go(Move::Right);
                        }
                        tick!();
                    }
                }
            }
            Instr::Dec { counter, zero: z } => {
                // Borrow leftwards over zeros, then walk back to the right
                // end; a zero counter is restored on the way back.
                let c = *counter;
                tick!();
                let s = tapes[c].read();
                if s == one {
                    tapes[c].write(zero);
                    Flow::Next
                } else if s == Symbol::BLANK {
                    resolve(pc, z)?
                } else if s != zero {
                    return Ok(IrOutcome::Stuck);
                } else {
                    tapes[c].write(one);
                    tapes[c].go(Move::Left);
                    let found = loop {
                        tick!();
                        let s = tapes[c].read();
                        if s == one {
                            tapes[c].write(zero);
                            tapes[c].go(Move::Right);
                            break true;
                        } else if s == zero {
                            tapes[c].write(one);
                            tapes[c].go(Move::Left);
                        } else if s == Symbol::BLANK {
                            tapes[c].go(Move::Right);
                            break false;
                        } else {
                            return Ok(IrOutcome::Stuck);
                        }
                    };
                    loop {
                        tick!();
                        let s = tapes[c].read();
                        if found && s != Symbol::BLANK {
                            tapes[c].go(Move::Right);
                        } else if found {
                            tapes[c].go(Move::Left);
                            break Flow::Next;
                        } else if s == one {
                            tapes[c].write(zero);
                            tapes[c].go(Move::Right);
                        } else if s == Symbol::BLANK {
                            tapes[c].go(Move::Left);
                            break resolve(pc, z)?;
                        } else {
                            return Ok(IrOutcome::Stuck);
                        }
                    }
                }
            }
            Instr::Inc { counter } => {
                let c = *counter;
                let mut carried = false;
                loop {
                    tick!();
                    let s = tapes[c].read();
                    if s == one {
                        tapes[c].write(zero);
                        tapes[c].go(Move::Left);
                        carried = true;
                    } else if s == zero || s == Symbol::BLANK {
                        tapes[c].write(one);
                        if carried {
                            tapes[c].go(Move::Right);
                        }
                        break;
                    } else {
                        return Ok(IrOutcome::Stuck);
                    }
                }
                if carried {
                    loop {
                        tick!();
                        if tapes[c].read() == Symbol::BLANK {
                            tapes[c].go(Move::Left);
                            break;
                        }
                        tapes[c].go(Move::Right);
                    }
                }
                Flow::Next
            }
            Instr::Branch { tape, arms } => {
                tick!();
                let s = tapes[*tape].read();
                match arms.iter().find(|(syms, _)| syms.contains(&s)) {
                    Some((_, l)) => resolve(pc, l)?,
                    None => Flow::Next,
                }
            }
            Instr::Goto(l) => {
                if spent >= budget {
                    return Ok(IrOutcome::OutOfBudget);
                }
                spent += 1;
                resolve(pc, l)?
            }
            Instr::Nop => {
                tick!();
                Flow::Next
            }
            Instr::Halt(b) => Flow::Halt(*b),
        };
        pc = match flow {
            Flow::Next => pc + 1,
            Flow::Jump(j) => j,
            Flow::Halt(true) => return Ok(IrOutcome::Accepted),
            Flow::Halt(false) => return Ok(IrOutcome::Rejected),
        };
    }
}
