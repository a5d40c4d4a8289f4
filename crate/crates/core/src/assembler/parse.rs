//! The `.tmir` text format: one primitive per line, labels as `label:`.
//!
//! ```text
//! name: copy-then-compare
//! tape in input a b
//! tape cert certificate 0 1
//! tape w work a b
//!
//!         copy in w until _
//!         move in L
//!         move in L until _
//!         move in R
//!         move w L
//!         move w L until _
//!         move w R
//! check:  compare in w mismatch reject
//!         accept
//! ```

use std::fmt::Write as _;

use super::{CopyLimit, Instr, ProgramIR, TapeDecl};
use crate::error::{LineError, ParseErrors};
use crate::machine::{Alphabet, Move, Symbol, TapeRole};

fn role_token(role: TapeRole) -> &'static str {
    match role {
        TapeRole::Input => "input",
        TapeRole::Certificate => "certificate",
        TapeRole::Work | TapeRole::Combined => "work",
    }
}

struct Ctx<'a> {
    alphabet: &'a Alphabet,
    tapes: &'a [TapeDecl],
}

impl Ctx<'_> {
    fn tape(&self, name: &str) -> Result<usize, String> {
        self.tapes
            .iter()
            .position(|t| t.name == name)
            .ok_or_else(|| format!("unknown tape {name:?}"))
    }

    fn sym(&self, tape: usize, name: &str) -> Result<Symbol, String> {
        let sym = if name == "_" {
            Symbol::BLANK
        } else {
            self.alphabet
                .lookup(name)
                .ok_or_else(|| format!("unknown symbol {name:?}"))?
        };
        if sym != Symbol::BLANK && !self.tapes[tape].symbols.contains(&sym) {
            return Err(format!(
                "symbol {name:?} is not declared on tape {:?}",
                self.tapes[tape].name
            ));
        }
        Ok(sym)
    }

    fn syms(&self, tape: usize, list: &str) -> Result<Vec<Symbol>, String> {
        list.split(',').map(|s| self.sym(tape, s)).collect()
    }

    fn dir(&self, tok: &str) -> Result<Move, String> {
        match tok {
            "L" => Ok(Move::Left),
            "R" => Ok(Move::Right),
            other => Err(format!("expected L or R, found {other:?}")),
        }
    }
}

fn parse_instr(ctx: &Ctx<'_>, toks: &[&str]) -> Result<Instr, String> {
    let arity = |n: usize| -> Result<(), String> {
        if toks.len() == n {
            Ok(())
        } else {
            Err(format!("`{}` takes {} operands", toks[0], n - 1))
        }
    };
    match toks[0] {
        "move" => {
            if toks.len() < 3 {
                return Err("usage: move <tape> L|R [count | until <syms>]".into());
            }
            let tape = ctx.tape(toks[1])?;
            let dir = ctx.dir(toks[2])?;
            match toks.get(3) {
                None => Ok(Instr::Move { tape, dir, count: 1 }),
                Some(&"until") => {
                    arity(5)?;
                    Ok(Instr::Scan {
                        heads: vec![(tape, dir)],
                        stop: vec![(tape, ctx.syms(tape, toks[4])?)],
                    })
                }
                Some(n) => {
                    arity(4)?;
                    let count: u32 = n.parse().map_err(|_| format!("bad count {n:?}"))?;
                    if count == 0 {
                        return Err("move count must be positive".into());
                    }
                    Ok(Instr::Move { tape, dir, count })
                }
            }
        }
        "scan" => {
            let until = toks
                .iter()
                .position(|&t| t == "until")
                .ok_or("scan needs `until`")?;
            let mut heads = Vec::new();
            for h in &toks[1..until] {
                let (t, d) = h
                    .split_once(':')
                    .ok_or(format!("expected tape:dir, found {h:?}"))?;
                heads.push((ctx.tape(t)?, ctx.dir(d)?));
            }
            if heads.is_empty() {
                return Err("scan moves no heads".into());
            }
            let mut stop = Vec::new();
            for (i, cond) in toks[until + 1..].iter().enumerate() {
                if i % 2 == 1 {
                    if *cond != "or" {
                        return Err(format!("expected `or`, found {cond:?}"));
                    }
                    continue;
                }
                let (t, s) = cond
                    .split_once('=')
                    .ok_or(format!("expected tape=syms, found {cond:?}"))?;
                let tape = ctx.tape(t)?;
                stop.push((tape, ctx.syms(tape, s)?));
            }
            if stop.is_empty() {
                return Err("scan needs at least one stop condition".into());
            }
            Ok(Instr::Scan { heads, stop })
        }
        "write" => {
            arity(3)?;
            let tape = ctx.tape(toks[1])?;
            Ok(Instr::Write {
                tape,
                sym: ctx.sym(tape, toks[2])?,
            })
        }
        "copy" => {
            if toks.len() < 4 {
                return Err("usage: copy <src> <dst> <count> | until <syms>".into());
            }
            let src = ctx.tape(toks[1])?;
            let dst = ctx.tape(toks[2])?;
            let limit = if toks[3] == "until" {
                arity(5)?;
                CopyLimit::Until(ctx.syms(src, toks[4])?)
            } else {
                arity(4)?;
                let n: u32 = toks[3].parse().map_err(|_| format!("bad count {:?}", toks[3]))?;
                if n == 0 {
                    return Err("copy count must be positive".into());
                }
                CopyLimit::Count(n)
            };
            Ok(Instr::Copy { src, dst, limit })
        }
        "compare" => {
            arity(5)?;
            if toks[3] != "mismatch" {
                return Err("usage: compare <a> <b> mismatch <label>".into());
            }
            Ok(Instr::Compare {
                a: ctx.tape(toks[1])?,
                b: ctx.tape(toks[2])?,
                mismatch: toks[4].to_string(),
            })
        }
        "modscan" => {
            arity(5)?;
            if toks[3] != "nonzero" {
                return Err("usage: modscan <tape> <counter> nonzero <label>".into());
            }
            Ok(Instr::ModScan {
                tape: ctx.tape(toks[1])?,
                counter: ctx.tape(toks[2])?,
                nonzero: toks[4].to_string(),
            })
        }
        "dec" => {
            arity(4)?;
            if toks[2] != "zero" {
                return Err("usage: dec <counter> zero <label>".into());
            }
            Ok(Instr::Dec {
                counter: ctx.tape(toks[1])?,
                zero: toks[3].to_string(),
            })
        }
        "inc" => {
            arity(2)?;
            Ok(Instr::Inc {
                counter: ctx.tape(toks[1])?,
            })
        }
        "branch" => {
            if toks.len() < 3 {
                return Err("usage: branch <tape> <syms>-><label> ...".into());
            }
            let tape = ctx.tape(toks[1])?;
            let arms = toks[2..]
                .iter()
                .map(|arm| {
                    let (s, l) = arm
                        .split_once("->")
                        .ok_or(format!("expected syms->label, found {arm:?}"))?;
                    Ok((ctx.syms(tape, s)?, l.to_string()))
                })
                .collect::<Result<_, String>>()?;
            Ok(Instr::Branch { tape, arms })
        }
        "goto" => {
            arity(2)?;
            Ok(Instr::Goto(toks[1].to_string()))
        }
        "nop" => {
            arity(1)?;
            Ok(Instr::Nop)
        }
        "accept" => {
            arity(1)?;
            Ok(Instr::Halt(true))
        }
        "reject" => {
            arity(1)?;
            Ok(Instr::Halt(false))
        }
        "halt" => {
            arity(2)?;
            match toks[1] {
                "accept" => Ok(Instr::Halt(true)),
                "reject" => Ok(Instr::Halt(false)),
                other => Err(format!("halt takes accept or reject, found {other:?}")),
            }
        }
        other => Err(format!("unknown primitive {other:?}")),
    }
}

/// Parses a `.tmir` program. Label resolution happens in
/// [`assemble`](super::assemble).
pub fn parse_tmir(text: &str) -> Result<ProgramIR, ParseErrors> {
    let mut errors = Vec::new();
    let mut name = String::from("unnamed");
    let mut alphabet = Alphabet::new(["_"]).expect("blank is a valid symbol");
    let mut tapes: Vec<TapeDecl> = Vec::new();
    let mut labels = Vec::new();
    let mut instrs = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fail = |msg: String| {
            errors.push(LineError {
                line: lineno,
                message: msg,
            })
        };
        let mut toks: Vec<&str> = line.split_whitespace().collect();
        if toks[0] == "name:" {
            name = toks[1..].join(" ");
            continue;
        }
        if toks[0] == "tape" {
            if !instrs.is_empty() {
                fail("tape declarations must precede instructions".into());
                continue;
            }
            if toks.len() < 3 {
                fail("usage: tape <name> input|certificate|work <symbols...>".into());
                continue;
            }
            let role = match toks[2] {
                "input" => TapeRole::Input,
                "certificate" => TapeRole::Certificate,
                "work" => TapeRole::Work,
                other => {
                    fail(format!("unknown tape role {other:?}"));
                    continue;
                }
            };
            if tapes.iter().any(|t| t.name == toks[1]) {
                fail(format!("tape {:?} declared twice", toks[1]));
                continue;
            }
            let mut symbols = Vec::new();
            for s in &toks[3..] {
                if *s == "_" {
                    continue;
                }
                let sym = match alphabet.lookup(s) {
                    Some(sym) => sym,
                    None => match alphabet.push(s.to_string()) {
                        Ok(sym) => sym,
                        Err(e) => {
                            fail(e);
                            continue;
                        }
                    },
                };
                if !symbols.contains(&sym) {
                    symbols.push(sym);
                }
            }
            tapes.push(TapeDecl {
                name: toks[1].to_string(),
                role,
                symbols,
            });
            continue;
        }
        while let Some(label) = toks.first().and_then(|t| t.strip_suffix(':')) {
            if label.is_empty() {
                fail("empty label".into());
            } else {
                labels.push((label.to_string(), instrs.len()));
            }
            toks.remove(0);
        }
        if toks.is_empty() {
            continue;
        }
        let ctx = Ctx {
            alphabet: &alphabet,
            tapes: &tapes,
        };
        match parse_instr(&ctx, &toks) {
            Ok(i) => instrs.push(i),
            Err(msg) => fail(msg),
        }
    }
    if errors.is_empty() {
        Ok(ProgramIR {
            name,
            alphabet,
            tapes,
            labels,
            instrs,
        })
    } else {
        Err(ParseErrors(errors))
    }
}

/// Renders a program in `.tmir` syntax.
pub fn write_tmir(p: &ProgramIR) -> String {
    let sym = |s: Symbol| -> &str {
        if s == Symbol::BLANK {
            "_"
        } else {
            p.alphabet.name(s)
        }
    };
    let syms = |v: &[Symbol]| v.iter().map(|&s| sym(s)).collect::<Vec<_>>().join(",");
    let tape = |t: usize| p.tapes[t].name.as_str();
    let dir = |m: Move| m.as_char();

    let mut out = String::new();
    let _ = writeln!(out, "name: {}", p.name);
    for t in &p.tapes {
        let decl: Vec<&str> = t.symbols.iter().map(|&s| sym(s)).collect();
        let _ = writeln!(out, "tape {} {} {}", t.name, role_token(t.role), decl.join(" "));
    }
    out.push('\n');
    for idx in 0..=p.instrs.len() {
        let labels: Vec<&str> = p
            .labels
            .iter()
            .filter(|(_, i)| *i == idx)
            .map(|(l, _)| l.as_str())
            .collect();
        let Some(instr) = p.instrs.get(idx) else {
            for l in labels {
                let _ = writeln!(out, "{l}:");
            }
            break;
        };
        let body = match instr {
            Instr::Move {
                tape: t,
                dir: d,
                count,
            } => {
                if *count == 1 {
                    format!("move {} {}", tape(*t), dir(*d))
                } else {
                    format!("move {} {} {count}", tape(*t), dir(*d))
                }
            }
            Instr::Scan { heads, stop } => {
                if heads.len() == 1 && stop.len() == 1 && heads[0].0 == stop[0].0 {
                    format!(
                        "move {} {} until {}",
                        tape(heads[0].0),
                        dir(heads[0].1),
                        syms(&stop[0].1)
                    )
                } else {
                    let h: Vec<String> = heads
                        .iter()
                        .map(|(t, d)| format!("{}:{}", tape(*t), dir(*d)))
                        .collect();
                    let s: Vec<String> = stop
                        .iter()
                        .map(|(t, v)| format!("{}={}", tape(*t), syms(v)))
                        .collect();
                    format!("scan {} until {}", h.join(" "), s.join(" or "))
                }
            }
            Instr::Write { tape: t, sym: s } => format!("write {} {}", tape(*t), sym(*s)),
            Instr::Copy { src, dst, limit } => match limit {
                CopyLimit::Count(n) => format!("copy {} {} {n}", tape(*src), tape(*dst)),
                CopyLimit::Until(v) => format!("copy {} {} until {}", tape(*src), tape(*dst), syms(v)),
            },
            Instr::Compare { a, b, mismatch } => {
                format!("compare {} {} mismatch {mismatch}", tape(*a), tape(*b))
            }
            Instr::ModScan {
                tape: t,
                counter,
                nonzero,
            } => format!("modscan {} {} nonzero {nonzero}", tape(*t), tape(*counter)),
            Instr::Dec { counter, zero } => format!("dec {} zero {zero}", tape(*counter)),
            Instr::Inc { counter } => format!("inc {}", tape(*counter)),
            Instr::Branch { tape: t, arms } => {
                let a: Vec<String> = arms.iter().map(|(v, l)| format!("{}->{l}", syms(v))).collect();
                format!("branch {} {}", tape(*t), a.join(" "))
            }
            Instr::Goto(l) => format!("goto {l}"),
            Instr::Nop => "nop".into(),
            Instr::Halt(true) => "accept".into(),
            Instr::Halt(false) => "reject".into(),
        };
        let prefix: String = labels.iter().map(|l| format!("{l}: ")).collect();
        let _ = writeln!(out, "{prefix}{body}");
    }
    out
}
