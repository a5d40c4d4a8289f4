//! Multi-tape to single-tape compilation.
//!
//! The compiled machine has one combined tape. Each simulated tape becomes a
//! track; a cell of the compiled tape holds a tuple with one symbol and one
//! head marker per track. The tuple region is delimited by a left end marker
//! and a right end marker that also stores the simulated state.
//!
//! Start-up converts the input cells into tuples and moves the certificate
//! bits, which start to the left of cell 0, onto their track one at a time.
//! Each simulated step is then one right sweep that collects the symbols
//! under the markers and looks up the rule, followed by one left sweep that
//! applies the writes and moves the markers. Markers moving left are carried
//! in the state and dropped on the next cell, so no marker is handled twice
//! in a sweep.

use std::collections::{HashMap, HashSet, VecDeque};

use super::CompileError;
use crate::machine::{
    validate_machine, Alphabet, MachineSpec, Move, Rule, StateId, SymVec, Symbol, TapeRole,
};

pub const DEFAULT_ALPHABET_CAP: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingleTapeOptions {
    /// Largest compiled alphabet accepted, blank and end markers included.
    pub alphabet_cap: u64,
}

impl Default for SingleTapeOptions {
    fn default() -> Self {
        SingleTapeOptions {
            alphabet_cap: DEFAULT_ALPHABET_CAP,
        }
    }
}

/// Track alphabet. Entry 0 is the blank; `None` stands for every source
/// symbol the machine never reads on this tape.
struct Track {
    syms: Vec<Option<Symbol>>,
}

impl Track {
    fn map(&self, s: Symbol) -> u16 {
        self.syms
            .iter()
            .position(|&x| x == Some(s))
            .or_else(|| self.syms.iter().position(Option::is_none))
            .expect("symbol outside the track alphabet") as u16
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Cell {
    sym: [u16; 32],
    mark: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Action {
    write: Vec<Option<u16>>,
    moves: Vec<Move>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum St {
    Conv0,
    Conv,
    Back,
    Pick,
    Carry(bool),
    PutEnd0,
    PutLeft,
    /// Per track: 0 while unseen, otherwise track symbol + 1.
    Collect(Vec<u16>),
    Apply(u32, u32),
    SetR(u32, u32, u32),
    PutEnd(StateId, u32, u32),
    Skip2(u32, u32),
    Skip(u32, u32),
}

struct Layout {
    tracks: Vec<Track>,
    radix: Vec<u32>,
    tuples: u32,
    tuple_base: u16,
    left_end: u16,
    right_end: HashMap<StateId, u16>,
}

impl Layout {
    fn decode(&self, idx: u32) -> Cell {
        let mut cell = Cell {
            sym: [0; 32],
            mark: 0,
        };
        for (t, &r) in self.radix.iter().enumerate() {
            let d = (idx / r) % (2 * self.tracks[t].syms.len() as u32);
            cell.sym[t] = (d / 2) as u16;
            if d % 2 == 1 {
                cell.mark |= 1 << t;
            }
        }
        cell
    }

    fn encode(&self, cell: &Cell) -> Symbol {
        let idx: u32 = self
            .radix
            .iter()
            .enumerate()
            .map(|(t, &r)| (cell.sym[t] as u32 * 2 + (cell.mark >> t & 1)) * r)
            .sum();
        Symbol(self.tuple_base + idx as u16)
    }

    fn tuple(&self, idx: u32) -> Symbol {
        Symbol(self.tuple_base + idx as u16)
    }

    fn blank_cell(&self, mark: u32) -> Cell {
        Cell { sym: [0; 32], mark }
    }
}

/// Compiles a regular machine (separate input and certificate tapes) into
/// an equivalent machine with a single combined tape. The compiled machine
/// accepts, rejects or gets stuck exactly when the source does.
pub fn compile_to_single_tape(
    spec: &MachineSpec,
    opts: &SingleTapeOptions,
) -> Result<MachineSpec, CompileError> {
    let violations = validate_machine(spec);
    if !violations.is_empty() {
        return Err(CompileError::Invalid(violations));
    }
    let k = spec.tapes.len();
    if spec.tapes.contains(&TapeRole::Combined) || k > 32 {
        return Err(CompileError::UnsupportedLayout);
    }
    let in_t = spec
        .tape_of(TapeRole::Input)
        .ok_or(CompileError::UnsupportedLayout)?;
    let cert_t = spec
        .tape_of(TapeRole::Certificate)
        .ok_or(CompileError::UnsupportedLayout)?;

    let bits: Vec<Symbol> = ["0", "1"]
        .iter()
        .filter_map(|b| spec.alphabet.lookup(b))
        .collect();
    let raw: Vec<Symbol> = spec.alphabet.symbols().skip(1).collect();
    let mut tracks = Vec::with_capacity(k);
    for (t, role) in spec.tapes.iter().enumerate() {
        let mut seen: Vec<Symbol> = vec![Symbol::BLANK];
        let mut add = |s: Symbol| {
            if !seen.contains(&s) {
                seen.push(s);
            }
        };
        for r in &spec.rules {
            add(r.read[t]);
            if *role == TapeRole::Work {
                add(r.write[t]);
            }
        }
        seen[1..].sort();
        let mut syms: Vec<Option<Symbol>> = seen.iter().copied().map(Some).collect();
        let possible: &[Symbol] = match role {
            TapeRole::Input => &raw,
            TapeRole::Certificate => &bits,
            _ => &[],
        };
        if possible.iter().any(|s| !seen.contains(s)) {
            syms.push(None);
        }
        tracks.push(Track { syms });
    }

    let mut radix = Vec::with_capacity(k);
    let mut tuples: u64 = 1;
    for tr in &tracks {
        radix.push(tuples as u32);
        tuples = tuples.saturating_mul(2 * tr.syms.len() as u64);
    }
    let live: Vec<StateId> = (0..spec.states.len() as u32)
        .map(StateId)
        .filter(|&q| !spec.is_halting(q))
        .collect();
    // a halting start still gets an end marker so the layout runs first
    let mut marked = live.clone();
    if spec.is_halting(spec.start) {
        marked.push(spec.start);
    }
    let required = (1 + raw.len() as u64)
        .saturating_add(tuples)
        .saturating_add(1 + marked.len() as u64);
    let cap = opts.alphabet_cap.min(u16::MAX as u64 + 1);
    if required > cap {
        return Err(CompileError::AlphabetCap {
            required,
            cap: opts.alphabet_cap,
        });
    }

    let mut names: Vec<String> = spec.alphabet.names().to_vec();
    let tuple_base = names.len() as u16;
    let mut layout = Layout {
        tracks,
        radix,
        tuples: tuples as u32,
        tuple_base,
        left_end: 0,
        right_end: HashMap::new(),
    };
    for idx in 0..layout.tuples {
        let cell = layout.decode(idx);
        let parts: Vec<String> = (0..k)
            .map(|t| {
                let mut p = track_name_of(&layout, spec, t, cell.sym[t]);
                if cell.mark >> t & 1 == 1 {
                    p.push('\'');
                }
                p
            })
            .collect();
        names.push(format!("$[{}]", parts.join("/")));
    }
    layout.left_end = names.len() as u16;
    names.push("$<".into());
    for &q in &marked {
        layout.right_end.insert(q, names.len() as u16);
        names.push(format!("$>{}", spec.state_name(q)));
    }
    let mut alphabet = Alphabet::new([names[0].clone()]).expect("source blank name is valid");
    for n in names.iter().skip(1) {
        alphabet
            .push(n.clone())
            .map_err(|_| CompileError::NameClash(n.clone()))?;
    }

    let mut src: HashMap<(StateId, SymVec), &Rule> = HashMap::with_capacity(spec.rules.len());
    for r in &spec.rules {
        src.insert((r.from, r.read.clone()), r);
    }

    let mut b = Builder {
        ids: HashMap::new(),
        queue: VecDeque::new(),
        states: vec![
            spec.state_name(spec.accept).to_string(),
            spec.state_name(spec.reject).to_string(),
        ],
        actions: Vec::new(),
        action_ids: HashMap::new(),
        rules: Vec::new(),
    };
    let accept = StateId(0);
    let reject = StateId(1);
    let halt = |q: StateId| if q == spec.accept { accept } else { reject };
    let start = b.id(St::Conv0);
    let q0_end = |l: &Layout| Symbol(*l.right_end.get(&spec.start).unwrap_or(&0));
    let left = Symbol(layout.left_end);
    let blank_track = |t: usize| layout.tracks[t].map(Symbol::BLANK);
    debug_assert!((0..k).all(|t| blank_track(t) == 0));

    let mut done = HashSet::new();
    while let Some(st) = b.queue.pop_front() {
        if !done.insert(st.clone()) {
            continue;
        }
        let from = b.ids[&st];
        match st {
            St::Conv0 | St::Conv => {
                let marks = if st == St::Conv0 {
                    (1u64 << k) as u32 - 1
                } else {
                    0
                };
                let conv = b.id(St::Conv);
                for &x in raw.iter().chain([Symbol::BLANK].iter()) {
                    if x == Symbol::BLANK && st == St::Conv {
                        let back = b.id(St::Back);
                        b.rule(from, x, back, q0_end(&layout), Move::Left);
                        continue;
                    }
                    let mut cell = layout.blank_cell(marks);
                    cell.sym[in_t] = if x == Symbol::BLANK {
                        0
                    } else {
                        layout.tracks[in_t].map(x)
                    };
                    b.rule(from, x, conv, layout.encode(&cell), Move::Right);
                }
            }
            St::Back => {
                for &x in &raw {
                    b.rule(from, x, from, x, Move::Left);
                }
                for i in 0..layout.tuples {
                    b.rule(from, layout.tuple(i), from, layout.tuple(i), Move::Left);
                }
                let pick = b.id(St::Pick);
                b.rule(from, Symbol::BLANK, pick, Symbol::BLANK, Move::Right);
            }
            St::Pick => {
                for (bit, name) in [(false, "0"), (true, "1")] {
                    if let Some(s) = spec.alphabet.lookup(name) {
                        let carry = b.id(St::Carry(bit));
                        b.rule(from, s, carry, Symbol::BLANK, Move::Right);
                    }
                }
                let put = b.id(St::PutLeft);
                for i in 0..layout.tuples {
                    b.rule(from, layout.tuple(i), put, layout.tuple(i), Move::Left);
                }
            }
            St::Carry(bit) => {
                let sym = spec
                    .alphabet
                    .lookup(if bit { "1" } else { "0" })
                    .unwrap_or(Symbol::BLANK);
                let val = layout.tracks[cert_t].map(sym);
                for &x in &raw {
                    b.rule(from, x, from, x, Move::Right);
                }
                let back = b.id(St::Back);
                for i in 0..layout.tuples {
                    let mut cell = layout.decode(i);
                    if cell.sym[cert_t] == 0 {
                        cell.sym[cert_t] = val;
                        b.rule(from, layout.tuple(i), back, layout.encode(&cell), Move::Left);
                    } else {
                        b.rule(from, layout.tuple(i), from, layout.tuple(i), Move::Right);
                    }
                }
                let mut cell = layout.blank_cell(0);
                cell.sym[cert_t] = val;
                let put = b.id(St::PutEnd0);
                b.rule(from, q0_end(&layout), put, layout.encode(&cell), Move::Right);
            }
            St::PutEnd0 => {
                let back = b.id(St::Back);
                b.rule(from, Symbol::BLANK, back, q0_end(&layout), Move::Left);
            }
            St::PutLeft => {
                let collect = b.id(St::Collect(vec![0; k]));
                b.rule(from, Symbol::BLANK, collect, left, Move::Right);
            }
            St::Collect(v) => {
                for i in 0..layout.tuples {
                    let cell = layout.decode(i);
                    let mut next = v.clone();
                    for (t, slot) in next.iter_mut().enumerate() {
                        if cell.mark >> t & 1 == 1 {
                            *slot = cell.sym[t] + 1;
                        }
                    }
                    let to = b.id(St::Collect(next));
                    b.rule(from, layout.tuple(i), to, layout.tuple(i), Move::Right);
                }
                if spec.is_halting(spec.start) {
                    let end = Symbol(layout.right_end[&spec.start]);
                    b.rule(from, end, halt(spec.start), end, Move::Stay);
                    continue;
                }
                if v.contains(&0) {
                    continue;
                }
                let read: Option<SymVec> = v
                    .iter()
                    .enumerate()
                    .map(|(t, &s)| layout.tracks[t].syms[s as usize - 1])
                    .collect();
                let Some(read) = read else { continue };
                for &q in &live {
                    let Some(rule) = src.get(&(q, read.clone())) else {
                        continue;
                    };
                    let end = Symbol(layout.right_end[&q]);
                    if spec.is_halting(rule.to) {
                        b.rule(from, end, halt(rule.to), end, Move::Stay);
                        continue;
                    }
                    let action = Action {
                        write: (0..k)
                            .map(|t| {
                                (rule.write[t] != rule.read[t]).then(|| layout.tracks[t].map(rule.write[t]))
                            })
                            .collect(),
                        moves: rule.moves.to_vec(),
                    };
                    let a = b.action(action);
                    let to = b.id(St::Apply(a, 0));
                    b.rule(from, end, to, Symbol(layout.right_end[&rule.to]), Move::Left);
                }
            }
            St::Apply(a, pend) => {
                let action = b.actions[a as usize].clone();
                for i in 0..layout.tuples {
                    let mut cell = layout.decode(i);
                    let (mut new_pend, mut right) = (0u32, 0u32);
                    for t in 0..k {
                        if cell.mark >> t & 1 == 0 {
                            continue;
                        }
                        if let Some(w) = action.write[t] {
                            cell.sym[t] = w;
                        }
                        match action.moves[t] {
                            Move::Stay => {}
                            Move::Left => {
                                cell.mark &= !(1 << t);
                                new_pend |= 1 << t;
                            }
                            Move::Right => {
                                cell.mark &= !(1 << t);
                                right |= 1 << t;
                            }
                        }
                    }
                    cell.mark |= pend;
                    let (to, dir) = if right == 0 {
                        (b.id(St::Apply(a, new_pend)), Move::Left)
                    } else {
                        (b.id(St::SetR(a, right, new_pend)), Move::Right)
                    };
                    b.rule(from, layout.tuple(i), to, layout.encode(&cell), dir);
                }
                if pend == 0 {
                    let to = b.id(St::Collect(vec![0; k]));
                    b.rule(from, left, to, left, Move::Right);
                } else {
                    let to = b.id(St::PutLeft);
                    b.rule(
                        from,
                        left,
                        to,
                        layout.encode(&layout.blank_cell(pend)),
                        Move::Left,
                    );
                }
            }
            St::SetR(a, right, pend) => {
                let skip = b.id(St::Skip(a, pend));
                for i in 0..layout.tuples {
                    let mut cell = layout.decode(i);
                    cell.mark |= right;
                    b.rule(from, layout.tuple(i), skip, layout.encode(&cell), Move::Left);
                }
                for &q in &live {
                    let to = b.id(St::PutEnd(q, a, pend));
                    let fresh = layout.encode(&layout.blank_cell(right));
                    b.rule(from, Symbol(layout.right_end[&q]), to, fresh, Move::Right);
                }
            }
            St::PutEnd(q, a, pend) => {
                let to = b.id(St::Skip2(a, pend));
                b.rule(from, Symbol::BLANK, to, Symbol(layout.right_end[&q]), Move::Left);
            }
            St::Skip2(a, pend) | St::Skip(a, pend) => {
                let to = if matches!(st, St::Skip2(..)) {
                    b.id(St::Skip(a, pend))
                } else {
                    b.id(St::Apply(a, pend))
                };
                for i in 0..layout.tuples {
                    b.rule(from, layout.tuple(i), to, layout.tuple(i), Move::Left);
                }
            }
        }
    }

    let out = MachineSpec {
        name: format!("{}-1tape", spec.name),
        alphabet,
        tapes: vec![TapeRole::Combined],
        states: b.states,
        start,
        accept,
        reject,
        rules: b.rules,
    };
    let violations = validate_machine(&out);
    if !violations.is_empty() {
        return Err(CompileError::Invalid(violations));
    }
    Ok(out)
}

fn track_name_of(layout: &Layout, spec: &MachineSpec, t: usize, s: u16) -> String {
    match layout.tracks[t].syms[s as usize] {
        Some(Symbol::BLANK) => "_".into(),
        Some(sym) => spec.alphabet.name(sym).to_string(),
        None => "?".into(),
    }
}

struct Builder {
    ids: HashMap<St, StateId>,
    queue: VecDeque<St>,
    states: Vec<String>,
    actions: Vec<Action>,
    action_ids: HashMap<Action, u32>,
    rules: Vec<Rule>,
}

impl Builder {
    fn id(&mut self, st: St) -> StateId {
        if let Some(&id) = self.ids.get(&st) {
            return id;
        }
        let id = StateId(self.states.len() as u32);
        let kind = match &st {
            St::Conv0 => "conv0",
            St::Conv => "conv",
            St::Back => "back",
            St::Pick => "pick",
            St::Carry(_) => "carry",
            St::PutEnd0 => "grow0",
            St::PutLeft => "left",
            St::Collect(_) => "collect",
            St::Apply(..) => "apply",
            St::SetR(..) => "setr",
            St::PutEnd(..) => "grow",
            St::Skip2(..) | St::Skip(..) => "skip",
        };
        self.states.push(format!("${kind}{}", id.0));
        self.ids.insert(st.clone(), id);
        self.queue.push_back(st);
        id
    }

    fn action(&mut self, a: Action) -> u32 {
        if let Some(&id) = self.action_ids.get(&a) {
            return id;
        }
        let id = self.actions.len() as u32;
        self.actions.push(a.clone());
        self.action_ids.insert(a, id);
        id
    }

    fn rule(&mut self, from: StateId, read: Symbol, to: StateId, write: Symbol, dir: Move) {
        self.rules.push(Rule {
            from,
            read: SymVec::from_slice(&[read]),
            to,
            write: SymVec::from_slice(&[write]),
            moves: [dir].into_iter().collect(),
        });
    }
}
