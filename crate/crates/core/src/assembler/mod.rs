//! A structured IR for head-movement programs and its compilers.
//!
//! Programs are written against named tapes with declared symbol sets and
//! are built from a handful of primitives (`move`, `scan`, `write`, `copy`,
//! `compare`, `modscan`, `dec`, `inc`, `branch`, `goto`, `nop`, `accept`,
//! `reject`). [`assemble`] expands each primitive into a fixed gadget of
//! machine states; the expansion of each gadget is documented on
//! [`Instr`] so step counts are stable.
//!
//! [`compile_to_single_tape`] turns any regular multi-tape machine into an
//! equivalent machine with one combined tape.

mod gadgets;
mod interp;
mod parse;
mod single_tape;

use crate::machine::{Alphabet, MachineSpec, Move, Symbol, TapeRole, Violation};

pub use gadgets::assemble;
pub use interp::{interpret, IrOutcome};
pub use parse::{parse_tmir, write_tmir};
pub use single_tape::{compile_to_single_tape, SingleTapeOptions, DEFAULT_ALPHABET_CAP};

/// Jump target: a label name, or `accept` / `reject`.
pub type Target = String;

/// A declared tape: name, role and the non-blank symbols it may hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TapeDecl {
    pub name: String,
    pub role: TapeRole,
    pub symbols: Vec<Symbol>,
}

impl TapeDecl {
    /// Declared symbols plus the blank.
    pub fn domain(&self) -> Vec<Symbol> {
        let mut d = vec![Symbol::BLANK];
        d.extend(self.symbols.iter().copied().filter(|&s| s != Symbol::BLANK));
        d
    }
}

/// How many cells `copy` transfers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CopyLimit {
    Count(u32),
    /// Stop when the source head reads one of these symbols.
    Until(Vec<Symbol>),
}

/// One IR primitive. Costs are in machine steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instr {
    /// Move one head `count` cells. Costs `count`.
    Move { tape: usize, dir: Move, count: u32 },
    /// Move every listed head by one cell per step until some stop condition
    /// `(tape, symbols)` holds. Costs one step per move plus one to exit.
    Scan {
        heads: Vec<(usize, Move)>,
        stop: Vec<(usize, Vec<Symbol>)>,
    },
    /// Overwrite the cell under the head. Costs 1.
    Write { tape: usize, sym: Symbol },
    /// Copy cells from `src` to `dst`, moving both heads right. A count copy
    /// costs `count`; an `until` copy costs one per cell plus one to exit.
    Copy {
        src: usize,
        dst: usize,
        limit: CopyLimit,
    },
    /// While both heads read equal non-blank symbols, move both right.
    /// Stops with a jump to `mismatch` on unequal non-blank symbols, or
    /// falls through when either head reads a blank. One step per move plus
    /// one to exit.
    Compare { a: usize, b: usize, mismatch: Target },
    /// Advance `tape` to its first blank while cycling `counter` over its
    /// non-blank segment (rewinding at the segment end). Falls through if the
    /// scanned length is a multiple of the segment length, otherwise jumps to
    /// `nonzero`. An empty segment jumps to `nonzero` at once. The counter
    /// head must start on the first cell of its segment and is left there
    /// when the remainder is zero.
    ModScan {
        tape: usize,
        counter: usize,
        nonzero: Target,
    },
    /// Binary decrement of a big-endian counter whose head is parked on the
    /// low-order digit, which must be the rightmost non-blank cell of the
    /// tape. After a borrow the head walks right to the first blank and
    /// steps back. A zero (or empty) counter is left unchanged and control
    /// jumps to `zero`. Decrementing a value with `t` trailing zeros costs
    /// `2t + 2` steps (`1` when `t = 0`); a zero counter of `k` digits
    /// costs `2k + 2`.
    Dec { counter: usize, zero: Target },
    /// Binary increment; same head-parking convention as `Dec`.
    Inc { counter: usize },
    /// Jump on the symbol under the head; falls through when no arm matches.
    /// Costs 1.
    Branch {
        tape: usize,
        arms: Vec<(Vec<Symbol>, Target)>,
    },
    /// Unconditional jump. Costs 0.
    Goto(Target),
    /// Do nothing for one step.
    Nop,
    /// Halt. Costs 0.
    Halt(bool),
}

/// A parsed or hand-built program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramIR {
    pub name: String,
    /// Blank first, then every declared symbol.
    pub alphabet: Alphabet,
    pub tapes: Vec<TapeDecl>,
    /// `(label, instruction index)`; a label may point one past the end.
    pub labels: Vec<(String, usize)>,
    pub instrs: Vec<Instr>,
}

impl ProgramIR {
    pub fn tape_index(&self, name: &str) -> Option<usize> {
        self.tapes.iter().position(|t| t.name == name)
    }

    pub fn label_at(&self, idx: usize) -> Option<&str> {
        self.labels
            .iter()
            .find(|(_, i)| *i == idx)
            .map(|(l, _)| l.as_str())
    }
}

/// An assembled machine with a map from machine states back to the IR.
#[derive(Debug, Clone)]
pub struct CompiledArtifact {
    pub spec: MachineSpec,
    /// For each state, the index of the instruction whose gadget owns it
    /// (`None` for the halting states).
    pub source_map: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AssembleError {
    #[error("unresolved label {label:?} in instruction {instr}")]
    UnresolvedLabel { instr: usize, label: String },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("instruction {instr} refers to tape #{tape}, which is not declared")]
    UnknownTape { instr: usize, tape: usize },
    #[error("instruction {instr} writes read-only tape {tape:?}")]
    ReadOnlyWrite { instr: usize, tape: String },
    #[error("instruction {instr} uses tape {tape:?} as a counter, but it is not a work tape")]
    CounterNotWork { instr: usize, tape: String },
    #[error("instruction {instr} uses symbol #{symbol} not declared on tape {tape:?}")]
    UndeclaredSymbol { instr: usize, tape: String, symbol: u16 },
    #[error("instruction {instr} is malformed: {reason}")]
    Malformed { instr: usize, reason: String },
    #[error("per-state symbol space {required} exceeds the cap {cap}")]
    AlphabetOverflow { required: u64, cap: u64 },
    #[error("goto cycle through {0:?} never executes a step")]
    EmptyLoop(String),
    #[error("program needs exactly one input and one certificate tape")]
    TapeLayout,
    #[error("assembled machine is invalid: {0:?}")]
    Invalid(Vec<Violation>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("single-tape alphabet needs {required} symbols but the cap is {cap}")]
    AlphabetCap { required: u64, cap: u64 },
    #[error("single-tape compilation needs a machine with separate input and certificate tapes")]
    UnsupportedLayout,
    #[error("generated symbol name {0:?} clashes with a source symbol")]
    NameClash(String),
    #[error("source machine is invalid: {0:?}")]
    Invalid(Vec<Violation>),
}
