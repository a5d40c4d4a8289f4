//! Deterministic multi-tape Turing machines.
//!
//! A [`MachineSpec`] is the static description: alphabet, tape roles, states
//! and a transition table keyed by `(state, symbols under every head)`.
//! [`Machine`] is the validated, lookup-optimised form used for execution.
//!
//! Conventions:
//! - symbol `0` of every alphabet is the blank;
//! - every tape is two-way infinite and blank-filled;
//! - acceptance is by halting in the accept state, and a configuration with
//!   no matching rule is reported as [`RunStatus::Stuck`];
//! - one transition costs exactly one step, whatever the number of tapes.

mod exec;
mod text;
mod validate;

use std::collections::HashMap;
use std::fmt;

use smallvec::SmallVec;

pub use exec::{Configuration, Machine, RunResult, RunStatus, Tape, TapeExtent};
pub use text::{parse_tm, write_tm};
pub use validate::{validate_machine, Violation};

/// Index into a machine alphabet. `Symbol::BLANK` is always index 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub u16);

impl Symbol {
    pub const BLANK: Symbol = Symbol(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Index into [`MachineSpec::states`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Head movement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Left,
    Right,
    Stay,
}

impl Move {
    pub fn delta(self) -> i64 {
        match self {
            Move::Left => -1,
            Move::Right => 1,
            Move::Stay => 0,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Move::Left => 'L',
            Move::Right => 'R',
            Move::Stay => 'S',
        }
    }

    pub fn from_char(c: char) -> Option<Move> {
        match c {
            'L' => Some(Move::Left),
            'R' => Some(Move::Right),
            'S' => Some(Move::Stay),
            _ => None,
        }
    }
}

/// What a tape is for.
///
/// A regular machine has exactly one `Input` tape, exactly one `Certificate`
/// tape, and any number of `Work` tapes. A machine produced by single-tape
/// compilation instead has exactly one `Combined` tape: a read-write tape
/// initialised with the input at cells `0..n` and the certificate at cells
/// `-|w|..-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TapeRole {
    Input,
    Certificate,
    Work,
    Combined,
}

impl TapeRole {
    pub fn is_read_only(self) -> bool {
        matches!(self, TapeRole::Input | TapeRole::Certificate)
    }

    /// Token used in the `.tm` text format.
    pub fn token(self) -> &'static str {
        match self {
            TapeRole::Input => "input:ro",
            TapeRole::Certificate => "certificate:ro",
            TapeRole::Work => "work",
            TapeRole::Combined => "combined",
        }
    }

    pub fn from_token(s: &str) -> Option<TapeRole> {
        match s {
            "input:ro" => Some(TapeRole::Input),
            "certificate:ro" => Some(TapeRole::Certificate),
            "work" => Some(TapeRole::Work),
            "combined" => Some(TapeRole::Combined),
            _ => None,
        }
    }
}

/// Ordered symbol names. The first name is the blank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, Symbol>,
}

impl Alphabet {
    /// Builds an alphabet from names; the first is the blank. Duplicate names
    /// are an error.
    pub fn new<I, S>(names: I) -> Result<Alphabet, String>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut alphabet = Alphabet {
            names: Vec::new(),
            index: HashMap::new(),
        };
        for name in names {
            alphabet.push(name.into())?;
        }
        if alphabet.names.is_empty() {
            return Err("alphabet must contain at least the blank symbol".into());
        }
        Ok(alphabet)
    }

    pub fn push(&mut self, name: String) -> Result<Symbol, String> {
        if name.is_empty() || name.contains(char::is_whitespace) || name.contains(',') || name.contains('#') {
            return Err(format!("invalid symbol name {name:?}"));
        }
        if self.index.contains_key(&name) {
            return Err(format!("duplicate symbol {name:?}"));
        }
        if self.names.len() > u16::MAX as usize {
            return Err("alphabet too large".into());
        }
        let sym = Symbol(self.names.len() as u16);
        self.index.insert(name.clone(), sym);
        self.names.push(name);
        Ok(sym)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, sym: Symbol) -> &str {
        &self.names[sym.index()]
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.index.get(name).copied()
    }

    pub fn contains(&self, sym: Symbol) -> bool {
        sym.index() < self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.names.len()).map(|i| Symbol(i as u16))
    }

    /// True when every symbol name is a single character, so strings can be
    /// encoded character by character.
    pub fn is_single_char(&self) -> bool {
        self.names.iter().all(|n| n.chars().count() == 1)
    }
}

pub type SymVec = SmallVec<[Symbol; 6]>;
pub type MoveVec = SmallVec<[Move; 6]>;

/// One transition: in `from`, reading `read` under the heads, switch to `to`,
/// write `write` and move the heads by `moves`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub from: StateId,
    pub read: SymVec,
    pub to: StateId,
    pub write: SymVec,
    pub moves: MoveVec,
}

/// Static description of a deterministic multi-tape machine.
#[derive(Debug, Clone)]
pub struct MachineSpec {
    pub name: String,
    pub alphabet: Alphabet,
    pub tapes: Vec<TapeRole>,
    pub states: Vec<String>,
    pub start: StateId,
    pub accept: StateId,
    pub reject: StateId,
    pub rules: Vec<Rule>,
}

impl MachineSpec {
    pub fn state_name(&self, id: StateId) -> &str {
        &self.states[id.index()]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states
            .iter()
            .position(|s| s == name)
            .map(|i| StateId(i as u32))
    }

    pub fn is_halting(&self, id: StateId) -> bool {
        id == self.accept || id == self.reject
    }

    pub fn tape_of(&self, role: TapeRole) -> Option<usize> {
        self.tapes.iter().position(|&r| r == role)
    }

    pub fn is_single_tape(&self) -> bool {
        self.tapes == [TapeRole::Combined]
    }

    /// Encodes a text input. Text containing whitespace is read as
    /// whitespace-separated symbol names; otherwise each character is one
    /// symbol, unless the whole text names a multi-character symbol.
    pub fn encode_input(&self, text: &str) -> Result<Vec<Symbol>, MachineError> {
        let lookup = |tok: &str| -> Result<Symbol, MachineError> {
            match self.alphabet.lookup(tok) {
                Some(Symbol::BLANK) => Err(MachineError::BlankInInput),
                Some(s) => Ok(s),
                None => Err(MachineError::UnknownSymbol(tok.to_string())),
            }
        };
        let whole_token = text.chars().count() > 1 && self.alphabet.lookup(text).is_some();
        if text.contains(char::is_whitespace) || whole_token {
            text.split_whitespace().map(lookup).collect()
        } else {
            let mut buf = [0u8; 4];
            text.chars().map(|c| lookup(c.encode_utf8(&mut buf))).collect()
        }
    }
}

/// Errors raised before a machine takes its first step.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MachineError {
    #[error("machine is invalid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("symbol {0:?} is not in the machine alphabet")]
    UnknownSymbol(String),
    #[error("symbol index {0} is outside the machine alphabet")]
    SymbolOutOfRange(u16),
    #[error("the blank symbol cannot appear inside an input")]
    BlankInInput,
    #[error("certificate symbol {0:?} is missing from the machine alphabet")]
    CertificateSymbolMissing(&'static str),
    #[error("certificate must be a bit string, found {0:?}")]
    BadCertificate(char),
}

/// Parses a `0`/`1` string into bits.
pub fn parse_bits(text: &str) -> Result<Vec<bool>, MachineError> {
    text.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(MachineError::BadCertificate(other)),
        })
        .collect()
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}
