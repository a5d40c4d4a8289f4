use std::collections::HashMap;
use std::sync::Arc;

use smallvec::SmallVec;

use super::validate::validate_machine;
use super::{MachineError, MachineSpec, StateId, Symbol, TapeRole};

const NO_SYMBOL: u16 = u16::MAX;
const NO_RULE: u32 = u32::MAX;
const DENSE_LIMIT: usize = 1 << 24;

/// A two-way infinite tape backed by a growable buffer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tape {
    cells: Vec<Symbol>,
    /// Position of `cells[0]`.
    offset: i64,
    head: i64,
    extent: TapeExtent,
}

/// Leftmost and rightmost head positions seen during a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TapeExtent {
    pub min: i64,
    pub max: i64,
}

impl TapeExtent {
    /// Furthest distance from cell 0.
    pub fn max_excursion(&self) -> u64 {
        self.min.unsigned_abs().max(self.max.unsigned_abs())
    }
}

impl Tape {
    fn with_contents(start: i64, contents: &[Symbol]) -> Tape {
        Tape {
            cells: contents.to_vec(),
            offset: start,
            head: 0,
            extent: TapeExtent::default(),
        }
    }

    #[inline]
    pub fn read(&self) -> Symbol {
        self.get(self.head)
    }

    #[inline]
    pub fn get(&self, pos: i64) -> Symbol {
        let idx = pos - self.offset;
        if idx < 0 {
            return Symbol::BLANK;
        }
        self.cells.get(idx as usize).copied().unwrap_or(Symbol::BLANK)
    }

    #[inline]
    fn write(&mut self, sym: Symbol) {
        let mut idx = self.head - self.offset;
        if idx < 0 {
            let grow = (-idx as usize).max(self.cells.len()).max(16);
            let mut cells = vec![Symbol::BLANK; grow];
            cells.extend_from_slice(&self.cells);
            self.cells = cells;
            self.offset -= grow as i64;
            idx = self.head - self.offset;
        }
        let idx = idx as usize;
        if idx >= self.cells.len() {
            let new_len = (idx + 1).max(self.cells.len() * 2).max(16);
            self.cells.resize(new_len, Symbol::BLANK);
        }
        self.cells[idx] = sym;
    }

    #[inline]
    fn shift(&mut self, delta: i64) {
        self.head += delta;
        if self.head < self.extent.min {
            self.extent.min = self.head;
        } else if self.head > self.extent.max {
            self.extent.max = self.head;
        }
    }

    pub fn head(&self) -> i64 {
        self.head
    }

    pub fn extent(&self) -> TapeExtent {
        self.extent
    }

    /// Non-blank region as `(first position, symbols)`; empty tapes give
    /// `(0, [])`.
    pub fn contents(&self) -> (i64, Vec<Symbol>) {
        let first = self.cells.iter().position(|&s| s != Symbol::BLANK);
        let last = self.cells.iter().rposition(|&s| s != Symbol::BLANK);
        match (first, last) {
            (Some(a), Some(b)) => (self.offset + a as i64, self.cells[a..=b].to_vec()),
            _ => (0, Vec::new()),
        }
    }
}

/// Snapshot of a running machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub state: StateId,
    pub steps: u64,
    pub tapes: Vec<Tape>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Accepted,
    Rejected,
    FuelExhausted,
    Stuck,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Accepted => "accepted",
            RunStatus::Rejected => "rejected",
            RunStatus::FuelExhausted => "fuel-exhausted",
            RunStatus::Stuck => "stuck",
        }
    }

    pub fn parse(s: &str) -> Option<RunStatus> {
        match s {
            "accepted" => Some(RunStatus::Accepted),
            "rejected" => Some(RunStatus::Rejected),
            "fuel-exhausted" => Some(RunStatus::FuelExhausted),
            "stuck" => Some(RunStatus::Stuck),
            _ => None,
        }
    }

    pub fn is_accept(self) -> bool {
        self == RunStatus::Accepted
    }
}

impl std::fmt::Display for RunStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of a clocked run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub status: RunStatus,
    /// Number of transitions applied.
    pub steps: u64,
    pub final_state: StateId,
    /// Head extent per tape, in tape order.
    pub extents: Vec<TapeExtent>,
}

#[derive(Debug, Clone)]
struct Action {
    to: StateId,
    write: SmallVec<[Symbol; 6]>,
    moves: SmallVec<[i8; 6]>,
}

#[derive(Debug, Clone)]
enum Table {
    Dense(Vec<u32>),
    Sparse(HashMap<u64, u32>),
}

/// A validated machine with a precomputed transition lookup.
///
/// Cheap to clone: the spec and tables are shared.
#[derive(Debug, Clone)]
pub struct Machine {
    inner: Arc<Inner>,
}

#[derive(Debug)]
struct Inner {
    spec: MachineSpec,
    /// Per tape: global symbol -> position in that tape's read domain.
    local: Vec<Vec<u16>>,
    mult: Vec<u64>,
    stride: u64,
    table: Table,
    actions: Vec<Action>,
    zero: Symbol,
    one: Symbol,
}

impl Machine {
    /// Validates `spec` and builds the lookup table.
    pub fn new(spec: MachineSpec) -> Result<Machine, MachineError> {
        let violations = validate_machine(&spec);
        if !violations.is_empty() {
            return Err(MachineError::Invalid(violations));
        }
        let tapes = spec.tapes.len();
        let alpha = spec.alphabet.len();
        let mut local = vec![vec![NO_SYMBOL; alpha]; tapes];
        let mut domain_len = vec![0u64; tapes];
        for rule in &spec.rules {
            for (t, s) in rule.read.iter().enumerate() {
                let slot = &mut local[t][s.index()];
                if *slot == NO_SYMBOL {
                    *slot = domain_len[t] as u16;
                    domain_len[t] += 1;
                }
            }
        }
        let mut mult = vec![0u64; tapes];
        let mut stride = 1u64;
        for t in 0..tapes {
            mult[t] = stride;
            stride = stride.saturating_mul(domain_len[t]);
        }
        let key_of = |read: &[Symbol]| -> u64 {
            read.iter()
                .enumerate()
                .map(|(t, s)| local[t][s.index()] as u64 * mult[t])
                .sum()
        };
        let total = (spec.states.len() as u64).saturating_mul(stride);
        let mut actions = Vec::with_capacity(spec.rules.len());
        let table = if total as usize <= DENSE_LIMIT {
            let mut dense = vec![NO_RULE; total as usize];
            for rule in &spec.rules {
                let idx = rule.from.0 as u64 * stride + key_of(&rule.read);
                dense[idx as usize] = actions.len() as u32;
                actions.push(Action::from_rule(rule));
            }
            Table::Dense(dense)
        } else {
            let mut sparse = HashMap::with_capacity(spec.rules.len());
            for rule in &spec.rules {
                let idx = rule.from.0 as u64 * stride + key_of(&rule.read);
                sparse.insert(idx, actions.len() as u32);
                actions.push(Action::from_rule(rule));
            }
            Table::Sparse(sparse)
        };
        let zero = spec.alphabet.lookup("0").unwrap_or(Symbol(NO_SYMBOL));
        let one = spec.alphabet.lookup("1").unwrap_or(Symbol(NO_SYMBOL));
        Ok(Machine {
            inner: Arc::new(Inner {
                spec,
                local,
                mult,
                stride,
                table,
                actions,
                zero,
                one,
            }),
        })
    }

    pub fn spec(&self) -> &MachineSpec {
        &self.inner.spec
    }

    pub fn encode_input(&self, text: &str) -> Result<Vec<Symbol>, MachineError> {
        self.inner.spec.encode_input(text)
    }

    fn initial(&self, input: &[Symbol], cert: &[bool]) -> Result<Configuration, MachineError> {
        let inner = &*self.inner;
        let spec = &inner.spec;
        for &s in input {
            if !spec.alphabet.contains(s) {
                return Err(MachineError::SymbolOutOfRange(s.0));
            }
            if s == Symbol::BLANK {
                return Err(MachineError::BlankInInput);
            }
        }
        let mut cert_syms = Vec::with_capacity(cert.len());
        for &bit in cert {
            let sym = if bit { inner.one } else { inner.zero };
            if sym.0 == NO_SYMBOL {
                return Err(MachineError::CertificateSymbolMissing(if bit {
                    "1"
                } else {
                    "0"
                }));
            }
            cert_syms.push(sym);
        }
        let tapes = spec
            .tapes
            .iter()
            .map(|role| match role {
                TapeRole::Input => Tape::with_contents(0, input),
                TapeRole::Certificate => Tape::with_contents(0, &cert_syms),
                TapeRole::Work => Tape::with_contents(0, &[]),
                TapeRole::Combined => {
                    let mut cells = cert_syms.clone();
                    cells.extend_from_slice(input);
                    Tape::with_contents(-(cert_syms.len() as i64), &cells)
                }
            })
            .collect();
        Ok(Configuration {
            state: spec.start,
            steps: 0,
            tapes,
        })
    }

    #[inline]
    fn lookup(&self, state: StateId, tapes: &[Tape]) -> Option<&Action> {
        let inner = &*self.inner;
        let mut key = state.0 as u64 * inner.stride;
        for (t, tape) in tapes.iter().enumerate() {
            let l = inner.local[t][tape.read().index()];
            if l == NO_SYMBOL {
                return None;
            }
            key += l as u64 * inner.mult[t];
        }
        let idx = match &inner.table {
            Table::Dense(d) => d[key as usize],
            Table::Sparse(s) => *s.get(&key)?,
        };
        if idx == NO_RULE {
            None
        } else {
            Some(&inner.actions[idx as usize])
        }
    }

    /// Advances `config` by one transition. Returns the status if the machine
    /// cannot move (halted, stuck or out of fuel).
    fn step(&self, config: &mut Configuration, fuel: u64) -> Option<RunStatus> {
        let spec = &self.inner.spec;
        if config.state == spec.accept {
            return Some(RunStatus::Accepted);
        }
        if config.state == spec.reject {
            return Some(RunStatus::Rejected);
        }
        if config.steps >= fuel {
            return Some(RunStatus::FuelExhausted);
        }
        let Some(action) = self.lookup(config.state, &config.tapes) else {
            return Some(RunStatus::Stuck);
        };
        for (t, tape) in config.tapes.iter_mut().enumerate() {
            let w = action.write[t];
            if tape.read() != w {
                tape.write(w);
            }
            let d = action.moves[t];
            if d != 0 {
                tape.shift(d as i64);
            }
        }
        config.state = action.to;
        config.steps += 1;
        None
    }

    /// Runs from the start configuration for at most `fuel` transitions.
    pub fn run(&self, input: &[Symbol], cert: &[bool], fuel: u64) -> Result<RunResult, MachineError> {
        let mut config = self.initial(input, cert)?;
        let status = loop {
            if let Some(status) = self.step(&mut config, fuel) {
                break status;
            }
        };
        Ok(RunResult {
            status,
            steps: config.steps,
            final_state: config.state,
            extents: config.tapes.iter().map(|t| t.extent).collect(),
        })
    }

    /// [`Machine::run`] on a text input (see [`MachineSpec::encode_input`])
    /// and a `0`/`1` certificate string.
    pub fn run_text(&self, input: &str, cert: &str, fuel: u64) -> Result<RunResult, MachineError> {
        let input = self.encode_input(input)?;
        let cert = super::parse_bits(cert)?;
        self.run(&input, &cert, fuel)
    }

    /// The first `limit` configurations of the run, starting with the start
    /// configuration.
    pub fn trace(
        &self,
        input: &[Symbol],
        cert: &[bool],
        fuel: u64,
        limit: usize,
    ) -> Result<Vec<Configuration>, MachineError> {
        let mut config = self.initial(input, cert)?;
        let mut out = Vec::new();
        while out.len() < limit {
            out.push(config.clone());
            if self.step(&mut config, fuel).is_some() {
                break;
            }
        }
        Ok(out)
    }
}

impl Action {
    fn from_rule(rule: &super::Rule) -> Action {
        Action {
            to: rule.to,
            write: rule.write.iter().copied().collect(),
            moves: rule.moves.iter().map(|m| m.delta() as i8).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::parse_tm;

    // Accepts when the certificate's first bit is 1; copies the input to
    // the work tape first.
    const COPY: &str = "\
name: copy
tapes: input:ro certificate:ro work
alphabet: _ a b 0 1
start: c
accept: yes
reject: no
c a,0,_ -> c a,0,a R,S,R
c b,0,_ -> c b,0,b R,S,R
c a,1,_ -> c a,1,a R,S,R
c b,1,_ -> c b,1,b R,S,R
c _,1,_ -> yes _,1,_ S,S,S
c _,0,_ -> no _,0,_ S,S,S
";

    fn machine() -> Machine {
        Machine::new(parse_tm(COPY).unwrap()).unwrap()
    }

    #[test]
    fn runs_to_acceptance() {
        let m = machine();
        let r = m.run_text("abba", "1", 100).unwrap();
        assert_eq!(r.status, RunStatus::Accepted);
        assert_eq!(r.steps, 5);
        assert_eq!(m.spec().state_name(r.final_state), "yes");
        assert_eq!(r.extents[0], TapeExtent { min: 0, max: 4 });
        assert_eq!(r.extents[1].max_excursion(), 0);
        assert_eq!(m.run_text("abba", "0", 100).unwrap().status, RunStatus::Rejected);
    }

    #[test]
    fn zero_fuel_takes_no_steps() {
        let r = machine().run_text("ab", "1", 0).unwrap();
        assert_eq!((r.status, r.steps), (RunStatus::FuelExhausted, 0));
        let r = machine().run_text("ab", "1", 2).unwrap();
        assert_eq!((r.status, r.steps), (RunStatus::FuelExhausted, 2));
    }

    #[test]
    fn short_certificate_reads_blank_and_sticks() {
        let r = machine().run_text("ab", "", 100).unwrap();
        assert_eq!((r.status, r.steps), (RunStatus::Stuck, 0));
    }

    #[test]
    fn encoding_errors_come_first() {
        let m = machine();
        assert_eq!(
            m.run_text("abc", "1", 10),
            Err(MachineError::UnknownSymbol("c".into()))
        );
        assert_eq!(m.run_text("ab", "2", 10), Err(MachineError::BadCertificate('2')));
        assert_eq!(m.run(&[Symbol(0)], &[true], 10), Err(MachineError::BlankInInput));
        assert_eq!(
            m.run(&[Symbol(9)], &[true], 10),
            Err(MachineError::SymbolOutOfRange(9))
        );
    }

    #[test]
    fn trace_matches_run() {
        let m = machine();
        let input = m.encode_input("aba").unwrap();
        let one = m.trace(&input, &[true], 100, 1).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].state, m.spec().start);
        assert_eq!(one[0].steps, 0);
        let all = m.trace(&input, &[true], 100, 1000).unwrap();
        let r = m.run(&input, &[true], 100).unwrap();
        assert_eq!(all.len() as u64, r.steps + 1);
        assert_eq!(all.last().unwrap().state, r.final_state);
        let (start, work) = all.last().unwrap().tapes[2].contents();
        assert_eq!(start, 0);
        assert_eq!(work, input);
    }

    #[test]
    fn periodic_trace_length() {
        let m = &crate::problems::Problem::Periodic.verifier().machine;
        let input = m.encode_input("aa").unwrap();
        let r = m.run(&input, &[true], 10_000).unwrap();
        assert_eq!(r.status, RunStatus::Accepted);
        assert_eq!(
            m.trace(&input, &[true], 10_000, usize::MAX).unwrap().len() as u64,
            r.steps + 1
        );
    }

    #[test]
    fn halting_start_takes_zero_steps() {
        let mut spec = parse_tm(COPY).unwrap();
        spec.rules.clear();
        spec.start = spec.accept;
        let r = Machine::new(spec).unwrap().run_text("ab", "", 0).unwrap();
        assert_eq!((r.status, r.steps), (RunStatus::Accepted, 0));
    }

    #[test]
    fn tape_grows_both_ways() {
        let mut t = Tape::with_contents(0, &[Symbol(1)]);
        t.shift(-20);
        t.write(Symbol(2));
        t.shift(45);
        t.write(Symbol(3));
        assert_eq!(t.get(-20), Symbol(2));
        assert_eq!(t.get(0), Symbol(1));
        assert_eq!(t.get(25), Symbol(3));
        assert_eq!(t.get(7), Symbol::BLANK);
        assert_eq!(t.extent(), TapeExtent { min: -20, max: 25 });
        assert_eq!(t.contents().0, -20);
        assert_eq!(t.contents().1.len(), 46);
    }
}
