//! The case-study languages: machines, encodings, oracles and generators.
//!
//! | problem  | input tape      | certificate                  | b(n)                |
//! |----------|-----------------|------------------------------|---------------------|
//! | periodic | `x` over {a,b}  | period length ℓ, binary      | max(1, ⌈log₂ n⌉)    |
//! | rotation | `A|B`           | offset k, binary             | max(1, ⌈log₂ n⌉)    |
//! | sat3     | encoded clauses | one bit per variable         | n                   |
//!
//! The ROTATION machines accept letters `a` to `e`; every other string
//! machine works over `{a,b}`.

mod cnf;
pub mod generators;
pub mod oracles;

use std::fmt;
use std::sync::OnceLock;

use crate::assembler::{assemble, parse_tmir, ProgramIR};
use crate::machine::{Machine, MachineError, Symbol};
use crate::verifier::{CertWidth, SolverRole, VerifierSpec};

pub use cnf::CnfFormula;
pub use generators::{
    gen_periodic, gen_random_3sat, gen_random_aperiodic, gen_random_nonrotation, gen_rotation,
    gen_worst_aperiodic, gen_worst_nonrotation,
};
pub use oracles::{periodic_oracle, rotation_oracle, sat3_first_model, sat3_oracle, SAT3_ORACLE_MAX_VARS};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("encoding error: {0}")]
pub struct EncodingError(pub String);

impl EncodingError {
    pub fn new(msg: impl Into<String>) -> EncodingError {
        EncodingError(msg.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid generator parameters: {0}")]
pub struct GeneratorError(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Periodic,
    Rotation,
    Sat3,
}

impl Problem {
    pub const ALL: [Problem; 3] = [Problem::Periodic, Problem::Rotation, Problem::Sat3];

    pub fn name(self) -> &'static str {
        match self {
            Problem::Periodic => "periodic",
            Problem::Rotation => "rotation",
            Problem::Sat3 => "sat3",
        }
    }

    pub fn parse(s: &str) -> Option<Problem> {
        Problem::ALL.into_iter().find(|p| p.name() == s)
    }

    pub fn verifier(self) -> &'static VerifierSpec {
        static CELLS: [OnceLock<VerifierSpec>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
        CELLS[self as usize].get_or_init(|| {
            let (src, encoding, width) = match self {
                Problem::Periodic => (PERIODIC_VERIFIER, "ab-string", CertWidth::LogCeil),
                Problem::Rotation => (ROTATION_VERIFIER, "pair-bar", CertWidth::LogCeil),
                Problem::Sat3 => (SAT3_VERIFIER, "cnf-signed-binary", CertWidth::Linear),
            };
            VerifierSpec {
                problem: self,
                encoding,
                machine: build(src),
                width,
            }
        })
    }

    /// The certificate-free solver, where one ships.
    pub fn naive_solver(self) -> Option<&'static SolverRole> {
        static CELLS: [OnceLock<SolverRole>; 2] = [OnceLock::new(), OnceLock::new()];
        let (idx, src) = match self {
            Problem::Periodic => (0, PERIODIC_SOLVER),
            Problem::Rotation => (1, ROTATION_SOLVER),
            Problem::Sat3 => return None,
        };
        Some(CELLS[idx].get_or_init(|| SolverRole {
            problem: self,
            machine: build(src),
        }))
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const PERIODIC_VERIFIER: &str = include_str!("../../machines/periodic_verifier.tmir");
pub const PERIODIC_SOLVER: &str = include_str!("../../machines/periodic_solver.tmir");
pub const ROTATION_VERIFIER: &str = include_str!("../../machines/rotation_verifier.tmir");
pub const ROTATION_SOLVER: &str = include_str!("../../machines/rotation_solver.tmir");
pub const SAT3_VERIFIER: &str = include_str!("../../machines/sat3_verifier.tmir");

/// Every shipped IR program as `(file stem, source)`.
pub const SHIPPED_PROGRAMS: [(&str, &str); 5] = [
    ("periodic_verifier", PERIODIC_VERIFIER),
    ("periodic_solver", PERIODIC_SOLVER),
    ("rotation_verifier", ROTATION_VERIFIER),
    ("rotation_solver", ROTATION_SOLVER),
    ("sat3_verifier", SAT3_VERIFIER),
];

/// Parses one of the shipped programs.
pub fn shipped_program(src: &str) -> ProgramIR {
    parse_tmir(src).expect("shipped programs parse")
}

fn build(src: &str) -> Machine {
    let art = assemble(&shipped_program(src)).expect("shipped programs assemble");
    Machine::new(art.spec).expect("assembled machines validate")
}

/// Raw problem data.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Payload {
    Text(String),
    Pair(String, String),
    Cnf(CnfFormula),
}

/// A problem instance together with its input-tape text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub problem: Problem,
    pub payload: Payload,
    /// `|x|`, `|A|` or the variable count.
    pub n: usize,
    pub input: String,
}

fn check_letters(s: &str, allowed: &str) -> Result<(), EncodingError> {
    match s.chars().find(|c| !allowed.contains(*c)) {
        Some(c) => Err(EncodingError::new(format!(
            "symbol {c:?} is outside {{{allowed}}}"
        ))),
        None => Ok(()),
    }
}

const STRING_LETTERS: &str = "ab";
const ROTATION_LETTERS: &str = "abcde";

impl Instance {
    pub fn periodic(x: &str) -> Result<Instance, EncodingError> {
        Instance::new(Problem::Periodic, Payload::Text(x.to_string()))
    }

    pub fn rotation(a: &str, b: &str) -> Result<Instance, EncodingError> {
        Instance::new(Problem::Rotation, Payload::Pair(a.to_string(), b.to_string()))
    }

    pub fn sat3(f: CnfFormula) -> Instance {
        Instance::new(Problem::Sat3, Payload::Cnf(f)).expect("formulas always encode")
    }

    pub fn new(problem: Problem, payload: Payload) -> Result<Instance, EncodingError> {
        let (n, input) = encode(problem, &payload)?;
        Ok(Instance {
            problem,
            payload,
            n,
            input,
        })
    }

    /// Reads plain-text instances: one line for PERIODIC, two lines for
    /// ROTATION, DIMACS for 3-SAT.
    pub fn from_text(problem: Problem, text: &str) -> Result<Instance, EncodingError> {
        let payload = match problem {
            Problem::Periodic => Payload::Text(text.trim().to_string()),
            Problem::Rotation => {
                let lines: Vec<&str> = text.lines().map(str::trim).collect();
                let (a, b) = match lines.as_slice() {
                    [a, b] => (*a, *b),
                    [a, b, rest @ ..] if rest.iter().all(|l| l.is_empty()) => (*a, *b),
                    [a] | [a, ..] if a.contains('|') => a.split_once('|').expect("checked"),
                    _ => return Err(EncodingError::new("expected two lines A and B")),
                };
                Payload::Pair(a.to_string(), b.to_string())
            }
            Problem::Sat3 => Payload::Cnf(CnfFormula::from_dimacs(text)?),
        };
        Instance::new(problem, payload)
    }

    pub fn symbols(&self, machine: &Machine) -> Result<Vec<Symbol>, MachineError> {
        machine.encode_input(&self.input)
    }

    /// Certificate width under the problem's verifier.
    pub fn cert_bits(&self) -> u32 {
        self.problem.verifier().width.bits(self.n)
    }

    /// A valid certificate from the oracle, when the instance is a member.
    pub fn witness(&self) -> Option<Vec<bool>> {
        let bits = self.cert_bits();
        match &self.payload {
            Payload::Text(x) => periodic_oracle(x)
                .1
                .map(|l| crate::verifier::to_bits(l as u64, bits)),
            Payload::Pair(a, b) => rotation_oracle(a, b)
                .1
                .map(|k| crate::verifier::to_bits(k as u64, bits)),
            Payload::Cnf(f) => sat3_first_model(f),
        }
    }

    /// Oracle verdict.
    pub fn is_member(&self) -> bool {
        match &self.payload {
            Payload::Text(x) => periodic_oracle(x).0,
            Payload::Pair(a, b) => rotation_oracle(a, b).0,
            Payload::Cnf(f) => sat3_oracle(f).0,
        }
    }
}

/// Size parameter and input-tape text for a payload.
pub fn encode(problem: Problem, payload: &Payload) -> Result<(usize, String), EncodingError> {
    match (problem, payload) {
        (Problem::Periodic, Payload::Text(x)) => {
            check_letters(x, STRING_LETTERS)?;
            Ok((x.len(), x.clone()))
        }
        (Problem::Rotation, Payload::Pair(a, b)) => {
            check_letters(a, ROTATION_LETTERS)?;
            check_letters(b, ROTATION_LETTERS)?;
            Ok((a.len(), format!("{a}|{b}")))
        }
        (Problem::Sat3, Payload::Cnf(f)) => Ok((f.num_vars, f.encode())),
        _ => Err(EncodingError::new(format!(
            "payload does not match problem {problem}"
        ))),
    }
}

/// Inverse of [`encode`]. The variable count of a formula is not recorded
/// on the tape, so it is passed as `n`.
pub fn decode(problem: Problem, n: usize, input: &str) -> Result<Payload, EncodingError> {
    match problem {
        Problem::Periodic => {
            check_letters(input, STRING_LETTERS)?;
            Ok(Payload::Text(input.to_string()))
        }
        Problem::Rotation => {
            let (a, b) = input
                .split_once('|')
                .ok_or_else(|| EncodingError::new("missing separator"))?;
            check_letters(a, ROTATION_LETTERS)?;
            check_letters(b, ROTATION_LETTERS)?;
            Ok(Payload::Pair(a.to_string(), b.to_string()))
        }
        Problem::Sat3 => Ok(Payload::Cnf(CnfFormula::decode(n, input)?)),
    }
}
