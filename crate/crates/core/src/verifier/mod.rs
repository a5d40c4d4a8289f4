//! Verifiers, solvers and the two enumeration solvers built from them.
//!
//! Enumeration is driven from the host: every candidate certificate is a
//! separate clocked [`Machine::run`], and each candidate is additionally
//! charged `bits + 1` harness steps for advancing the candidate counter
//! and dispatching the run.

mod bound;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::machine::{Machine, MachineError, RunResult, RunStatus, Symbol};
use crate::problems::Problem;

pub use bound::{build_bound_report, required_delta, BoundReport, BoundRow};

/// Default limit on enumerated certificate bits.
pub const DEFAULT_ENUMERATION_CAP: u32 = 24;

/// `max(1, ⌈log₂ n⌉)`.
pub fn log_width(n: usize) -> u32 {
    if n <= 2 {
        1
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// Certificate width b(n) as a function of the instance size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertWidth {
    Zero,
    /// `max(1, ⌈log₂ n⌉)`.
    LogCeil,
    /// `n`.
    Linear,
    Fixed(u32),
}

impl CertWidth {
    pub fn bits(self, n: usize) -> u32 {
        match self {
            CertWidth::Zero => 0,
            CertWidth::LogCeil => log_width(n),
            CertWidth::Linear => n as u32,
            CertWidth::Fixed(b) => b,
        }
    }
}

/// A machine used as a verifier for one problem.
#[derive(Debug, Clone)]
pub struct VerifierSpec {
    pub problem: Problem,
    /// Name of the input-tape encoding.
    pub encoding: &'static str,
    pub machine: Machine,
    pub width: CertWidth,
}

/// A machine meant to decide the problem without a certificate.
#[derive(Debug, Clone)]
pub struct SolverRole {
    pub problem: Problem,
    pub machine: Machine,
}

impl SolverRole {
    pub fn run(&self, input: &[Symbol], fuel: u64) -> Result<RunResult, MachineError> {
        self.machine.run(input, &[], fuel)
    }
}

/// `64 · L · max(1, ⌈log₂ L⌉)` for an input of `L` symbols.
pub fn verifier_fuel(input_len: usize) -> u64 {
    let l = input_len.max(1) as u64;
    64 * l * log_width(input_len.max(1)) as u64
}

/// `16 · L²` for an input of `L` symbols.
pub fn solver_fuel(input_len: usize) -> u64 {
    let l = input_len.max(1) as u64;
    16 * l * l
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct EnumerationOutcome {
    pub accepted: bool,
    pub witness: Option<Vec<bool>>,
    /// Bits enumerated per candidate.
    pub bits: u32,
    pub candidates: u64,
    pub machine_steps: u64,
    pub harness_steps: u64,
    pub total_steps: u64,
    /// Candidates whose run ran out of fuel.
    pub fuel_exhausted: u64,
}

impl EnumerationOutcome {
    /// `total = machine + candidates · (bits + 1)` and
    /// `total ≤ 2^bits · (fuel + bits + 1)`.
    pub fn accounting_holds(&self, fuel: u64) -> bool {
        let per = self.bits as u128 + 1;
        let identity = self.harness_steps as u128 == self.candidates as u128 * per
            && self.total_steps as u128 == self.machine_steps as u128 + self.harness_steps as u128;
        let bound = (1u128 << self.bits) * (fuel as u128 + per);
        identity && (self.total_steps as u128) <= bound && self.candidates <= 1u64 << self.bits
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("enumerating {bits} bits exceeds the cap of {cap}")]
    CapExceeded { bits: u32, cap: u32 },
    #[error("fuel must be at least 1")]
    ZeroFuel,
    #[error("prefix and suffix cover {got} bits but the certificate has {expected}")]
    WidthMismatch { expected: u32, got: u64 },
    #[error(transparent)]
    Machine(#[from] MachineError),
}

/// Enumeration settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumOptions {
    pub cap: u32,
    /// Run candidates on the rayon pool. Results are identical either way.
    pub parallel: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            cap: DEFAULT_ENUMERATION_CAP,
            parallel: false,
        }
    }
}

/// Big-endian `width`-bit encoding of `value`.
pub fn to_bits(value: u64, width: u32) -> Vec<bool> {
    (0..width).rev().map(|i| i < 64 && value >> i & 1 == 1).collect()
}

/// Inverse of [`to_bits`].
pub fn from_bits(bits: &[bool]) -> u64 {
    bits.iter().fold(0, |acc, &b| acc << 1 | b as u64)
}

const CHUNK: u64 = 512;

fn enumerate(
    machine: &Machine,
    input: &[Symbol],
    prefix: &[bool],
    delta: u32,
    fuel: u64,
    opts: &EnumOptions,
) -> Result<EnumerationOutcome, VerifyError> {
    if fuel == 0 {
        return Err(VerifyError::ZeroFuel);
    }
    if delta > opts.cap {
        return Err(VerifyError::CapExceeded {
            bits: delta,
            cap: opts.cap,
        });
    }
    let total = 1u64 << delta;
    let cert_of = |c: u64| {
        let mut cert = prefix.to_vec();
        cert.extend(to_bits(c, delta));
        cert
    };
    let mut out = EnumerationOutcome {
        accepted: false,
        witness: None,
        bits: delta,
        candidates: 0,
        machine_steps: 0,
        harness_steps: 0,
        total_steps: 0,
        fuel_exhausted: 0,
    };
    let mut start = 0u64;
    while start < total {
        let end = if opts.parallel {
            (start + CHUNK).min(total)
        } else {
            start + 1
        };
        let run = |c: u64| machine.run(input, &cert_of(c), fuel);
        let results: Vec<Result<RunResult, MachineError>> = if opts.parallel {
            (start..end).into_par_iter().map(run).collect()
        } else {
            (start..end).map(run).collect()
        };
        for (c, r) in (start..end).zip(results) {
            let r = r?;
            out.candidates += 1;
            out.machine_steps += r.steps;
            out.harness_steps += delta as u64 + 1;
            if r.status == RunStatus::FuelExhausted {
                out.fuel_exhausted += 1;
            }
            if r.status == RunStatus::Accepted {
                out.accepted = true;
                out.witness = Some(cert_of(c));
                out.total_steps = out.machine_steps + out.harness_steps;
                debug_assert!(out.accounting_holds(fuel));
                return Ok(out);
            }
        }
        start = end;
    }
    out.total_steps = out.machine_steps + out.harness_steps;
    debug_assert!(out.accounting_holds(fuel));
    Ok(out)
}

/// Tries every certificate of width `b(n)` in lexicographic order and
/// accepts at the first one the verifier accepts.
pub fn decide_by_enumeration(
    v: &VerifierSpec,
    input: &[Symbol],
    n: usize,
    fuel: u64,
    opts: &EnumOptions,
) -> Result<EnumerationOutcome, VerifyError> {
    enumerate(&v.machine, input, &[], v.width.bits(n), fuel, opts)
}

/// Fixes `prefix` and enumerates all `2^delta` suffixes. The prefix and
/// suffix together must have the width `b(n)`.
pub fn decide_by_extension(
    v: &VerifierSpec,
    input: &[Symbol],
    n: usize,
    prefix: &[bool],
    delta: u32,
    fuel: u64,
    opts: &EnumOptions,
) -> Result<EnumerationOutcome, VerifyError> {
    let expected = v.width.bits(n);
    if prefix.len() as u64 + delta as u64 != expected as u64 {
        return Err(VerifyError::WidthMismatch {
            expected,
            got: prefix.len() as u64 + delta as u64,
        });
    }
    enumerate(&v.machine, input, prefix, delta, fuel, opts)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IndependenceReport {
    pub runs: u64,
    /// `(instance index, trial)` pairs whose verdict differed from the
    /// blank-certificate run.
    pub divergences: Vec<(usize, usize)>,
}

impl IndependenceReport {
    pub fn is_clean(&self) -> bool {
        self.divergences.is_empty()
    }
}

/// Runs every input with a blank certificate and then with `trials` random
/// certificates, flagging any change of status.
pub fn check_solver_certificate_independence(
    solver: &SolverRole,
    inputs: &[Vec<Symbol>],
    trials: usize,
    seed: u64,
    fuel_of: impl Fn(usize) -> u64,
) -> Result<IndependenceReport, MachineError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = IndependenceReport::default();
    for (i, input) in inputs.iter().enumerate() {
        let fuel = fuel_of(input.len());
        let base = solver.machine.run(input, &[], fuel)?.status;
        report.runs += 1;
        for trial in 0..trials {
            let len = rng.gen_range(1..=32);
            let cert: Vec<bool> = (0..len).map(|_| rng.gen()).collect();
            let status = solver.machine.run(input, &cert, fuel)?.status;
            report.runs += 1;
            if status != base {
                report.divergences.push((i, trial));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_width_table() {
        let got: Vec<u32> = [0, 1, 2, 3, 4, 5, 8, 9, 1024, 1025]
            .iter()
            .map(|&n| log_width(n))
            .collect();
        assert_eq!(got, [1, 1, 1, 2, 2, 3, 3, 4, 10, 11]);
    }

    #[test]
    fn bits_round_trip() {
        assert_eq!(to_bits(2, 2), [true, false]);
        assert_eq!(to_bits(5, 5), [false, false, true, false, true]);
        assert!(to_bits(0, 0).is_empty());
        for v in 0..64 {
            assert_eq!(from_bits(&to_bits(v, 6)), v);
        }
    }

    #[test]
    fn fuel_policies() {
        assert_eq!(verifier_fuel(1024), 64 * 1024 * 10);
        assert_eq!(verifier_fuel(0), 64);
        assert_eq!(solver_fuel(10), 1600);
    }
}
