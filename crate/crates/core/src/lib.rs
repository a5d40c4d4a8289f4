//! Certificate-complexity laboratory.
//!
//! - [`machine`]: deterministic multi-tape Turing machines with read-only
//!   input and certificate tapes, clocked execution and tracing.
//! - [`assembler`]: a small structured IR for head-movement programs, its
//!   compiler to transition tables, and multi-tape to single-tape compilation.
//! - [`verifier`]: verifiers and solvers, the full and prefix-extension
//!   certificate enumeration solvers, and trade-off bound reports.
//! - [`problems`]: PERIODIC, STRING-ROTATION and 3-SAT machines, reference
//!   oracles and instance generators.
//! - [`bench`]: sweeps, doubling ratios, the halving table, the
//!   partial-certificate blowup and the solution-count experiment.

pub mod assembler;
pub mod bench;
pub mod error;
pub mod machine;
pub mod problems;
pub mod verifier;

pub use error::{LineError, ParseErrors};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/machines.md")]
    mod machines {}
    #[doc = include_str!("../../../book/src/assembler.md")]
    mod assembler {}
    #[doc = include_str!("../../../book/src/verifiers.md")]
    mod verifiers {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
