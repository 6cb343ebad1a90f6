//! Verification of look-compute-move robot protocols on rings whose
//! size is a parameter.
//!
//! A protocol is a quantifier-free arithmetic formula over the
//! distances a robot sees. The crate provides three layers on top of
//! that:
//!
//! - an explicit-state simulator for the synchronous, semi-synchronous
//!   and asynchronous scheduling modes ([`semantics`]), built on the
//!   concrete ring objects of [`ringmodel`];
//! - existential arithmetic encodings of the one-step successor
//!   relations and of the safety / protocol-validity /
//!   unique-sequentializability questions ([`encoding`]), phrased over
//!   the shared AST of [`presburger`];
//! - an SMT-LIB bridge that runs an external solver and decodes and
//!   re-validates counterexamples ([`solver`]).
//!
//! The solver answers questions for *all* ring sizes at once; the
//! simulator answers them for small rings and doubles as the oracle
//! that the encodings are cross-checked against (see
//! [`cli::crosscheck_step_relation`]).
//!
//! The `ring-verify` binary in this crate fronts the same
//! functionality as subcommands; the `examples/` directory walks
//! through the library surface.

pub mod cli;
pub mod encoding;
pub mod presburger;
pub mod ringmodel;
pub mod semantics;
pub mod solver;

use thiserror::Error;

/// Any error the crate can produce, for callers that do not need to
/// distinguish the layer it came from.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] presburger::ParseError),
    #[error(transparent)]
    Model(#[from] ringmodel::ModelError),
    #[error(transparent)]
    Explore(#[from] semantics::ExploreError),
    #[error(transparent)]
    Encoding(#[from] encoding::EncodingError),
    #[error(transparent)]
    Solver(#[from] solver::SolverError),
    #[error("{0}")]
    Invalid(String),
}

impl From<presburger::EvalError> for Error {
    fn from(err: presburger::EvalError) -> Error {
        Error::Model(ringmodel::ModelError::Eval(err))
    }
}
