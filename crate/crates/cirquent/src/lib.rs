//! Cirquent calculus kernel.
//!
//! A cirquent is a sequence of formulas (the pool) together with a sequence
//! of groups, each group a set of pool positions.  This crate implements the
//! shallow cirquent systems CCC, CL5 and CL6, the classical and affine
//! sequent calculi with a translation into cirquent proofs, deciders for
//! tautology / binary-tautology instances / resource triviality, an abstract
//! resource semantics, and the formula-level system CL2.

pub mod cirquent;
pub mod cl2;
pub mod decide;
pub mod formula;
pub mod inference;
pub mod render;
pub mod resource;
pub mod semantics;

pub use cirquent::{Cirquent, Group, Sequent};
pub use formula::{Atom, Formula, Sign, Substitution};
pub use inference::{Proof, RuleApp, System};

use thiserror::Error;

/// Limits on the brute-force deciders, overridable from the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Distinct atoms for model enumeration.
    pub max_atoms: usize,
    /// Oliterals for binary-instance search, and per-atom occurrence bound.
    pub max_oliterals: usize,
    pub max_occurrences_per_atom: usize,
    /// Oports for arrangement enumeration.
    pub max_ports: usize,
}

impl Default for Caps {
    fn default() -> Caps {
        Caps {
            max_atoms: 20,
            max_oliterals: 24,
            max_occurrences_per_atom: 8,
            max_ports: 16,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{what} count {actual} exceeds cap {limit}")]
pub struct CapExceeded {
    pub what: &'static str,
    pub limit: usize,
    pub actual: usize,
}
