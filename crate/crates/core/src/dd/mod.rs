//! Reduced ordered decision diagrams with integer terminals.
//!
//! A single [`DdManager`] owns one hash-consed node arena shared by
//! algebraic diagrams ([`Add`], arbitrary `i64` terminals) and binary
//! diagrams ([`Bdd`], terminals 0 and 1). Variables are ordered by their
//! [`VarId`]; smaller ids sit closer to the root. Because every node is
//! unique, two handles are equal iff they denote the same function.
//!
//! Handles are plain indices and are only meaningful for the manager that
//! created them.

mod dot;
mod manager;
mod ops;

use thiserror::Error;

pub use manager::{ArithOp, DdManager, Limits, ThresholdMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for VarId {
    fn from(v: usize) -> Self {
        VarId(u32::try_from(v).expect("variable id exceeds u32"))
    }
}

pub(crate) type NodeId = u32;

/// Handle to an algebraic decision diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Add(pub(crate) NodeId);

/// Handle to a binary decision diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bdd(pub(crate) NodeId);

impl Bdd {
    pub const FALSE: Bdd = Bdd(0);
    pub const TRUE: Bdd = Bdd(1);

    pub fn is_false(self) -> bool {
        self == Bdd::FALSE
    }

    pub fn is_true(self) -> bool {
        self == Bdd::TRUE
    }

    /// The same function viewed as a 0/1-valued ADD.
    pub fn as_add(self) -> Add {
        Add(self.0)
    }
}

impl Add {
    /// Reinterprets a 0/1-valued diagram as a BDD.
    pub(crate) fn as_bdd(self) -> Bdd {
        Bdd(self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DdError {
    #[error("terminal arithmetic overflowed")]
    Overflow,
    #[error("time budget exhausted")]
    Timeout,
    #[error("node budget of {limit} nodes exhausted")]
    NodeLimit { limit: usize },
    #[error("memory budget of {limit} bytes exhausted")]
    MemoryLimit { limit: usize },
    #[error("variable {0} is both renamed into and already present")]
    ImageVarInSupport(u32),
    #[error("variable {0} is in the support but not in the counting universe")]
    SupportNotInUniverse(u32),
    #[error("variable lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("cannot sample from an unsatisfiable diagram")]
    Unsatisfiable,
}

pub type DdResult<T> = Result<T, DdError>;

#[cfg(test)]
mod tests;
