//! Counting sensitive input regions of additive decision-tree ensembles.
//!
//! An ensemble partitions its input space into finitely many regions, one
//! per consistent assignment of its guard predicates. A region is
//! *sensitive* when another region that agrees on every non-sensitive
//! feature, and differs in at most `d` sensitive guard bits, changes the
//! ensemble output by more than a gap `G`. This crate counts sensitive
//! regions in three independent ways:
//!
//! * [`oracle`]: exhaustive enumeration, for small instances and testing;
//! * [`exact`]: one monolithic decision-diagram compilation;
//! * [`xcount`]: a decomposition into sensitive-bit mask pairs whose
//!   solution sets are merged either exactly or by a streaming
//!   `(ε, δ)` union estimator.
//!
//! [`run`] and [`bench`] provide the command-line front end and the
//! benchmark harness used by the `treesens` binary.

pub mod bench;
pub mod compile;
pub mod dd;
pub mod error;
pub mod exact;
pub mod gen;
pub mod model;
pub mod oracle;
pub mod run;
pub mod xcount;

pub use error::{Error, ModelError, Result};
pub use model::{build_guard_table, parse_ensemble, Ensemble, GuardTable, RegionAssignment, TreeNode};
