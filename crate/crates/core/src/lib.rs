//! Self-stabilizing 2/3-approximate maximum matching workbench.
//!
//! The crate models an anonymous-daemon distributed system: a fixed graph
//! whose nodes each hold a maximal matching edge or are single, running a
//! seven-rule local protocol that stabilizes to an improved matching `M+`
//! with no length-3 augmenting paths. The modules split along the tool
//! chain:
//!
//! * [`graph`] — static topology, generators, and the underlying maximal
//!   matching with its matched/single role partition.
//! * [`protocol`] — per-node state, guards, commands, and single
//!   daemon transitions.
//! * [`daemon`] — execution strategies (synchronous, central, random
//!   subsets, adversarial scoring, replay), bounded runs, move accounting,
//!   and the theoretical move bounds.
//! * [`oracle`] — independent correctness checks: exact maximum matching,
//!   3-augmenting-path search, stable-structure and approximation-ratio
//!   verification.
//! * [`mc`] — exhaustive exploration of small instances under every
//!   daemon choice: silence (no cycles), closure of stable configurations,
//!   and the longest move-weighted schedule.
//! * [`report`] — shared pass/fail check reporting.
//!
//! The crate is `no_std` (with `alloc`) so the protocol and checkers can be
//! embedded anywhere; file formats and the CLI live in the companion crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod daemon;
pub mod digest;
pub mod graph;
pub mod mc;
pub mod oracle;
pub mod protocol;
pub mod report;

pub use graph::{Graph, Matching, NodeId, RolePartition};
pub use protocol::{Configuration, Instance, NodeState, RuleId};
