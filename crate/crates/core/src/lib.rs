//! Exact discrete-complexity measures over finite set systems.
//!
//! A *discrete space* is a finite ground set together with an ordered family
//! of generator subsets. This crate builds the standard spaces (Boolean
//! literals, graph stars, rectangles, ...), evaluates straight-line and cyclic
//! constructions over them, implements the semi-filter fusion machinery, and
//! computes the complexity measures exactly on small instances:
//!
//! * `D`, `D∩`, `D∪` and multi-target `D` by iterative deepening,
//! * the cover complexity `ρ` (and its semi-ultra-filter variant) by two
//!   independent routes,
//! * the canonical cover complexity of the non-equality graph.
//!
//! Every exact answer carries a witness that re-verifies.

pub mod constructions;
mod error;
pub mod fusion;
pub mod sets;
pub mod solvers;
pub mod spaces;

pub use error::{Error, Result};
