//! Executable models of hierarchical self-simulating Wang tile sets.
//!
//! The crate is organised bottom-up:
//!
//! * [`wang`]: tiles, tile sets, patches, macro-tiles and the matching predicates.
//! * [`solver`]: completion, counting and enumeration of finite tilings, torus search,
//!   and the row automaton used for entropy estimates.
//! * [`tm`]: single-tape Turing machines, a direct simulator, and their space-time
//!   diagrams as Wang tiles.
//! * [`fixpoint`]: the compiler from a check program and macro-tile geometry to a tile
//!   set, with the quasiperiodicity gadgets and simulation verification.
//! * [`shifts1d`]: one-dimensional effective shifts, recurrence oracles and the
//!   letter-delegation layout.
//! * [`entropy`]: the red/blue density recursion, its explicit expansion, and the
//!   scheduler that steers the red density towards a right-enumerable target.

pub mod entropy;
pub mod error;
pub mod fixpoint;
pub mod shifts1d;
pub mod solver;
pub mod tm;
pub mod wang;

pub use error::{Error, Result};
