//! Exact cycle statistics of the interchange process on weighted graphs.
//!
//! The number of `k`-cycles of a permutation is a class function on the
//! symmetric group; its expansion in irreducible characters turns the
//! expected cycle counts of the interchange process into sums of
//! exponentials of representation-level Laplacian eigenvalues. This crate
//! computes those expansions exactly, evaluates the resulting formulas, and
//! checks them against brute-force combinatorics and Monte Carlo simulation.

pub mod characters;
pub mod error;
pub mod exact;
pub mod formulas;
pub mod graph;
pub mod linalg;
pub mod mc;
pub mod partitions;
pub mod spectra;
pub mod symfun;
pub mod verify;

pub use error::{Error, Result};
pub use partitions::Partition;
