//! Resource estimation for qubitized quantum simulation of k-point
//! (Bloch-orbital) electronic-structure Hamiltonians.
//!
//! The crate builds four linear-combination-of-unitaries representations of
//! a k-point Hamiltonian — sparse, single-factorized (SF), double-factorized
//! (DF), and tensor-hypercontraction (THC) — and computes for each the
//! factorization, the L1 norm λ, itemized per-step Toffoli and logical-qubit
//! costs, phase-estimation totals, and a surface-code physical translation.
//! A dense brute-force oracle verifies the algebra at tiny sizes.

pub mod cli;
pub mod costmodel;
pub mod error;
pub mod factorize;
pub mod hamiltonian;
pub mod io;
pub mod kmesh;
pub mod lambda;
pub mod linalg;
pub mod oracle;
pub mod physical;
pub mod report;
pub mod sweep;

pub use error::{Error, Result};
