//! Type inference for quantum programs over the Pauli group.
//!
//! Types are intersections of Pauli (or additive, ℤ[1/√2]-weighted Pauli-sum)
//! operators stabilizing the state, combined by unions for measurement
//! branches. The crate provides the Pauli algebra, type normalisation and
//! separability, gate semantics and inference, measurement, stabilizer-code
//! checks, Clifford synthesis, a dense-matrix oracle and a text syntax.

pub mod error;
pub mod exec;
pub mod fuzz;
pub mod gates;
pub mod infer;
pub mod measure;
pub mod oracle;
pub mod pauli;
pub mod program;
pub mod qecc;
pub mod report;
pub mod ring;
pub mod sum;
pub mod synth;
pub mod syntax;
pub mod types;

pub use error::{Error, Result};
