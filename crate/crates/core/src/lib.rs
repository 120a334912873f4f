//! Certified lower bounds on the trace-distance entanglement measure from
//! witness data, in three trust models:
//!
//! * trusted devices — a witness operator is re-normalized by its spectral
//!   spread and its expectation value bounds the distance to the separable
//!   set, along with seven derived entanglement quantifiers;
//! * measurement-device-independent — the witness is decomposed over trusted
//!   ancilla preparations and the bound is recovered from correlation tables
//!   of uncharacterized measurements;
//! * device-independent — Bell expressions are normalized by their extreme
//!   quantum values, including multipartite entanglement-depth bounds from
//!   Svetlichny scores.
//!
//! A brute-force separable-approximation oracle upper-bounds the same
//! measure independently, so every reported lower bound can be checked
//! against it.

pub mod depth;
pub mod di;
pub mod eigen;
pub mod error;
pub mod io;
pub mod mdi;
pub mod operator;
pub mod oracle;
pub mod states;
pub mod tolerances;
pub mod witness;

pub use eigen::Spectrum;
pub use error::{Error, Result};
pub use operator::{expectation, DensityMatrix, HermitianOperator, Ket};
pub use tolerances::Tolerances;
