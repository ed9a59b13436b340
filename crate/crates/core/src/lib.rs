//! Space-time block codes from cyclic division algebras.
//!
//! The crate builds the iterated 2n x 2n codes obtained by mapping a pair of
//! n x n cyclic-algebra codewords through `(X, Y) -> [X, theta*tau(Y); Y,
//! tau(X)]`, decides full diversity by the algebraic criteria (norm
//! equations, quadratic-form anisotropy, finite-residue certificates),
//! analyzes maximum-likelihood decoding complexity through the basis
//! orthogonality matrix M and group decodability, and verifies behavior with
//! a sphere decoder plus Monte Carlo Rayleigh-channel simulation.
//!
//! Module map:
//! - [`numfield`]: exact number-field arithmetic (rational vectors over a
//!   declared Q-basis), automorphisms, complex embeddings.
//! - [`algebra`]: cyclic algebras, the left-regular representation, the
//!   iterated map and its scaled variant, code-basis generation.
//! - [`catalog`]: ready-made code instances (Alamouti, Jafarkhani, Golden,
//!   Silver, their iterated versions, and the degree-3 constructions).
//! - [`analysis`]: M-matrix, decodability grouping and exponents, diversity
//!   scans, norm-equation searches, quadratic-form certificates.
//! - [`decode`]: real lattice construction, QR structure, sphere decoding,
//!   exhaustive-search ML oracle.
//! - [`sim`]: Rayleigh MIMO channel and block-error-rate measurement.

// index-based loops over multiplication tables and coefficient vectors are
// the natural shape of this code
#![allow(clippy::needless_range_loop)]
#![allow(clippy::manual_memcpy)]

pub mod algebra;
pub mod analysis;
pub mod catalog;
pub mod decode;
pub mod numfield;
pub mod rat;
pub mod sim;

pub use algebra::{AlgebraElement, CyclicAlgebra, IterationParams, MatrixOverField};
pub use catalog::{CodeName, CodeSpec};
pub use numfield::{builtin_field, Automorphism, Field, FieldElement, FieldSpec};
pub use rat::Rat;
