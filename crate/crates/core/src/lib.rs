//! Spectral analysis of discrete periodic Schrödinger operators `Δ + V` on `Z^d`.
//!
//! The crate assembles Floquet matrices, computes band structures and gaps,
//! decides whether the Bloch variety contains the graph of an entire function
//! (via an explicit factorization of the characteristic polynomial), and
//! builds the non-real potentials with that property by solving a diagonal
//! inverse eigenvalue problem.

pub mod eigensolve;
pub mod error;
pub mod floquet;
pub mod inverse;
pub mod lattice;
pub mod potential;
pub mod sampling;
pub mod spectrum;
pub mod variety;

pub use error::{Error, Result};
pub use floquet::{assemble_direct, assemble_fourier, FloquetMatrix, MultiplierPoint};
pub use lattice::{CellIndex, LatticeConfig};
pub use num_complex::Complex64;
pub use potential::{FourierCoefficients, Potential};
