//! Fourier analysis on quantum Boolean cubes at desk scale.
//!
//! Observables on `n ≤ 12` qubits are held as [`QOperator`] values carrying a
//! dense matrix and a Pauli spectrum. On top of that sit the influence
//! calculus, the depolarizing semigroup, seeded generators, FKN rounding and a
//! checker that evaluates both sides of each inequality and reports a verdict.

pub mod eigen;
pub mod error;
pub mod fkn;
pub mod generators;
pub mod influence;
pub mod io;
pub mod laws;
pub mod matrix;
pub mod norms;
pub mod operator;
pub mod pauli;
pub mod rng;
pub mod semigroup;
pub mod transform;

pub use error::{Error, Result, MAX_QUBITS};
pub use matrix::CMatrix;
pub use num_complex::Complex64;
pub use operator::{pauli_matrix, pauli_operator, QOperator};
pub use pauli::{PauliIndex, QubitSet};
