//! Pauli-Breit Hamiltonians on a fault-tolerant gate budget.
//!
//! The crate assembles the second-quantized Pauli-Breit Hamiltonian from
//! integral tensors, factorizes it, synthesizes block-encoding circuits in a
//! Clifford+T intermediate representation, checks them against dense
//! Fock-space references and counts logical resources.
//!
//! Conventions used throughout:
//! - orbitals, spins and qubits are 0-based; spin 0 is alpha, 1 is beta;
//! - qubit `j` is bit `j` of a computational basis index, `|1>` means occupied;
//! - `a = (X + iY)/2` on the target qubit, Majoranas are
//!   `gamma_0 = a + a^dag` and `gamma_1 = i(a - a^dag)`;
//! - energies are in Hartree.

pub mod blocks;
pub mod circuit;
pub mod encoding;
pub mod error;
pub mod factorize;
pub mod linalg;
pub mod pbham;
pub mod qrom;
pub mod simulate;

pub use error::{Error, Result};

pub type C64 = num_complex::Complex64;
pub type CMatrix = nalgebra::DMatrix<C64>;
