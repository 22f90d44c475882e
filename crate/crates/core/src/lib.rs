//! Spectral toolkit built around the Feshbach (Schur-complement) reduction
//! of Hermitian and PT-symmetric Hamiltonians.
//!
//! The partitioned eigenproblem [[F − EI, αA], [A†, G − EI]] covers the
//! Hermitian case at α = +1 and the PT-symmetric one at α = −1. Eliminating
//! the G sector yields the energy-dependent effective Hamiltonian
//! H_eff(ρ) = F − α·A·(G − ρI)⁻¹·A†, which is Hermitian for every real ρ;
//! the physical spectrum consists of the self-consistent roots ρ = Ê_n(ρ).
//! Spontaneous PT-symmetry breaking shows up as roots that disappear into
//! complex-conjugate pairs, tracked here together with the indefinite
//! (parity-metric) inner product and the pseudo-unitary time evolution it
//! supports.

pub mod error;
pub mod evolve;
pub mod feshbach;
pub mod hobasis;
pub mod linalg;
pub mod oracle;
pub mod partitioning;
pub mod pseudometric;
pub mod selfconsist;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::C64;
