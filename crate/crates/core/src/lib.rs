//! Entanglement indicators of the spin-1/2 XX chain with three-spin interactions.
//!
//! The model is a periodic chain of spins coupled by isotropic XX exchange plus
//! a chiral three-spin term of dimensionless strength `alpha`. It maps to free
//! fermions, which makes the infinite chain exactly solvable: this crate carries
//! both that analytic route and a finite-chain exact-diagonalization route, so
//! every quantity can be cross-checked between independent paths.
//!
//! - [`model`]: dispersion, Fermi-point structure, and ground-state energy of
//!   the infinite chain.
//! - [`corr`]: fermionic two-point functions, block correlation matrices, and
//!   the n-th order geometric measures built from their spectra.
//! - [`twosite`]: nearest-neighbor two-qubit reduced state and its concurrence.
//! - [`ed`]: bitmask-basis exact diagonalization with total-Sz sector blocking,
//!   plus the finite-chain free-fermion oracle used to validate it.
//! - [`ggm`]: genuine multipartite entanglement of finite ground states over
//!   bipartitions, sweep drivers, discontinuity detection, and power-law fits.
//! - [`series`]: shared sweep-series container and kink detector.
//! - [`quad`]: adaptive Gauss-Kronrod quadrature.
//! - [`linalg`]: dense symmetric/Hermitian eigensolvers and a Lanczos solver
//!   for extremal eigenpairs of matrix-free Hermitian operators.
//!
//! The crate is `no_std` + `alloc`; everything here is pure computation on
//! immutable inputs and is safe to call concurrently. All energies are in
//! units of the two-body coupling J.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod corr;
pub mod ed;
mod error;
pub mod ggm;
pub mod linalg;
pub mod model;
pub mod quad;
pub mod series;
pub mod twosite;

pub use error::Error;

/// Convenience alias used across the crate.
pub type Result<T> = core::result::Result<T, Error>;
