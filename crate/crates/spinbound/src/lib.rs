//! Certified bounds for quantum spin models via symmetry-reduced moment relaxations.
//!
//! The crate builds semidefinite relaxations of the ground-state problem for
//! Heisenberg-type Hamiltonians on periodic chains and square lattices: moment
//! matrices over a monomial basis of Pauli words, reduced by sign symmetries,
//! translation Fourier blocks, point-group and axis-permutation moment
//! identifications, and optionally strengthened with reduced-density-matrix
//! positivity and ground-state optimality constraints. Solving the relaxation
//! yields certified lower bounds on ground-state energies and two-sided bounds
//! on observables; an exact-diagonalization oracle validates everything at
//! small sizes.
//!
//! Module map:
//! - [`pauli`]: lattices, Pauli monomials, exact phase algebra, dense matrix
//!   representations.
//! - [`symmetry`]: symmetry groups, canonical moment keys, forced-zero rules.
//! - [`basis`]: monomial bases and their sign/orbit partitions.
//! - [`model`]: Hamiltonians and observables for the four model families.
//! - [`expr`]: interned linear expressions in moment variables.
//! - [`moment`]: moment-matrix block assembly and translation Fourier blocks.
//! - [`constraints`]: RDM positivity, commutator equalities, optimality blocks.
//! - [`oracle`]: exact diagonalization and exact moment evaluation.
//! - [`ipm`]: dense interior-point solver for large symmetry-reduced blocks.
//! - [`sdp`]: conic compilation, embedded and external solvers, bound drivers.
//! - [`sdpa`]: deterministic sparse SDPA export/import.
//! - [`config`]: relaxation configuration and validation.

pub mod basis;
pub mod config;
pub mod constraints;
pub mod error;
pub mod expr;
pub mod ipm;
pub mod model;
pub mod moment;
pub mod oracle;
pub mod pauli;
pub mod sdp;
pub mod sdpa;
pub mod symmetry;

pub use error::{Error, Result};
