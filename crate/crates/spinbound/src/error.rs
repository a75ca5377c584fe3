//! Crate-wide error type.

use crate::pauli::Lattice;

/// Errors produced by lattice, algebra, assembly, oracle, and solver layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Two operands live on different lattices.
    #[error("lattice mismatch: {0} vs {1}")]
    LatticeMismatch(Lattice, Lattice),

    /// A site index does not exist on the lattice.
    #[error("site index {site} out of range for {lattice}")]
    SiteOutOfRange { site: u32, lattice: Lattice },

    /// A monomial word was given the same site twice.
    #[error("duplicate site {site} in monomial word")]
    DuplicateSite { site: u32 },

    /// The dense matrix representation is capped to keep memory bounded.
    #[error("matrix representation capped at {max} sites, requested {n}")]
    CapacityExceeded { n: u32, max: u32 },

    /// A configuration value or combination is not usable.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// An assembly-time structural check failed (these are verified, not assumed).
    #[error("structure fault: {0}")]
    StructureFault(String),

    /// Exact-diagonalization oracle failure.
    #[error("oracle failure: {0}")]
    Oracle(String),

    /// SDP solver failure or invalid solver output.
    #[error("solver failure: {0}")]
    Solver(String),

    /// Malformed sparse SDPA data.
    #[error("SDPA format error: {0}")]
    SdpaFormat(String),

    /// Requested combination is valid but not supported by the selected backend.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
