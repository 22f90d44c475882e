//! Error type shared by all modules of the crate.

use num_complex::Complex64;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Vector or matrix dimensions do not agree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A matrix does not have the structure an operation requires
    /// (Hermitian, PT-symmetric, paired spectrum, ...).
    #[error("structure violation ({context}): max deviation {violation:.3e}")]
    Structure { context: String, violation: f64 },

    /// The energy parameter ρ fell inside the guard band around an
    /// eigenvalue of the eliminated block G, where (G − ρI)⁻¹ blows up.
    #[error("rho = {rho} is within the pole guard of eigenvalue {pole} of G")]
    PoleProximity { rho: f64, pole: f64 },

    /// A scan interval contains no usable grid point outside pole guards.
    #[error("interval [{lo}, {hi}] is degenerate: no grid point clears the pole guards")]
    DegenerateInterval { lo: f64, hi: f64 },

    /// The requested interval misses part of the spectrum.
    #[error("interval does not cover eigenvalue {excluded} of the full Hamiltonian")]
    Coverage { excluded: Complex64 },

    /// The vector is not a PT eigenstate, so its PT phase is undefined
    /// (typical for broken-phase eigenvectors).
    #[error("PT phase undefined: relative deviation {residual:.3e} from a PT eigenstate")]
    PhaseUndefined { residual: f64 },

    /// A self pseudo-norm vanished (exceptional point); the level cannot
    /// be pseudo-normalized to Q = ±1.
    #[error("level {level} is degenerate: |self pseudo-norm| = {pseudo_norm:.3e} below threshold")]
    Degeneracy { level: usize, pseudo_norm: f64 },

    /// Spectral data must be pseudo-normalized first.
    #[error("spectral data is not pseudo-normalized")]
    NotNormalized,

    /// The dense eigensolver did not converge or was refused.
    #[error("oracle failure: {0}")]
    OracleFailure(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
