use thiserror::Error;

/// Everything that can go wrong inside the engine.
///
/// Variants split into two families: structural problems (bad shapes, malformed
/// tables) and mathematical rejections (the input is well formed but fails a
/// property such as being a frame). [`Error::is_rejection`] tells them apart.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NonHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("eigensolver failed to converge")]
    NoConvergence,

    #[error("matrix is numerically singular (min eigenvalue {min_eigenvalue:.3e})")]
    SingularMatrix { min_eigenvalue: f64 },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NonUnitary { residual: f64 },

    #[error("family is not a frame (lower frame bound {lower_bound:.3e})")]
    NotAFrame { lower_bound: f64 },

    #[error("frame is not Parseval (residual {residual:.3e})")]
    NotParseval { residual: f64 },

    #[error("invalid parameter: {reason} (residual {residual:.3e})")]
    InvalidParameter { reason: String, residual: f64 },

    #[error("left multiplier is singular (min singular value {min_singular:.3e})")]
    SingularR { min_singular: f64 },

    #[error("frame is Riesz: the complementary projection is zero")]
    NoComplement,

    #[error("invalid Cayley table: {0}")]
    InvalidCayleyTable(String),

    #[error("not a unitary representation: {reason} (residual {residual:.3e})")]
    NotARepresentation { reason: String, residual: f64 },

    #[error("projection is not invariant under the left regular action (residual {residual:.3e})")]
    NotInvariant { residual: f64 },

    #[error("matrix is not an orthogonal projection (residual {residual:.3e})")]
    NotAProjection { residual: f64 },

    #[error("operator is not in the commutant algebra (residual {residual:.3e})")]
    NotInAlgebra { residual: f64 },

    #[error("projections are not equivalent in the algebra")]
    NotEquivalent,

    #[error("generic construction failed after {attempts} attempts")]
    GenericityFailure { attempts: usize },

    #[error("central decomposition failed after {attempts} attempts")]
    DecompositionFailed { attempts: usize },

    #[error("generators do not belong to the same representation: {0}")]
    NotSameRep(String),

    #[error("algebra construction failed: {0}")]
    AlgebraFailure(String),

    #[error("internal consistency check `{check}` failed (residual {residual:.3e})")]
    InvariantViolated { check: String, residual: f64 },
}

impl Error {
    /// True when the input was well formed but mathematically rejected.
    pub fn is_rejection(&self) -> bool {
        !matches!(
            self,
            Error::DimensionMismatch(_) | Error::InvalidCayleyTable(_) | Error::NoConvergence
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Returns `InvariantViolated` unless `residual <= bound`.
pub(crate) fn ensure(check: &str, residual: f64, bound: f64) -> Result<()> {
    if residual <= bound {
        Ok(())
    } else {
        Err(Error::InvariantViolated {
            check: check.to_string(),
            residual,
        })
    }
}
