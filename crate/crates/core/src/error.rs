//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised by the exact-algebra layer.
#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("context mismatch: operands were built over different variable contexts")]
    ContextMismatch,
    #[error("variable `{0}` is not declared in this context")]
    UnknownVariable(String),
    #[error("substitution rules are not an algebra homomorphism: commutator of images of {0} and {1} is wrong")]
    NotHomomorphism(String, String),
    #[error("mode {0} occurs in the element but has no twist weight")]
    MissingWeight(String),
    #[error("divergent trace: mode {0} has twist weight 1")]
    DivergentTrace(String),
    #[error("cutoff {cutoff} is too small for an element with creation/annihilation power {needed}")]
    CutoffTooSmall { cutoff: usize, needed: usize },
    #[error("evaluation map does not cover variable `{0}`")]
    MissingEvaluation(String),
    #[error("division by zero polynomial")]
    ZeroDenominator,
}

/// Errors raised by matrix constructors and generator extraction.
#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("signed index 0 is excluded; valid indices are -r..-1, 1..r")]
    ZeroIndex,
    #[error("index {0} is out of range for rank {1}")]
    IndexOutOfRange(i32, u8),
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("matrix is not affine in the spectral variable (entry ({0},{1}) has degree > 1)")]
    NotAffine(i32, i32),
    #[error("matrix is not monic: leading coefficient at ({0},{1}) is not the identity pattern")]
    NotMonic(i32, i32),
    #[error("matrix is not quadratic-monic in the spectral variable (entry ({0},{1}))")]
    NotQuadratic(i32, i32),
    #[error("generator set violates F_ab = -F_{{-b,-a}} at ({0},{1})")]
    NotFlipAntisymmetric(i32, i32),
    #[error("swap indices must satisfy 1 <= i != j <= r, got ({0},{1})")]
    BadSwap(u8, u8),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Errors raised when instantiating a Lax matrix from a spec.
#[derive(Debug, Error)]
pub enum LaxError {
    #[error("family {0} requires rank {1}, got {2}")]
    RankForcedMismatch(String, u8, u8),
    #[error("rank must be >= 2, got {0}")]
    RankTooSmall(u8),
    #[error("signs vector must have length r with entries +-1")]
    BadSigns,
    #[error("family {0} does not accept label {1}")]
    UnexpectedLabel(String, String),
    #[error("family {0} requires label {1}")]
    MissingLabel(String, String),
    #[error("scaled limit is structurally divergent: positive powers of the label survive at entry ({0},{1})")]
    DivergentLimit(i32, i32),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Errors raised by the quantum-space layer.
#[derive(Debug, Error)]
pub enum ChainError {
    #[error("need exactly {0} twist values, got {1}")]
    TwistCount(usize, usize),
    #[error("degenerate twists: {0}")]
    DegenerateTwists(String),
    #[error("chain length must be >= 1")]
    ZeroLength,
    #[error(transparent)]
    Lax(#[from] LaxError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
