//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while constructing or transforming operators.
///
/// Scalar payloads are widened to `f64` so the type stays independent of the
/// scalar parameter the rest of the crate carries.
#[derive(Debug, Error)]
pub enum Error {
    #[error("truncation dimension must lie in 2..=256, got {0}")]
    TruncationDim(usize),

    #[error("effective dimension must lie in 1..={dim}, got {effective}")]
    EffectiveDim { dim: usize, effective: usize },

    #[error("tolerance must be positive and finite, got {0}")]
    Tolerance(f64),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is {rows}x{cols}, expected {dim}x{dim}")]
    ShapeMismatch { rows: usize, cols: usize, dim: usize },

    #[error("operator dimensions differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("vector lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("operator is not hermitian: max |A - A*| = {deviation:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("operator is not diagonal: max off-diagonal modulus {deviation:.3e} exceeds tolerance {tol:.3e}")]
    NotDiagonal { deviation: f64, tol: f64 },

    #[error("region has no finite measure, so no quadrature rule applies")]
    InfiniteMeasure,

    #[error("no quadrature rule for {0}; use its closed form")]
    NoQuadratureRule(&'static str),

    #[error("union members must be declared pairwise disjoint for this operation")]
    UnionNotDisjoint,

    #[error("quadrature order must be at least 4, got {0}")]
    QuadratureOrder(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown map kind: {0}")]
    UnknownMapKind(String),

    #[error("kraus map must contain at least one generator")]
    EmptyMap,

    #[error("dilation shape: {0}")]
    DilationShape(String),

    #[error("tiling seed: {0}")]
    TilingSeed(String),

    #[error("tiling trace needs at least two records, got {0}")]
    TraceTooShort(usize),
}
