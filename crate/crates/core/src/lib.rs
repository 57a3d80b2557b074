//! Phase-space region operators in a truncated Fock basis.
//!
//! The crate builds operator-valued measures of phase-space domains —
//! points, segments, lines, rectangles, disks, triangles, regular polygons,
//! and rigid motions and unions of these — as dense Hermitian matrices over
//! the lowest `dim` number states, then manipulates them with
//! trace-increasing Kraus maps (rotate, reflect, displace, polygon assembly,
//! domain doubling) and analyzes the resulting quasiprobability-mass
//! spectra: bounds, step matrices, tiling runs, and majorization relations.
//!
//! # Normalization
//!
//! Two-dimensional domains integrate the displaced-parity kernel with a
//! `1/π` prefactor against the area element, so the whole plane maps to the
//! identity and traces follow the `area / 2π` rule. One-dimensional segments
//! integrate the unprefixed kernel along arc length; full lines are returned
//! as unit-normalized projectors (with the arc-length scale reported
//! separately); point domains evaluate the unprefixed kernel. Angles are
//! radians throughout.
//!
//! # Determinism
//!
//! Identical inputs produce identical bytes: computations are
//! single-threaded, eigendecompositions are post-processed into a canonical
//! order (descending eigenvalues, lexicographic tie-break, first significant
//! vector component made real positive), and randomized tests draw from
//! seeded ChaCha streams.
//!
//! The numeric kernels are generic over the floating scalar through
//! [`scalar::Scalar`]; `f64` aliases for the main types are exported at the
//! crate root, and `f32` aliases for the configuration and operator types.

pub mod cpti;
pub mod error;
pub mod fock;
pub mod geometry;
pub mod quadrature;
pub mod regionop;
pub mod scalar;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};

/// Complex scalar over `f64`.
pub type C64 = nalgebra::Complex<f64>;
/// Complex scalar over `f32`.
pub type C32 = nalgebra::Complex<f32>;

/// Double-precision truncation configuration.
pub type TruncationConfig64 = fock::TruncationConfig<f64>;
/// Single-precision truncation configuration.
pub type TruncationConfig32 = fock::TruncationConfig<f32>;

/// Double-precision operator on the truncated number basis.
pub type FockOperator64 = fock::FockOperator<f64>;
/// Single-precision operator on the truncated number basis.
pub type FockOperator32 = fock::FockOperator<f32>;

/// Double-precision ordered eigendecomposition.
pub type Spectrum64 = fock::Spectrum<f64>;

/// Double-precision phase-space region description.
pub type Region64 = geometry::Region<f64>;

/// Double-precision Kraus map.
pub type KrausMap64 = cpti::KrausMap<f64>;
