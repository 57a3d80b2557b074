//! Real scalar abstraction.
//!
//! Everything in this crate is generic over [`Scalar`], a real floating-point
//! type offering the field/transcendental operations of [`nalgebra::RealField`]
//! plus the special functions the closed forms need. `f64` is the working
//! default — the documented tolerances assume it — while `f32` remains
//! available for storage-constrained callers. Concrete aliases for both live
//! at the crate root.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point scalar the operator algebra is generic over.
pub trait Scalar: RealField + FromPrimitive + ToPrimitive + Copy {
    /// Error function `erf(x)`.
    fn erf(self) -> Self;

    /// `ln |Γ(x)|`. Callers in this crate only pass positive arguments.
    fn ln_gamma(self) -> Self;

    /// `true` when the value is neither NaN nor infinite.
    fn is_finite_scalar(self) -> bool;

    /// Nearest representable value of an `f64` constant.
    fn from_f64_lossy(x: f64) -> Self;

    /// Widening (or identity) conversion used for diagnostics and file output.
    fn to_f64_lossy(self) -> f64;

    /// Conversion from a count; exact for every count this crate produces.
    fn from_usize_lossy(n: usize) -> Self;
}

impl Scalar for f64 {
    fn erf(self) -> Self {
        libm::erf(self)
    }

    fn ln_gamma(self) -> Self {
        libm::lgamma(self)
    }

    fn is_finite_scalar(self) -> bool {
        self.is_finite()
    }

    fn from_f64_lossy(x: f64) -> Self {
        x
    }

    fn to_f64_lossy(self) -> f64 {
        self
    }

    fn from_usize_lossy(n: usize) -> Self {
        n as f64
    }
}

impl Scalar for f32 {
    fn erf(self) -> Self {
        libm::erff(self)
    }

    fn ln_gamma(self) -> Self {
        libm::lgammaf(self)
    }

    fn is_finite_scalar(self) -> bool {
        self.is_finite()
    }

    fn from_f64_lossy(x: f64) -> Self {
        x as f32
    }

    fn to_f64_lossy(self) -> f64 {
        f64::from(self)
    }

    fn from_usize_lossy(n: usize) -> Self {
        n as f32
    }
}

/// Modulus of a complex number over any crate scalar (the inherent
/// `Complex::norm` requires `num_traits::Float`, which [`Scalar`] does not).
pub fn cabs<T: Scalar>(z: nalgebra::Complex<T>) -> T {
    (z.re * z.re + z.im * z.im).sqrt()
}
