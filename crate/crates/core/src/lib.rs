//! Zeros of the scaled Euler polynomials `E_n(nx)`, their limiting zero
//! attractor, and the asymptotic machinery used to explain it.
//!
//! The numerics are generic over [`Real`]; the aliases below fix the scalar
//! to the MPFR-backed [`Mpf`] or to `f64`.

pub mod attractor;
pub mod decomp;
pub mod density;
pub mod eulerpoly;
pub mod json;
pub mod mproots;
pub mod scalar;
pub mod szego;

pub use num_complex::Complex;
pub use scalar::{ComplexReal, Mpf, Real};

/// Arbitrary precision real.
pub type MpReal = Mpf;
/// Arbitrary precision complex value; the precision travels with the parts.
pub type MpComplex = Complex<Mpf>;
pub type C64 = Complex<f64>;

pub type MpRootSet = mproots::RootSet<Mpf>;
pub type RootSet64 = mproots::RootSet<f64>;
pub type MpAttractor = attractor::AttractorModel<Mpf>;
pub type Attractor64 = attractor::AttractorModel<f64>;
