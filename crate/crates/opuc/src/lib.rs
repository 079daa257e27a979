//! Orthogonal polynomials on the unit circle with periodic Verblunsky
//! coefficients.
//!
//! The crate computes the Chebyshev closed form for the orthonormal
//! polynomials of a period-p coefficient sequence, the discriminant and the
//! band/closed-gap/resonance structure it induces on the circle, the
//! equilibrium-measure CDF and singular points of the Szego-asymptotic
//! limit functions, scaled Christoffel-Darboux kernel ratios with their
//! sinc and half-integer Bessel limits, and the Wall/Schur/Caratheodory
//! functions of the measure.
//!
//! All numeric code is generic over the real scalar (f32 or f64) through
//! [`scalar::Scalar`]; the f64 instantiations used by the CLI are aliased
//! at the crate root.

pub mod cheb;
pub mod equilibrium;
pub mod error;
pub mod kernels;
pub mod periodic;
pub mod poly;
pub mod report;
pub mod scalar;
pub mod schur;
pub mod szego;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision complex scalar.
pub type C64 = num_complex::Complex64;
/// Dense complex polynomial over f64.
pub type Poly64 = poly::ComplexPoly<f64>;
/// Laurent polynomial over f64.
pub type Laurent64 = poly::LaurentPoly<f64>;
/// Verblunsky period over f64.
pub type Verblunsky64 = szego::VerblunskyPeriod<f64>;
/// Discriminant data over f64.
pub type Discriminant64 = periodic::Discriminant<f64>;
/// Band structure over f64.
pub type BandStructure64 = periodic::BandStructure<f64>;
/// Band CDF over f64.
pub type BandCdf64 = equilibrium::BandCdf<f64>;
