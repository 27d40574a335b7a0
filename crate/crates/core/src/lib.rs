//! Linkoids, their virtual closures and invariants, virtual spectra, and
//! entanglement measures of open polygonal curves.
//!
//! Polynomial types are generic over their coefficient ring; the aliases
//! below fix the exact rational and floating-point instances used
//! throughout.

pub mod closure;
pub mod curves3d;
pub mod diagram;
pub mod invariants;
pub mod involution;
pub mod polynomial;
pub mod spectrum;

pub use diagram::{GaussCode, PlanarDiagram, Sign};
pub use involution::Involution;
pub use polynomial::{Arrow, Laurent, RealPoly, VarA, VarT};

/// Exact rational coefficients.
pub type Q = num_rational::Ratio<i128>;
/// Laurent polynomial in `A` with rational coefficients.
pub type LaurentPoly = Laurent<Q>;
/// Polynomial in `A` and the `K_i` with rational coefficients.
pub type ArrowPoly = Arrow<Q>;
/// Integer Laurent polynomial in `t`.
pub type AffinePoly = Laurent<i64, VarT>;
/// Laurent polynomial in `A` with floating-point coefficients.
pub type RealLaurent = Laurent<f64>;
