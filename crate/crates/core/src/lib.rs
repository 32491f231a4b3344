//! Melnikov-function toolkit for the quadratic global center
//! `ẋ = y - 2x² - η, ẏ = -2xy` perturbed by piecewise polynomials across
//! the switching lines `x = 0` and `y = η`.

pub mod algebra;
pub mod error;
pub mod generators;
pub mod melnikov;
pub mod quadrature;
pub mod reduction;
pub mod scalar;
pub mod simulate;

pub use algebra::{AlgebraicTail, Poly, Rational};
pub use error::{Error, Result};
pub use reduction::{Arc, GeneratorId, IntegralId, ReducedExpr, Reducer, Side};
pub use scalar::Real;

/// Polynomial in `h` with exact rational coefficients.
pub type PolyH = Poly<Rational>;
/// Half-integer-power tail with exact rational coefficients.
pub type Tail = AlgebraicTail<Rational>;
