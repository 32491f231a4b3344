//! Exact univariate algebra in the energy level `h`.
//!
//! [`Poly`] is a dense polynomial with coefficients lowest power first and
//! trailing zeros stripped eagerly, so two polynomials are equal exactly when
//! their coefficient vectors are. [`AlgebraicTail`] adds the half-integer
//! powers of `h + 1/(2η)` produced by the boundary segments of the oval.

mod poly;
pub(crate) mod rational;
mod tail;

pub use poly::{Coefficient, Poly};
pub use rational::{format_rational, parse_rational, rational_serde, rational_vec_serde, Rational};
pub use tail::{AlgebraicTail, TailRecord};
