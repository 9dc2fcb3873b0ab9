//! Exact symbolic differentiation of simplicial manifolds into higher Lie
//! algebroids, together with the linear-algebra toolkit the computation rests
//! on: simplicial index combinatorics, graded-commutative polynomial
//! arithmetic, Dold-Kan (de)normalization, normalized cochain calculus with
//! cup product and simplicial differential, and exact rational cohomology.
//!
//! Everything is generic over the coefficient [`Scalar`]; the computations
//! that must be exact instantiate it with [`Q`].

pub mod cochain;
pub mod cohomology;
pub mod cosimplicial;
pub mod differentiate;
pub mod dold_kan;
pub mod matrix;
pub mod oracle;
pub mod par;
pub mod poly;
pub mod scalar;
pub mod simplex;

pub use scalar::Scalar;

/// Exact rational coefficients, the default scalar for every computation
/// whose results are contractual. `f64` satisfies [`Scalar`] too and can be
/// substituted for quick approximate experiments.
pub type Q = num_rational::BigRational;

/// Shorthand for building an exact rational from a numerator/denominator pair.
pub fn q(num: i64, den: i64) -> Q {
    <Q as Scalar>::from_ratio(num, den)
}
