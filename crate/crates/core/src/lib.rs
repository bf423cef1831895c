//! Exact-arithmetic machinery for approximating morphisms between powers of
//! abelian varieties, reducing them to weighted and special normal forms,
//! and transporting inclusion witnesses along the reduction chain.
//!
//! Points live in a synthetic Mordell–Weil model (torsion plus a normed free
//! module over each endomorphism ring), so every inequality the chain relies
//! on is decided with rationals. Linear-algebra kernels are generic over an
//! exact field scalar (see [`scalar::ExactField`]); the rest of the crate works
//! with the big-integer aliases below.

pub mod approx;
pub mod certified;
pub mod dirichlet;
pub mod error;
pub mod geomnum;
pub mod ledger;
pub mod linalg;
pub mod model;
pub mod morphisms;
pub mod pack;
pub mod pipeline;
pub mod reduction;
pub mod reference;
pub mod rings;
pub mod scalar;
pub mod scenario;
pub mod suites;
pub mod thresholds;
pub mod wire;

pub use error::{Error, Result};

/// Arbitrary-precision integer used for ring coordinates and search indices.
pub type Integer = num_bigint::BigInt;
/// Arbitrary-precision rational used for heights, Gram forms and constants.
pub type Rational = num_rational::BigRational;
/// Dense rational matrix.
pub type RationalMatrix = linalg::Matrix<Rational>;
/// Dense integer matrix.
pub type IntegerMatrix = linalg::Matrix<Integer>;

/// Builds an [`Integer`] from a machine integer.
pub fn int(n: i64) -> Integer {
    Integer::from(n)
}

/// Builds a reduced [`Rational`] `num/den`. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(Integer::from(num), Integer::from(den))
}

/// Embeds an integer as a rational.
pub fn ratz(n: &Integer) -> Rational {
    Rational::from_integer(n.clone())
}
