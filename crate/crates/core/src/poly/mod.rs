//! Exact multivariate polynomials over ℚ and Gröbner-basis driven ideal
//! operations.
//!
//! A [`Ring`] is an ordered list of variable names with an optional
//! designated quasi-uniformizer `π`. Polynomials only carry their arity;
//! the ring is needed to parse and print them.

mod groebner;
mod ideal;
mod order;
mod parse;
mod polynomial;
mod ring;

pub use groebner::{groebner_basis, normal_form, GroebnerBasis};
pub(crate) use ideal::jacobian_minors;
pub use ideal::{
    eliminate, exact_quotient, ideal_quotient, ideal_rel, krull_dim, radical_contains, regular_at_generic, saturate,
    smooth_at, Ideal, IdealRelation, RelationVerdict, SmoothVerdict,
};
pub use order::MonomialOrder;
pub use polynomial::{Exponent, Polynomial};
pub use ring::{fmt_rat, parse_rat, Limits, RationalPoint, Ring};

/// Exact rational coefficients.
pub type Rat = num_rational::BigRational;

/// Builds a rational from a pair of machine integers.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

/// Builds an integral rational.
pub fn int(n: i64) -> Rat {
    Rat::from_integer(n.into())
}
