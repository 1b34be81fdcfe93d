//! Symbolic and polyhedral machinery for height reduction in local
//! uniformization.
//!
//! The crate is `no_std` (it only needs `alloc`). Everything is exact:
//! coefficients are arbitrary precision rationals, lattice data are
//! machine integers checked at desk scale.
//!
//! Layout:
//!
//! * [`poly`]: polynomials over ℚ with an optional designated
//!   quasi-uniformizer variable, Gröbner bases and ideal operations.
//! * [`linalg`]: rational rank, integer Hermite/Smith normal forms.
//! * [`monoid`]: affine monoids, monoid pairs `λ: ℕ → Q`, binomial
//!   presentations of `k°_P[Q]`.
//! * [`polyhedral`]: dual cones, heighted fans and semistable subdivision.
//! * [`blowup`]: blowup charts, strict transforms, annihilator lifting and
//!   the key-lemma blowups.
//! * [`models`]: the standard models `S_{π,m}` and `T_{π,m,r,l}`, the
//!   log-smoothness fiber criterion and semistable parameters.
//! * [`valuation`]: monomial valuations of finite height and their centers.
//! * [`pipeline`]: height-induction drivers producing towers and
//!   certificates.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod blowup;
pub mod error;
pub mod linalg;
pub mod models;
pub mod monoid;
pub mod pipeline;
pub mod poly;
pub mod polyhedral;
pub mod valuation;

pub use error::{Error, Result};
pub use poly::{Ideal, Limits, MonomialOrder, Polynomial, Rat, RationalPoint, Ring};
