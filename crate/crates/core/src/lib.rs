//! Exact engine for Lie remarkable equations.

pub mod algebras;
pub mod analysis;
pub mod catalog;
pub mod error;
pub mod gcd;
pub mod jet;
pub mod linalg;
pub mod numfield;
pub mod poly;
pub mod ratexpr;
pub mod sample;
pub mod sqfree;
pub mod syntax;
pub mod vfield;

pub use error::{Error, Result};
pub use jet::{algebra_dims, CoordId, JetSpec, MultiIndex};
pub use poly::{Monomial, Point, Poly, Rational};
pub use ratexpr::RatExpr;
