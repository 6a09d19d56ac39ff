//! Conformable fractional calculus on the positive orthant.
//!
//! Expressions are parsed into trees, differentiated symbolically with
//! `D^α_{x_k} = x_k^{1-α} ∂_k`, integrated against `Π_k x_k^{α-1} dx` on
//! boxes, and used to check Picone, Green and Hardy-type relations.

pub mod conformable;
mod error;
pub mod expr;
pub mod hardy;
pub mod identities;
pub mod optimize;
pub mod quadrature;
pub mod report;
pub mod suite;

pub use conformable::{AlphaOrder, DiffScheme, NumericDiffConfig};
pub use error::{Error, Result};
pub use expr::{parse, EvalError, Expr, ParseError, Point, PointError};
pub use identities::{ExponentVec, PiconePair};
pub use quadrature::{BoxDomain, QuadratureSpec};
