//! Spatial spin wavefunctions with arbitrary real body-fixed projection.

pub mod coupling;
pub mod error;
pub mod halfangle;
pub mod numbers;
pub mod observables;
pub mod quadrature;
pub mod reactions;
pub mod regularization;
pub mod special;
pub mod verify;
pub mod wavefunctions;

pub use error::{Error, Result};
pub use halfangle::{AngularExpression, HalfAngleMonomial, Ladder, SinExpansion};
pub use numbers::{HalfInt, Phase, Projection, Scalar, Surd};
pub use wavefunctions::{Branch, DFunction, SpinLabel};
