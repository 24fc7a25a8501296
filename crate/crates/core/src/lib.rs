//! Numerical laboratory for projected composition operators
//! `K_φ f = P(f∘φ)` on the Bergman space `A²(𝔻)` of the unit disk.

pub mod bergman;
pub mod carleson;
pub mod dbar;
pub mod domain;
pub mod error;
pub mod hypotheses;
pub mod operators;
pub mod quadrature;
pub mod symbol;

pub use domain::Complex;
pub use error::{Error, Result};
pub use symbol::Symbol;
