//! Exact-arithmetic verification of Fedosov resolutions, twisted Hochschild
//! (co)chains and their trace maps at finite jet order.

pub mod algebra;
pub mod endo;
pub mod error;
pub mod fedosov;
pub mod form;
pub mod graded;
pub mod harness;
pub mod hochschild;
pub mod monomial;
pub mod poly;
pub mod rational;
pub mod residual;
pub mod tracemaps;

pub use error::{Error, Result};
pub use form::{FormJet, FormKey, JetShape};
pub use monomial::YMono;
pub use poly::PolyX;
pub use rational::Rational;
